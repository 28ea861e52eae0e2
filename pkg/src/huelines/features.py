"""Per-bin feature sets: which lines pass within a disc of each bin center.

The grid is stored CSR-style: ``indptr`` (one slot per bin plus one) and a
flat ``line_ids`` array holding each bin's member ids in ascending order.
Extraction visits, per segment, only the bins whose center can possibly lie
within the disc radius, then applies the exact point-to-segment test, so the
result equals the all-pairs definition.
"""

from __future__ import annotations

import hashlib
import struct
import warnings
from dataclasses import dataclass

import numpy as np

from .model import GridSpec, LineSet, Affine
from .validation import check_positive

# Segments longer than this many bin units are subdivided before candidate
# enumeration; a bounding box around a long diagonal segment would otherwise
# visit far more bins than the swept disc can reach.
_MAX_SEGMENT_SPAN = 4.0

_CACHE_MAGIC = b"HLFG"
_CACHE_VERSION = 1


@dataclass(frozen=True)
class FeatureGrid:
    """Per-bin sorted sets of line ids, plus the disc radius that built them."""

    spec: GridSpec
    indptr: np.ndarray  # (n_bins + 1,) int64
    line_ids: np.ndarray  # (total pairs,) int64, ascending within each bin
    radius: float
    n_lines: int

    def bin_set(self, flat_index: int) -> np.ndarray:
        return self.line_ids[self.indptr[flat_index]:self.indptr[flat_index + 1]]

    @property
    def counts(self) -> np.ndarray:
        return np.diff(self.indptr)

    def nonempty_bins(self) -> np.ndarray:
        return np.flatnonzero(self.counts > 0)


@dataclass(frozen=True)
class DensityGrid:
    """Per-bin line counts derived from a FeatureGrid."""

    spec: GridSpec
    counts: np.ndarray  # (n_bins,) int64

    @property
    def max_density(self) -> int:
        return int(self.counts.max()) if self.counts.size else 0

    def as_array2d(self) -> np.ndarray:
        return self.counts.reshape(self.spec.height, self.spec.width)


@dataclass(frozen=True)
class BinSample:
    """The subset of bins that feeds clustering."""

    bin_indices: np.ndarray  # flat indices, ascending, no duplicates
    seed: int
    min_density: int
    max_samples: int

    def __len__(self) -> int:
        return len(self.bin_indices)


def point_segment_distance(q, a, b) -> float:
    """Euclidean distance from point q to the closed segment [a, b]."""
    q = np.asarray(q, dtype=np.float64)
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    d = b - a
    dd = float(d @ d)
    if dd == 0.0:
        return float(np.hypot(*(q - a)))
    t = float(np.clip((q - a) @ d / dd, 0.0, 1.0))
    closest = a + t * d
    return float(np.hypot(*(q - closest)))


def _segment_table(ls: LineSet, transform: Affine) -> tuple[np.ndarray, ...]:
    """Flatten all polylines into one segment table in bin units."""
    pts = np.concatenate([line.vertices for line in ls.lines], axis=0)
    line_of = np.repeat(
        np.fromiter((line.id for line in ls.lines), dtype=np.int64, count=len(ls.lines)),
        [line.n_vertices for line in ls.lines],
    )
    pts = transform.apply(pts)
    joined = line_of[:-1] == line_of[1:]
    ax, ay = pts[:-1, 0][joined], pts[:-1, 1][joined]
    bx, by = pts[1:, 0][joined], pts[1:, 1][joined]
    return ax, ay, bx, by, line_of[:-1][joined]


def _subdivide(ax, ay, bx, by, seg_line):
    """Split long segments so candidate boxes stay close to the swept disc."""
    length = np.hypot(bx - ax, by - ay)
    nsub = np.maximum(np.ceil(length / _MAX_SEGMENT_SPAN).astype(np.int64), 1)
    if nsub.max() == 1:
        return ax, ay, bx, by, seg_line
    idx = np.repeat(np.arange(len(ax)), nsub)
    # fractional positions of each sub-segment inside its parent
    k = np.arange(len(idx)) - np.repeat(np.cumsum(nsub) - nsub, nsub)
    t0 = k / nsub[idx]
    t1 = (k + 1) / nsub[idx]
    dx, dy = bx[idx] - ax[idx], by[idx] - ay[idx]
    return (
        ax[idx] + t0 * dx,
        ay[idx] + t0 * dy,
        ax[idx] + t1 * dx,
        ay[idx] + t1 * dy,
        seg_line[idx],
    )


def _candidate_boxes(ax, ay, bx, by, spec: GridSpec, radius: float):
    """Per-segment candidate bin boxes, clipped to the grid."""
    w, h = spec.width, spec.height
    col_lo = np.clip(np.floor(np.minimum(ax, bx) - radius - 0.5).astype(np.int64), 0, w - 1)
    col_hi = np.clip(np.ceil(np.maximum(ax, bx) + radius - 0.5).astype(np.int64), 0, w - 1)
    row_lo = np.clip(np.floor(np.minimum(ay, by) - radius - 0.5).astype(np.int64), 0, h - 1)
    row_hi = np.clip(np.ceil(np.maximum(ay, by) + radius - 0.5).astype(np.int64), 0, h - 1)
    ncols = col_hi - col_lo + 1
    counts = ncols * (row_hi - row_lo + 1)
    # segments fully outside the grid would otherwise clip to a spurious box
    offgrid = (
        (np.maximum(ax, bx) < -radius) | (np.minimum(ax, bx) > w + radius)
        | (np.maximum(ay, by) < -radius) | (np.minimum(ay, by) > h + radius)
    )
    counts[offgrid] = 0
    return col_lo, row_lo, ncols, counts


class _PairScratch:
    """Reusable buffers for the candidate test.

    Fresh large allocations fault in a page at a time, which dominates
    runtime on small machines; one pool touched once and recycled across
    chunks keeps the inner loop at memory speed.
    """

    def __init__(self, cap: int):
        self.idx = np.empty(cap, dtype=np.int64)
        self.local = np.empty(cap, dtype=np.int64)
        self.gi = np.empty(cap, dtype=np.int64)
        self.rowk = np.empty(cap, dtype=np.int64)
        self.fx = np.empty(cap, dtype=np.float64)
        self.fy = np.empty(cap, dtype=np.float64)
        self.gx = np.empty(cap, dtype=np.float64)
        self.gy = np.empty(cap, dtype=np.float64)
        self.gz = np.empty(cap, dtype=np.float64)
        self.t = np.empty(cap, dtype=np.float64)
        self.u = np.empty(cap, dtype=np.float64)
        self.mask = np.empty(cap, dtype=bool)
        self.seq = np.arange(cap, dtype=np.int64)


def _chunk_keys(ws: _PairScratch, m: int, starts, col_lo, row_lo, ncols,
                ax, ay, dx, dy, dd, line, w: int, n_lines: int,
                radius: float) -> np.ndarray:
    """Exact (bin, line) incidence keys for one chunk of compacted segments.

    All per-candidate arrays live in the scratch pool; every op writes
    into a preallocated view.
    """
    idx = ws.idx[:m]
    local = ws.local[:m]
    gi = ws.gi[:m]
    rowk = ws.rowk[:m]
    fx, fy = ws.fx[:m], ws.fy[:m]
    gx, gy, gz = ws.gx[:m], ws.gy[:m], ws.gz[:m]
    t, u = ws.t[:m], ws.u[:m]
    mask = ws.mask[:m]

    # candidate -> segment index via run-length markers (starts are strictly
    # increasing because zero-count segments were compacted away)
    idx[:] = 0
    idx[starts[1:]] = 1
    np.cumsum(idx, out=idx)

    # candidate -> (col, row) inside its segment's box
    np.take(starts, idx, out=local)
    np.subtract(ws.seq[:m], local, out=local)
    np.take(ncols, idx, out=gi)
    np.floor_divide(local, gi, out=rowk)
    np.remainder(local, gi, out=local)
    np.take(col_lo, idx, out=gi)
    np.add(local, gi, out=local)        # local = col
    np.take(row_lo, idx, out=gi)
    np.add(rowk, gi, out=rowk)          # rowk = row

    # vector from segment start to the bin center
    np.add(local, 0.5, out=fx)
    np.take(ax, idx, out=gx)
    np.subtract(fx, gx, out=fx)         # fx = px
    np.add(rowk, 0.5, out=fy)
    np.take(ay, idx, out=gy)
    np.subtract(fy, gy, out=fy)         # fy = py

    # clamped projection onto the segment, then exact disc test
    np.take(dx, idx, out=gx)
    np.take(dy, idx, out=gy)
    np.take(dd, idx, out=gz)
    np.multiply(fx, gx, out=t)
    np.multiply(fy, gy, out=u)
    np.add(t, u, out=t)
    np.greater(gz, 0.0, out=mask)
    np.divide(t, gz, out=t, where=mask)  # degenerate: dx=dy=0, t is unused
    np.clip(t, 0.0, 1.0, out=t)
    np.multiply(t, gx, out=u)
    np.subtract(fx, u, out=fx)           # fx = ex
    np.multiply(t, gy, out=u)
    np.subtract(fy, u, out=fy)           # fy = ey
    np.multiply(fx, fx, out=fx)
    np.multiply(fy, fy, out=fy)
    np.add(fx, fy, out=fx)
    np.less(fx, radius * radius, out=mask)

    # pack (bin, line) into one sortable key
    np.multiply(rowk, w, out=rowk)
    np.add(rowk, local, out=rowk)
    np.multiply(rowk, n_lines, out=rowk)
    np.take(line, idx, out=gi)
    np.add(rowk, gi, out=rowk)
    return rowk[mask]


def extract_feature_sets(ls: LineSet, spec: GridSpec, radius: float = 1.0) -> FeatureGrid:
    """Compute every bin's set of line ids passing within `radius` of its center.

    Matches the brute-force definition (distance of the bin center to the
    nearest segment of the line strictly below `radius`) for every bin.
    """
    check_positive(radius, "radius")
    n_lines = len(ls)
    ax, ay, bx, by, seg_line = _segment_table(ls, spec.transform)
    ax, ay, bx, by, seg_line = _subdivide(ax, ay, bx, by, seg_line)
    col_lo, row_lo, ncols, counts = _candidate_boxes(ax, ay, bx, by, spec, radius)

    keep = np.flatnonzero(counts)
    ax, ay, bx, by = ax[keep], ay[keep], bx[keep], by[keep]
    seg_line = seg_line[keep]
    col_lo, row_lo, ncols, counts = (
        col_lo[keep], row_lo[keep], ncols[keep], counts[keep])
    dx, dy = bx - ax, by - ay
    dd = dx * dx + dy * dy
    offsets = np.zeros(len(counts) + 1, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])
    total = int(offsets[-1])

    keys = []
    if total:
        budget = 2_000_000
        bounds = [0]
        while bounds[-1] < len(counts):
            nxt = int(np.searchsorted(offsets, offsets[bounds[-1]] + budget))
            bounds.append(min(max(nxt, bounds[-1] + 1), len(counts)))
        cap = max(int(offsets[hi] - offsets[lo])
                  for lo, hi in zip(bounds[:-1], bounds[1:]))
        ws = _PairScratch(cap)
        for lo, hi in zip(bounds[:-1], bounds[1:]):
            m = int(offsets[hi] - offsets[lo])
            starts = offsets[lo:hi] - offsets[lo]
            keys.append(_chunk_keys(
                ws, m, starts, col_lo[lo:hi], row_lo[lo:hi], ncols[lo:hi],
                ax[lo:hi], ay[lo:hi], dx[lo:hi], dy[lo:hi], dd[lo:hi],
                seg_line[lo:hi], spec.width, n_lines, radius))

    unique = (np.unique(np.concatenate(keys)) if keys
              else np.empty(0, dtype=np.int64))
    bins = unique // n_lines
    ids = unique % n_lines
    counts = np.bincount(bins, minlength=spec.n_bins)
    indptr = np.zeros(spec.n_bins + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return FeatureGrid(spec=spec, indptr=indptr, line_ids=ids, radius=float(radius), n_lines=n_lines)


def density_of(fg: FeatureGrid) -> DensityGrid:
    """Per-bin densities: the cardinality of each bin's feature set."""
    return DensityGrid(spec=fg.spec, counts=fg.counts.astype(np.int64))


def sample_bins(fg: FeatureGrid, min_density: int, max_samples: int, seed: int) -> BinSample:
    """Pick the bins to cluster: all bins at or above the density threshold,
    uniformly subsampled without replacement when they exceed `max_samples`."""
    if max_samples < 2:
        raise ValueError("max_samples must be at least 2")
    candidates = np.flatnonzero(fg.counts >= min_density)
    if len(candidates) < 2:
        raise ValueError("nothing to cluster at this threshold")
    if len(candidates) > max_samples:
        rng = np.random.default_rng(seed)
        candidates = np.sort(rng.choice(candidates, size=max_samples, replace=False))
    return BinSample(
        bin_indices=candidates.astype(np.int64),
        seed=seed,
        min_density=min_density,
        max_samples=max_samples,
    )


def dataset_fingerprint(raw: bytes, spec: GridSpec, radius: float) -> str:
    """Hash of the input bytes and every parameter extraction depends on."""
    t = spec.transform
    tag = f"|{spec.width}x{spec.height}|{radius!r}|{t.sx!r},{t.sy!r},{t.ox!r},{t.oy!r}"
    digest = hashlib.sha256()
    digest.update(raw)
    digest.update(tag.encode())
    return digest.hexdigest()


def save_feature_grid(fg: FeatureGrid, path: str, fingerprint: str) -> None:
    """Write the sidecar cache: versioned header plus the raw CSR arrays."""
    t = fg.spec.transform
    fp = fingerprint.encode()
    with open(path, "wb") as fh:
        fh.write(_CACHE_MAGIC)
        fh.write(struct.pack(
            "<IIIQd4dHQQ",
            _CACHE_VERSION, fg.spec.width, fg.spec.height, fg.n_lines, fg.radius,
            t.sx, t.sy, t.ox, t.oy,
            len(fp), len(fg.indptr), len(fg.line_ids),
        ))
        fh.write(fp)
        fh.write(fg.indptr.astype("<i8").tobytes())
        fh.write(fg.line_ids.astype("<i8").tobytes())


def load_feature_grid(path: str, fingerprint: str) -> FeatureGrid | None:
    """Load a sidecar cache; returns None when missing, stale, or unreadable."""
    try:
        fh_probe = open(path, "rb")
        fh_probe.close()
    except FileNotFoundError:
        return None
    try:
        with open(path, "rb") as fh:
            if fh.read(4) != _CACHE_MAGIC:
                return None
            header = fh.read(struct.calcsize("<IIIQd4dHQQ"))
            (version, width, height, n_lines, radius,
             sx, sy, ox, oy, fp_len, n_indptr, n_ids) = struct.unpack("<IIIQd4dHQQ", header)
            if version != _CACHE_VERSION:
                return None
            if fh.read(fp_len).decode() != fingerprint:
                return None
            indptr = np.frombuffer(fh.read(8 * n_indptr), dtype="<i8")
            ids = np.frombuffer(fh.read(8 * n_ids), dtype="<i8")
    except (OSError, struct.error, UnicodeDecodeError, ValueError):
        warnings.warn(f"unreadable feature cache {path}, recomputing")
        return None
    if len(indptr) != width * height + 1 or len(ids) != indptr[-1]:
        return None
    spec = GridSpec(width=width, height=height, transform=Affine(sx, sy, ox, oy))
    return FeatureGrid(spec=spec, indptr=indptr.copy(), line_ids=ids.copy(),
                       radius=radius, n_lines=n_lines)
