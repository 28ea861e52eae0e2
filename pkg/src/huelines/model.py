"""Core data model: polylines, line sets, and the bin grid they are drawn on.

Data coordinates have y increasing upward; the renderer flips rows when
writing images. Bin units index the grid so that bin (col, row) covers
[col, col+1] x [row, row+1] with its center at (col + 0.5, row + 0.5).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .validation import check_finite_array


class LineKind(str, Enum):
    TIMESERIES = "timeseries"
    TRAJECTORY = "trajectory"


@dataclass(frozen=True)
class Polyline:
    """An ordered chain of 2D vertices with a stable integer id."""

    id: int
    vertices: np.ndarray  # (V, 2) float64, V >= 2

    def __post_init__(self):
        verts = np.asarray(self.vertices, dtype=np.float64)
        if verts.ndim != 2 or verts.shape[1] != 2:
            raise ValueError(f"polyline {self.id}: vertices must be (V, 2)")
        if verts.shape[0] < 2:
            raise ValueError(f"polyline {self.id}: needs at least 2 vertices")
        check_finite_array(verts, f"polyline {self.id} vertices")
        if self.id < 0:
            raise ValueError("polyline id must be non-negative")
        object.__setattr__(self, "vertices", verts)

    @property
    def n_vertices(self) -> int:
        return self.vertices.shape[0]


@dataclass(frozen=True)
class LineSet:
    """A collection of polylines with dense ids 0..N-1 and a data-space bbox."""

    lines: list[Polyline]
    bbox: tuple[float, float, float, float]  # xmin, ymin, xmax, ymax
    kind: LineKind = LineKind.TRAJECTORY

    def __post_init__(self):
        if not self.lines:
            raise ValueError("LineSet needs at least one polyline")
        ids = sorted(line.id for line in self.lines)
        if ids != list(range(len(self.lines))):
            raise ValueError("polyline ids must be exactly 0..N-1")
        xmin, ymin, xmax, ymax = self.bbox
        if not (xmax > xmin and ymax > ymin):
            raise ValueError("bbox must have positive width and height")
        for line in self.lines:
            x, y = line.vertices[:, 0], line.vertices[:, 1]
            if x.min() < xmin - 1e-9 or x.max() > xmax + 1e-9:
                raise ValueError(f"polyline {line.id} exceeds bbox in x")
            if y.min() < ymin - 1e-9 or y.max() > ymax + 1e-9:
                raise ValueError(f"polyline {line.id} exceeds bbox in y")

    @classmethod
    def from_lines(cls, lines: list[Polyline], kind: LineKind = LineKind.TRAJECTORY) -> "LineSet":
        """Build a LineSet with the tight bbox of all vertices.

        A degenerate dimension (all points on one horizontal or vertical
        line) is padded by 0.5 data units on each side so the bbox always
        has positive extent.
        """
        if not lines:
            raise ValueError("no polylines given")
        xmin = min(line.vertices[:, 0].min() for line in lines)
        xmax = max(line.vertices[:, 0].max() for line in lines)
        ymin = min(line.vertices[:, 1].min() for line in lines)
        ymax = max(line.vertices[:, 1].max() for line in lines)
        if xmax == xmin:
            xmin, xmax = xmin - 0.5, xmax + 0.5
        if ymax == ymin:
            ymin, ymax = ymin - 0.5, ymax + 0.5
        return cls(lines=lines, bbox=(float(xmin), float(ymin), float(xmax), float(ymax)), kind=kind)

    def __len__(self) -> int:
        return len(self.lines)

    @property
    def n_points(self) -> int:
        return sum(line.n_vertices for line in self.lines)


@dataclass(frozen=True)
class Affine:
    """Axis-aligned affine map from data units to bin units."""

    sx: float
    sy: float
    ox: float
    oy: float

    def apply(self, xy: np.ndarray) -> np.ndarray:
        xy = np.asarray(xy, dtype=np.float64)
        out = np.empty_like(xy)
        out[..., 0] = xy[..., 0] * self.sx + self.ox
        out[..., 1] = xy[..., 1] * self.sy + self.oy
        return out


@dataclass(frozen=True)
class GridSpec:
    """Bin-grid geometry: logical resolution plus the data-to-bin transform."""

    width: int
    height: int
    transform: Affine

    def __post_init__(self):
        if self.width < 8 or self.height < 8:
            raise ValueError("grid must be at least 8x8 bins")

    @property
    def n_bins(self) -> int:
        return self.width * self.height

    def bin_center(self, flat_index: np.ndarray) -> np.ndarray:
        """Centers of flat bin indices (row-major, row * width + col), in bin units."""
        flat_index = np.asarray(flat_index)
        col = flat_index % self.width
        row = flat_index // self.width
        return np.stack([col + 0.5, row + 0.5], axis=-1).astype(np.float64)


def fit_grid(ls: LineSet, width: int, height: int, preserve_aspect: bool = False) -> GridSpec:
    """Fit an affine transform mapping the line set's bbox into a width x height grid.

    With preserve_aspect the scale is uniform and the data is centered in
    the slack dimension; otherwise the bbox is stretched onto the full grid.
    """
    if width < 8 or height < 8:
        raise ValueError("grid must be at least 8x8 bins")
    xmin, ymin, xmax, ymax = ls.bbox
    bw, bh = xmax - xmin, ymax - ymin
    if bw <= 0 or bh <= 0:
        raise ValueError("degenerate bbox: zero width or height")
    if preserve_aspect:
        s = min(width / bw, height / bh)
        ox = -xmin * s + (width - bw * s) / 2.0
        oy = -ymin * s + (height - bh * s) / 2.0
        transform = Affine(s, s, ox, oy)
    else:
        sx, sy = width / bw, height / bh
        transform = Affine(sx, sy, -xmin * sx, -ymin * sy)
    return GridSpec(width=width, height=height, transform=transform)
