"""Cluster mean vectors and the two assignment passes.

After clustering the sampled bins, every bin of the grid (sampled or
not) is labeled with its nearest cluster by squared deviation from the
cluster's mean line-frequency vector, and every line is then routed to
the cluster where it accumulates the most density.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import TextIO

import numpy as np

from .clustering import Clustering
from .features import BinSample, DensityGrid, FeatureGrid
from .model import GridSpec, LineSet

NONE_LABEL = -1


@dataclass(frozen=True)
class MeanVector:
    """Per-cluster frequency of each line id over the cluster's member bins."""

    cluster_id: int
    ids: np.ndarray  # sorted line ids with nonzero frequency
    values: np.ndarray  # frequencies in (0, 1], aligned with ids
    support: int  # number of member bins

    def freq(self, line_id: int) -> float:
        pos = np.searchsorted(self.ids, line_id)
        if pos < len(self.ids) and self.ids[pos] == line_id:
            return float(self.values[pos])
        return 0.0

    def to_dict(self) -> dict:
        return {
            "cluster_id": int(self.cluster_id),
            "support": int(self.support),
            "freq": {int(i): float(v) for i, v in zip(self.ids, self.values)},
        }


@dataclass(frozen=True)
class ClusterMap:
    """Per-bin cluster label; NONE_LABEL marks below-threshold bins."""

    spec: GridSpec
    labels: np.ndarray  # (n_bins,) int64
    k: int

    def as_array2d(self) -> np.ndarray:
        return self.labels.reshape(self.spec.height, self.spec.width)


@dataclass(frozen=True)
class LineAssignment:
    """Per-line cluster label plus the full weight table behind it."""

    labels: np.ndarray  # (n_lines,) int64, NONE_LABEL when all weights vanish
    weights: np.ndarray  # (n_lines, k) float64

    @property
    def k(self) -> int:
        return self.weights.shape[1]

    def lines_of(self, cluster_id: int) -> np.ndarray:
        return np.flatnonzero(self.labels == cluster_id)


def _pair_table(sample: BinSample, fg: FeatureGrid) -> tuple[np.ndarray, np.ndarray]:
    """(sampled-bin position, line id) pairs across the whole sample."""
    starts = fg.indptr[sample.bin_indices]
    lens = fg.indptr[sample.bin_indices + 1] - starts
    gather = np.repeat(starts, lens) + (
        np.arange(int(lens.sum())) - np.repeat(np.cumsum(lens) - lens, lens)
    )
    rows = np.repeat(np.arange(len(sample)), lens)
    return rows, fg.line_ids[gather]


def mean_vectors(clustering: Clustering, sample: BinSample, fg: FeatureGrid) -> list[MeanVector]:
    """Average the binary line-indicator vectors of each cluster's bins."""
    if len(clustering.assignment) != len(sample):
        raise ValueError("clustering does not cover this sample")
    rows, lines = _pair_table(sample, fg)
    labels = clustering.assignment[rows]
    counts = np.bincount(
        (labels * fg.n_lines + lines).astype(np.int64),
        minlength=clustering.k * fg.n_lines,
    ).reshape(clustering.k, fg.n_lines)
    out = []
    for c in range(clustering.k):
        support = int((clustering.assignment == c).sum())
        ids = np.flatnonzero(counts[c]).astype(np.int64)
        out.append(MeanVector(
            cluster_id=c,
            ids=ids,
            values=counts[c, ids] / support,
            support=support,
        ))
    return out


def bin_cluster_distance(s_p, mean: MeanVector) -> float:
    """Squared deviation from full membership, summed over the bin's lines.

    Lines absent from the cluster mean contribute a full (1-0)^2 each.
    """
    s = np.asarray(sorted(s_p), dtype=np.int64)
    if len(s) == 0:
        raise ValueError("bin feature set must be nonempty")
    if len(mean.ids) == 0:
        return float(len(s))
    pos = np.searchsorted(mean.ids, s)
    found = (pos < len(mean.ids)) & (mean.ids[np.minimum(pos, len(mean.ids) - 1)] == s)
    freq = np.zeros(len(s))
    freq[found] = mean.values[pos[found]]
    return float(((1.0 - freq) ** 2).sum())


def assign_bins(fg: FeatureGrid, means: list[MeanVector], min_density: int) -> ClusterMap:
    """Label every bin at or above the density threshold with its nearest cluster.

    Nearest means the lowest squared deviation from the cluster mean; ties
    go to the lowest cluster index.
    """
    if not means:
        raise ValueError("need at least one cluster mean")
    k = len(means)
    counts = fg.counts
    eligible = counts >= max(min_density, 1)

    # distances for all bins at once: one dense penalty vector per cluster,
    # summed over each bin's id run
    dist = np.zeros((k, fg.spec.n_bins), dtype=np.float64)
    boundaries = fg.indptr[:-1]
    has_any = fg.indptr[1:] > fg.indptr[:-1]
    for c, mean in enumerate(means):
        penalty = np.ones(fg.n_lines, dtype=np.float64)
        penalty[mean.ids] = (1.0 - mean.values) ** 2
        per_pair = penalty[fg.line_ids]
        if len(per_pair):
            sums = np.add.reduceat(per_pair, np.minimum(boundaries, len(per_pair) - 1))
            dist[c] = np.where(has_any, sums, 0.0)

    labels = np.where(eligible, dist.argmin(axis=0), NONE_LABEL).astype(np.int64)
    return ClusterMap(spec=fg.spec, labels=labels, k=k)


def assign_lines(ls: LineSet, cmap: ClusterMap, fg: FeatureGrid, dg: DensityGrid) -> LineAssignment:
    """Route each line to the cluster where its bins carry the most density."""
    if fg.n_lines != len(ls):
        raise ValueError("feature grid does not match the line set")
    k = cmap.k
    n = fg.n_lines
    lens = np.diff(fg.indptr)
    bin_of_pair = np.repeat(np.arange(fg.spec.n_bins), lens)
    label_of_pair = cmap.labels[bin_of_pair]
    density_of_pair = dg.counts[bin_of_pair].astype(np.float64)
    keep = label_of_pair >= 0
    keys = fg.line_ids[keep] * k + label_of_pair[keep]
    weights = np.bincount(keys, weights=density_of_pair[keep], minlength=n * k)
    weights = weights.reshape(n, k)
    labels = np.where(weights.any(axis=1), weights.argmax(axis=1), NONE_LABEL)
    return LineAssignment(labels=labels.astype(np.int64), weights=weights)


def write_line_assignment_csv(assignment: LineAssignment, target: str | TextIO) -> None:
    """CSV rows line_id,cluster_id,weight_0,...; unassigned lines write -1."""
    own = isinstance(target, str)
    fh = open(target, "w", newline="") if own else target
    try:
        writer = csv.writer(fh)
        writer.writerow(
            ["line_id", "cluster_id"] + [f"weight_{c}" for c in range(assignment.k)]
        )
        for i, (label, row) in enumerate(zip(assignment.labels, assignment.weights)):
            writer.writerow([i, int(label)] + [repr(float(w)) for w in row])
    finally:
        if own:
            fh.close()
