"""Average-linkage agglomerative clustering over sampled bins.

Node numbering follows the usual convention: leaves are 0..n-1 and the
merge at step t creates node n+t. Ties on merge distance are broken by
the lexicographically smallest (node, node) pair so identical inputs
always produce identical trees.

The builder keeps per-row minimum caches and updates distances with the
unweighted-average (Lance-Williams) rule, recomputing a row's cache only
when its cached nearest neighbour was consumed by a merge. Average
linkage is reducible, so a merged row can never undercut an untouched
cache entry.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .features import BinSample
from .validation import check_square_matrix


@dataclass(frozen=True)
class Dendrogram:
    n_leaves: int
    merges: np.ndarray  # (n_leaves-1, 2) int64 child node ids
    heights: np.ndarray  # (n_leaves-1,) float64, non-decreasing
    linkage: str = "average"
    sample: BinSample | None = None

    def __post_init__(self):
        if self.n_leaves < 1:
            raise ValueError("dendrogram needs at least one leaf")
        if len(self.merges) != self.n_leaves - 1 or len(self.heights) != self.n_leaves - 1:
            raise ValueError("merge list must have exactly n_leaves-1 entries")

    @property
    def n_nodes(self) -> int:
        return 2 * self.n_leaves - 1

    @property
    def root(self) -> int:
        return self.n_nodes - 1

    def children(self, node: int) -> tuple[int, int]:
        if node < self.n_leaves:
            raise ValueError(f"node {node} is a leaf")
        left, right = self.merges[node - self.n_leaves]
        return int(left), int(right)

    def leaves_under(self, node: int) -> np.ndarray:
        """All leaf ids in the subtree of `node`, ascending."""
        out = []
        stack = [int(node)]
        while stack:
            cur = stack.pop()
            if cur < self.n_leaves:
                out.append(cur)
            else:
                stack.extend(self.merges[cur - self.n_leaves])
        return np.array(sorted(out), dtype=np.int64)

    def node_height(self, node: int) -> float:
        return 0.0 if node < self.n_leaves else float(self.heights[node - self.n_leaves])

    def to_json_dict(self) -> dict:
        return {
            "n_leaves": int(self.n_leaves),
            "linkage": self.linkage,
            "merges": [
                [int(l), int(r), float(h)]
                for (l, r), h in zip(self.merges, self.heights)
            ],
        }

    @classmethod
    def from_json_dict(cls, payload: dict, sample: BinSample | None = None) -> "Dendrogram":
        merges = np.array([[m[0], m[1]] for m in payload["merges"]], dtype=np.int64)
        heights = np.array([m[2] for m in payload["merges"]], dtype=np.float64)
        if len(merges) == 0:
            merges = merges.reshape(0, 2)
        return cls(
            n_leaves=int(payload["n_leaves"]),
            merges=merges,
            heights=heights,
            linkage=payload.get("linkage", "average"),
            sample=sample,
        )


@dataclass(frozen=True)
class Clustering:
    """A flat partition of the dendrogram's leaves.

    `nodes[c]` is the dendrogram node whose subtree is cluster c; indices
    are ordered by decreasing cluster size, ties by smallest leaf id.
    """

    assignment: np.ndarray  # (n_leaves,) int64 cluster index per leaf
    k: int
    nodes: tuple[int, ...]
    sizes: tuple[int, ...] = field(default=())

    def members(self, cluster_id: int) -> np.ndarray:
        return np.flatnonzero(self.assignment == cluster_id)


def build_dendrogram(
    dmat: np.ndarray, sample: BinSample | None = None, *, copy: bool = True
) -> Dendrogram:
    """Cluster a symmetric distance matrix bottom-up with average linkage.

    With copy=False the caller cedes `dmat`: it is scribbled over during
    the merge loop. Worth it when the matrix is large and single-use.
    """
    check_square_matrix(dmat, "dmat")
    n = len(dmat)
    if n < 2:
        raise ValueError("need at least 2 leaves to build a dendrogram")

    if copy:
        d = np.array(dmat, dtype=np.float64)
    else:
        d = np.ascontiguousarray(dmat, dtype=np.float64)
    np.fill_diagonal(d, np.inf)
    active = np.ones(n, dtype=bool)
    node_of = np.arange(n, dtype=np.int64)
    size = np.ones(n, dtype=np.int64)
    row_min = d.min(axis=1)
    row_arg = d.argmin(axis=1)

    merges = np.empty((n - 1, 2), dtype=np.int64)
    heights = np.empty(n - 1, dtype=np.float64)
    n_active = n

    for step in range(n - 1):
        # compact the matrix once half the slots are dead: per-merge column
        # writes stride across the whole allocation, so shrinking it as the
        # forest collapses keeps the working set near cache size
        if n_active >= 256 and n_active * 2 <= len(d):
            act = np.flatnonzero(active)
            remap = np.full(len(d), -1, dtype=np.int64)
            remap[act] = np.arange(n_active)
            d = d[np.ix_(act, act)]
            node_of = node_of[act]
            size = size[act]
            row_min = row_min[act]
            row_arg = remap[row_arg[act]]
            active = np.ones(n_active, dtype=bool)

        act = np.flatnonzero(active)
        gmin = row_min[act].min()
        # every endpoint of a tied pair has row_min == gmin, so the smallest
        # participating node id is the first element of the best pair
        tied = act[row_min[act] == gmin]
        i = tied[np.argmin(node_of[tied])]
        partners = np.flatnonzero(active & (d[i] == gmin))
        j = partners[np.argmin(node_of[partners])]

        a, b = sorted((int(node_of[i]), int(node_of[j])))
        merges[step] = (a, b)
        heights[step] = gmin

        # merge j into i: unweighted average of leaf-pair distances
        new_row = (size[i] * d[i] + size[j] * d[j]) / (size[i] + size[j])
        new_row[i] = np.inf
        new_row[j] = np.inf
        new_row[~active] = np.inf
        d[i, :] = new_row
        d[:, i] = new_row
        d[j, :] = np.inf
        d[:, j] = np.inf
        active[j] = False
        n_active -= 1
        size[i] += size[j]
        node_of[i] = n + step
        row_min[j] = np.inf

        if step == n - 2:
            break
        row_min[i] = new_row.min()
        row_arg[i] = new_row.argmin()
        # rows whose cached nearest neighbour was i or j must be rescanned;
        # reducibility guarantees no other cache entry can improve
        stale = np.flatnonzero(active & ((row_arg == i) | (row_arg == j)))
        stale = stale[stale != i]
        if len(stale):
            # the merged column cannot drop below the old row minimum, so
            # equality means the cache is still exact; this keeps heavily
            # tied matrices (many identical distances) out of full rescans
            merged = new_row[stale]
            fresh = merged <= row_min[stale]
            row_arg[stale[fresh]] = i
            stale = stale[~fresh]
        if len(stale):
            sub = d[stale]
            args = sub.argmin(axis=1)
            row_arg[stale] = args
            row_min[stale] = sub[np.arange(len(stale)), args]

    return Dendrogram(n_leaves=n, merges=merges, heights=heights, sample=sample)


def _roots_after_undo(dendro: Dendrogram, n_undone: int) -> list[int]:
    """Forest roots once the `n_undone` highest (latest) merges are removed."""
    n = dendro.n_leaves
    if n == 1:
        return [0]
    first_undone = n + (n - 1 - n_undone)
    roots = []
    stack = [dendro.root]
    while stack:
        node = stack.pop()
        if node >= first_undone:
            stack.extend(dendro.children(node))
        else:
            roots.append(node)
    return roots


def _partition_from_nodes(dendro: Dendrogram, nodes: list[int]) -> Clustering:
    groups = [(node, dendro.leaves_under(node)) for node in nodes]
    # stable output order: big clusters first, then earliest leaf
    groups.sort(key=lambda item: (-len(item[1]), int(item[1][0])))
    assignment = np.full(dendro.n_leaves, -1, dtype=np.int64)
    for idx, (_, leaves) in enumerate(groups):
        assignment[leaves] = idx
    if (assignment < 0).any():
        raise ValueError("nodes do not cover every leaf")
    return Clustering(
        assignment=assignment,
        k=len(groups),
        nodes=tuple(int(node) for node, _ in groups),
        sizes=tuple(len(leaves) for _, leaves in groups),
    )


def cut_to_k(dendro: Dendrogram, k: int) -> Clustering:
    """Flat clustering with k clusters: undo the k-1 highest merges."""
    if not 1 <= k <= dendro.n_leaves:
        raise ValueError(f"k must be in [1, {dendro.n_leaves}], got {k}")
    return _partition_from_nodes(dendro, _roots_after_undo(dendro, k - 1))


def split_cluster(clustering: Clustering, dendro: Dendrogram, cluster_id: int) -> Clustering:
    """Replace one cluster by its two dendrogram children."""
    if not 0 <= cluster_id < clustering.k:
        raise ValueError(f"no cluster {cluster_id}")
    node = clustering.nodes[cluster_id]
    if node < dendro.n_leaves:
        raise ValueError("cannot split a single-bin cluster")
    left, right = dendro.children(node)
    new_nodes = [m for m in clustering.nodes if m != node] + [left, right]
    return _partition_from_nodes(dendro, new_nodes)
