"""End-to-end pipeline state and the interactive operations over it.

The expensive upstream work (extraction, threshold sampling, the distance
matrix, and the dendrogram) lives in `Preprocessed`. Everything downstream
(partition, mean vectors, bin and line assignment, hues) is a pure
function of that plus `InteractiveParams`, so interactive edits and a
fresh batch run with the same final parameters land on identical state.
All records are immutable; mutations return new snapshots.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .assignment import ClusterMap, LineAssignment, MeanVector, assign_bins, assign_lines, mean_vectors
from .clustering import Clustering, Dendrogram, build_dendrogram, cut_to_k, split_cluster
from .config import PipelineConfig
from .features import BinSample, DensityGrid, FeatureGrid, density_of, extract_feature_sets, sample_bins
from .hue import (
    HueAssignment,
    HueProblem,
    fit_template_rotation,
    optimize_hues,
    target_arc_distances,
)
from .model import GridSpec, LineSet, fit_grid
from .render import Ramp
from .similarity import distance_matrix


class StaleSampleError(RuntimeError):
    """Threshold change would alter the clustered bin sample; the cached
    dendrogram no longer describes it. Recover with `repreprocess`."""


class UnknownClusterError(KeyError):
    pass


class SingletonClusterError(RuntimeError):
    pass


@dataclass(frozen=True)
class InteractiveParams:
    """Everything a user can change without re-ingesting the dataset.

    `splits` records dendrogram node ids in the order they were split;
    `pins` maps partition node ids to fixed hue angles in degrees. Both
    key on node ids rather than cluster indices because indices reshuffle
    on every partition change.
    """

    min_density: int
    k: int
    metric: str
    log_scale: bool
    template: str = "N"
    splits: tuple[int, ...] = ()
    pins: tuple[tuple[int, float], ...] = ()


@dataclass(frozen=True)
class Preprocessed:
    ls: LineSet
    spec: GridSpec
    fg: FeatureGrid
    dg: DensityGrid
    sample: BinSample
    dendro: Dendrogram
    metric: str


@dataclass(frozen=True)
class PipelineState:
    pre: Preprocessed
    params: InteractiveParams
    config: PipelineConfig
    clustering: Clustering
    means: list[MeanVector]
    cmap: ClusterMap
    la: LineAssignment
    hues: HueAssignment

    @property
    def ramp(self) -> Ramp:
        c = self.config
        return Ramp(l_hi=c.l_hi, l_lo=c.l_lo, c_lo=c.c_lo, c_hi=c.c_hi)

    def hue_degrees(self) -> np.ndarray:
        """Per-cluster hue in degrees; pinned clusters report the pinned
        value itself, exact, rather than a radians round trip."""
        degs = self.hues.degrees().copy()
        by_node = dict(self.params.pins)
        for i, node in enumerate(self.clustering.nodes):
            if node in by_node:
                degs[i] = by_node[node]
        return degs


def preprocess(
    ls: LineSet, config: PipelineConfig, fg: FeatureGrid | None = None
) -> Preprocessed:
    """Run the expensive upstream stages once.

    Pass a cached `fg` (from the feature side-car) to skip extraction;
    it must have been built for the same dataset, grid, and radius.
    """
    cfg = config.resolve(ls.kind)
    spec = fit_grid(ls, cfg.width, cfg.height)
    if fg is None:
        fg = extract_feature_sets(ls, spec, radius=cfg.radius)
    elif fg.spec != spec or fg.n_lines != len(ls):
        raise ValueError("cached feature grid does not match the dataset")
    dg = density_of(fg)
    sample = sample_bins(fg, cfg.min_density, cfg.max_samples, cfg.seed)
    dmat = distance_matrix(sample, fg, cfg.metric)
    dendro = build_dendrogram(dmat, sample, copy=False)
    return Preprocessed(
        ls=ls, spec=spec, fg=fg, dg=dg, sample=sample, dendro=dendro, metric=cfg.metric)


def _clustering_for(pre: Preprocessed, k: int, splits: tuple[int, ...]) -> Clustering:
    cl = cut_to_k(pre.dendro, k)
    for node in splits:
        if node not in cl.nodes:
            raise ValueError(f"split target node {node} is not in the partition")
        cl = split_cluster(cl, pre.dendro, cl.nodes.index(node))
    return cl


def _hues_for(
    means: list[MeanVector],
    nodes: tuple[int, ...],
    pins: tuple[tuple[int, float], ...],
    template: str,
    seed: int,
) -> HueAssignment:
    by_node = dict(pins)
    fixed = {
        i: math.radians(by_node[node] % 360.0)
        for i, node in enumerate(nodes)
        if node in by_node
    }
    k = len(means)
    delta = target_arc_distances(means) if k >= 2 else np.zeros((1, 1))
    hues = optimize_hues(HueProblem(delta=delta, fixed=fixed), seed=seed)
    sectors, _ = fit_template_rotation(hues.theta, template)
    if sectors.sectors:
        hues = optimize_hues(
            HueProblem(delta=delta, fixed=fixed, template=sectors), seed=seed)
    return hues


def derive(pre: Preprocessed, params: InteractiveParams, config: PipelineConfig) -> PipelineState:
    """Compute all state downstream of the dendrogram."""
    cl = _clustering_for(pre, params.k, params.splits)
    means = mean_vectors(cl, pre.sample, pre.fg)
    cmap = assign_bins(pre.fg, means, params.min_density)
    la = assign_lines(pre.ls, cmap, pre.fg, pre.dg)
    hues = _hues_for(means, cl.nodes, params.pins, params.template, pre.sample.seed)
    return PipelineState(
        pre=pre, params=params, config=config, clustering=cl,
        means=means, cmap=cmap, la=la, hues=hues)


def params_from_config(config: PipelineConfig, kind) -> InteractiveParams:
    cfg = config.resolve(kind)
    return InteractiveParams(
        min_density=cfg.min_density, k=cfg.k, metric=cfg.metric,
        log_scale=cfg.log_scale, template=cfg.template)


def run_pipeline(
    ls: LineSet,
    config: PipelineConfig,
    *,
    splits: tuple[int, ...] = (),
    pins: tuple[tuple[int, float], ...] = (),
) -> PipelineState:
    """One batch run. `splits`/`pins` replay interactive edits on top."""
    pre = preprocess(ls, config)
    params = replace(params_from_config(config, ls.kind), splits=splits, pins=pins)
    return derive(pre, params, config)


def set_params(
    state: PipelineState,
    *,
    min_density: int | None = None,
    k: int | None = None,
    metric: str | None = None,
    log_scale: bool | None = None,
) -> PipelineState:
    """Apply parameter edits, recomputing only what they invalidate.

    A metric change rebuilds the dendrogram from the cached sample; a k
    change recuts it; both reset splits. A threshold change must leave
    the sampled bin set untouched, else StaleSampleError asks for a full
    re-preprocess. No-ops return `state` itself.
    """
    pre, params = state.pre, state.params
    heavy = light = False

    if metric is not None and metric != params.metric:
        dmat = distance_matrix(pre.sample, pre.fg, metric)
        dendro = build_dendrogram(dmat, pre.sample, copy=False)
        pre = replace(pre, dendro=dendro, metric=metric)
        params = replace(params, metric=metric, splits=())
        heavy = True
    if k is not None and k != params.k:
        if k < 1 or k > len(pre.sample):
            raise ValueError(f"k must be in [1, {len(pre.sample)}]")
        params = replace(params, k=k, splits=())
        heavy = True
    if min_density is not None and min_density != params.min_density:
        if min_density < 0:
            raise ValueError("min_density must be non-negative")
        new_sample = sample_bins(
            pre.fg, min_density, pre.sample.max_samples, pre.sample.seed)
        if not np.array_equal(new_sample.bin_indices, pre.sample.bin_indices):
            raise StaleSampleError(
                "threshold changes the clustered bin sample; re-preprocess required")
        pre = replace(pre, sample=new_sample)
        params = replace(params, min_density=min_density)
        heavy = True
    if log_scale is not None and log_scale != params.log_scale:
        params = replace(params, log_scale=log_scale)
        light = True

    if heavy:
        return derive(pre, params, state.config)
    if light:
        return replace(state, params=params)
    return state


def repreprocess(state: PipelineState, min_density: int) -> PipelineState:
    """Rebuild sample and dendrogram at a new threshold.

    Splits and pins reset: they key on node ids of the old dendrogram.
    """
    if min_density < 0:
        raise ValueError("min_density must be non-negative")
    pre = state.pre
    sample = sample_bins(
        pre.fg, min_density, pre.sample.max_samples, pre.sample.seed)
    if state.params.k > len(sample):
        raise ValueError(f"k must be in [1, {len(sample)}]")
    dmat = distance_matrix(sample, pre.fg, pre.metric)
    dendro = build_dendrogram(dmat, sample, copy=False)
    pre = replace(pre, sample=sample, dendro=dendro)
    params = replace(
        state.params, min_density=min_density, splits=(), pins=())
    return derive(pre, params, state.config)


def split(state: PipelineState, cluster_id: int) -> PipelineState:
    cl = state.clustering
    if not 0 <= cluster_id < cl.k:
        raise UnknownClusterError(cluster_id)
    if int((cl.assignment == cluster_id).sum()) < 2:
        raise SingletonClusterError(
            f"cluster {cluster_id} is a single bin and cannot be split")
    node = cl.nodes[cluster_id]
    # a pinned hue belongs to the cluster it was set on; its halves start fresh
    params = replace(
        state.params,
        splits=state.params.splits + (node,),
        pins=tuple((n, d) for n, d in state.params.pins if n != node),
    )
    return derive(state.pre, params, state.config)


def set_hue(
    state: PipelineState, cluster_id: int, degrees: float, pinned: bool = True
) -> PipelineState:
    """Pin one cluster's hue (normalized to [0, 360)) or release the pin;
    unpinned clusters re-optimize around the constraint."""
    cl = state.clustering
    if not 0 <= cluster_id < cl.k:
        raise UnknownClusterError(cluster_id)
    node = cl.nodes[cluster_id]
    pins = {n: d for n, d in state.params.pins if n != node}
    if pinned:
        pins[node] = float(degrees) % 360.0
    new_pins = tuple(sorted(pins.items()))
    if new_pins == state.params.pins:
        return state
    params = replace(state.params, pins=new_pins)
    hues = _hues_for(
        state.means, cl.nodes, params.pins, params.template, state.pre.sample.seed)
    return replace(state, params=params, hues=hues)


def set_template(state: PipelineState, name: str) -> PipelineState:
    from .hue import TEMPLATE_NAMES

    if name not in TEMPLATE_NAMES:
        raise ValueError(
            f"unknown template {name!r}; choose from {', '.join(TEMPLATE_NAMES)}")
    if name == state.params.template:
        return state
    params = replace(state.params, template=name)
    hues = _hues_for(
        state.means, state.clustering.nodes, params.pins, name,
        state.pre.sample.seed)
    return replace(state, params=params, hues=hues)
