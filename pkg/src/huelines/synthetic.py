"""Seeded generators for the three ambiguity archetypes.

Each generator builds polyline bundles whose combined density plot is
visually ambiguous while the per-line ground truth stays known: an
illusory central band, an ambiguous crossing/touching pair, and two
disconnected dense regions.  Geometry is piecewise linear with small
per-vertex jitter; coordinates live in the unit square.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .model import LineKind, LineSet, Polyline

NOISE_LABEL = 2

_N_VERTICES = 32

# band half-thickness and wander amplitude, as fractions of plot height.
# lane + wander spread is kept under half a bin at a 256-row grid, so
# every bin along a band sees the full bundle; bins in the fan then hold
# strict subsets of the band bins, which is the coherence signal the
# overlap coefficient keys on
_BAND = 0.001
_WANDER = 0.0008

# maximum vertical fan offset at fanout=1
_FAN_SPAN = 0.42


@dataclass(frozen=True)
class LabeledLineSet:
    """A generated line set plus per-line pattern labels."""

    lineset: LineSet
    labels: np.ndarray
    params: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64)
        object.__setattr__(self, "labels", labels)
        if len(labels) != len(self.lineset):
            raise ValueError("labels must cover every line")
        present = np.unique(labels)
        if len(present) and not np.array_equal(present, np.arange(len(present))):
            raise ValueError("labels must be dense starting at 0")

    def label_counts(self) -> np.ndarray:
        return np.bincount(self.labels)


def _bounded_walk(rng: np.random.Generator, n: int, amplitude: float,
                  step: float) -> np.ndarray:
    """Random walk reflected into [-amplitude, amplitude]."""
    if amplitude <= 0:
        return np.zeros(n)
    walk = np.cumsum(rng.normal(0.0, step, size=n))
    # fold the real line into the band, preserving continuity
    period = 4.0 * amplitude
    y = np.mod(walk + amplitude, period)
    return np.where(y > 2.0 * amplitude, period - y, y) - amplitude


def _bridge(rng: np.random.Generator, n: int, amplitude: float,
            step: float) -> np.ndarray:
    """Bounded walk pinned to zero at both ends."""
    if amplitude <= 0 or n < 3:
        return np.zeros(n)
    walk = np.concatenate([[0.0], np.cumsum(rng.normal(0.0, step, size=n - 1))])
    walk -= np.linspace(0.0, walk[-1], n)
    return np.clip(walk, -amplitude, amplitude)


def _fan_offsets(rng: np.random.Generator, n: int, span: float) -> np.ndarray:
    """Signed fan targets with a floor on |offset| so the fan opens hollow."""
    sign = rng.choice([-1.0, 1.0], size=n)
    mag = span * (0.25 + 0.75 * rng.random(n))
    return sign * mag


def _make_lineset(vertex_arrays, kind=LineKind.TRAJECTORY) -> LineSet:
    lines = [Polyline(i, v) for i, v in enumerate(vertex_arrays)]
    return LineSet.from_lines(lines, kind=kind)


def gen_illusory(n_pattern: int = 400, n_noise: int = 100,
                 fanout: float = 0.5, seed: int = 0, *,
                 n_vertices: int = _N_VERTICES) -> LabeledLineSet:
    """Two mirrored half-patterns forming an illusory central band.

    Each half enters horizontally from one side as a tight band and fans
    out past the center with vertical spread proportional to ``fanout``.
    The union reads as one continuous dense horizontal trend even though
    no single bundle spans the plot.  Labels: 0 and 1 for the halves,
    2 for uniform background noise.
    """
    if n_pattern % 2 != 0:
        raise ValueError("n_pattern must be even")
    if not 0.0 <= fanout <= 1.0:
        raise ValueError("fanout must be in [0, 1]")
    rng = np.random.default_rng(seed)
    half = n_pattern // 2
    x = np.linspace(0.0, 1.0, n_vertices)
    ramp_right = np.sqrt(np.clip((x - 0.5) / 0.5, 0.0, 1.0))
    ramp_left = ramp_right[::-1]

    arrays = []
    for ramp in (ramp_right, ramp_left):
        offs = rng.uniform(-_BAND, _BAND, size=half)
        fans = _fan_offsets(rng, half, _FAN_SPAN * fanout)
        for i in range(half):
            w = _bounded_walk(rng, n_vertices, _WANDER, _WANDER * 0.5)
            y = 0.5 + offs[i] + w + fans[i] * ramp
            arrays.append(np.column_stack([x, y]))

    # noise as short strokes, one per horizontal lane: a bin can collect at
    # most two adjacent lanes, so background density never reaches a
    # threshold of 3 and noise bins drop out of the clustering sample the
    # way density thresholding is meant to remove them; noise blobs that
    # survive would be fully disjoint from the patterns and would steal
    # the top dendrogram merge at distance 1
    if n_noise:
        lane = 0.90 / n_noise
        y0 = 0.05 + lane * (np.arange(n_noise) + 0.5)
        x0 = rng.uniform(0.0, 0.75, size=n_noise)
        span = rng.uniform(0.10, 0.25, size=n_noise)
        for i in range(n_noise):
            xs = x0[i] + np.linspace(0.0, span[i], n_vertices)
            w = _bounded_walk(rng, n_vertices, 0.25 * lane, 0.1 * lane)
            y = np.clip(y0[i] + w, 0.02, 0.98)
            arrays.append(np.column_stack([xs, y]))

    labels = np.concatenate([
        np.zeros(half, dtype=np.int64),
        np.ones(half, dtype=np.int64),
        np.full(n_noise, NOISE_LABEL, dtype=np.int64),
    ])
    params = {"n_pattern": n_pattern, "n_noise": n_noise, "fanout": fanout,
              "n_vertices": n_vertices}
    return LabeledLineSet(_make_lineset(arrays), labels, params, seed)


def _continuation_arms(rng: np.random.Generator, n: int, n_vertices: int):
    """Per-line geometry for the four diagonal arms of the X figure.

    Arms share an exact center point per line index, so any pairing of a
    left arm with a right arm is continuous.  Draw order is fixed and
    mode-independent: both modes consume identical random state, which
    keeps their density plots bin-for-bin equal.
    """
    n_half = n_vertices // 2
    x_left = np.linspace(0.0, 0.5, n_half)
    x_right = np.linspace(0.5, 1.0, n_vertices - n_half + 1)[1:]
    spread = 0.012

    center = rng.uniform(-spread, spread, size=n)
    ends = {a: rng.uniform(-spread, spread, size=n)
            for a in ("low_left", "high_left", "low_right", "high_right")}

    t_left = x_left / 0.5
    t_right = (x_right - 0.5) / 0.5

    def arm(end_y, end_off, t, i):
        # t is distance from the center: 0 -> exact shared center point
        w = _bridge(rng, len(t), _WANDER, _WANDER * 0.5)
        return (0.5 + center[i]) * (1.0 - t) + (end_y + end_off[i]) * t + w

    # consume RNG in a fixed order: for each line, all four arms
    arms = {"A": [], "C": [], "B": [], "D": []}
    for i in range(n):
        ya = arm(0.2, ends["low_left"], t_left[::-1], i)
        yc = arm(0.8, ends["high_left"], t_left[::-1], i)
        yb = arm(0.8, ends["high_right"], t_right, i)
        yd = arm(0.2, ends["low_right"], t_right, i)
        arms["A"].append(ya)
        arms["C"].append(yc)
        arms["B"].append(yb)
        arms["D"].append(yd)
    return x_left, x_right, arms


def gen_continuation(n_per_trend: int = 200,
                     mode: Literal["crossing", "touching"] = "crossing",
                     seed: int = 0, *,
                     n_vertices: int = _N_VERTICES) -> LabeledLineSet:
    """Two bundles whose continuation past the center is ambiguous.

    crossing: two straight diagonal bundles forming an X.
    touching: a peak bundle and a valley bundle meeting at the center.
    Both modes are built from the same four arm geometries, differing
    only in how arms pair into lines, so their density plots coincide.
    """
    if n_per_trend < 1:
        raise ValueError("n_per_trend must be >= 1")
    if mode not in ("crossing", "touching"):
        raise ValueError(f"unknown mode {mode!r}")
    rng = np.random.default_rng(seed)
    x_left, x_right, arms = _continuation_arms(rng, n_per_trend, n_vertices)
    x = np.concatenate([x_left, x_right])

    pair0, pair1 = (("A", "B"), ("C", "D")) if mode == "crossing" \
        else (("A", "D"), ("C", "B"))

    arrays = []
    for left, right in (pair0, pair1):
        for i in range(n_per_trend):
            y = np.concatenate([arms[left][i], arms[right][i]])
            arrays.append(np.column_stack([x, y]))

    labels = np.repeat(np.array([0, 1], dtype=np.int64), n_per_trend)
    params = {"n_per_trend": n_per_trend, "mode": mode,
              "n_vertices": n_vertices}
    return LabeledLineSet(_make_lineset(arrays), labels, params, seed)


def gen_disconnected(n_per_trend: int = 200, separation: float = 0.5,
                     seed: int = 0, *,
                     n_vertices: int = _N_VERTICES) -> LabeledLineSet:
    """Two independent bundles, each dense on one side, fanning on the other.

    The dense extents sit on a common horizontal midline; ``separation``
    stretches them toward the center, so at 1.0 the two dense regions
    nearly touch and the plot resembles one continuous trend.
    """
    if n_per_trend < 1:
        raise ValueError("n_per_trend must be >= 1")
    if not 0.0 <= separation <= 1.0:
        raise ValueError("separation must be in [0, 1]")
    rng = np.random.default_rng(seed)
    extent = 0.15 + 0.35 * separation
    x = np.linspace(0.0, 1.0, n_vertices)
    ramp_right = np.sqrt(np.clip((x - extent) / (1.0 - extent), 0.0, 1.0))
    ramp_left = ramp_right[::-1]

    arrays = []
    for ramp in (ramp_right, ramp_left):
        offs = rng.uniform(-_BAND, _BAND, size=n_per_trend)
        fans = _fan_offsets(rng, n_per_trend, _FAN_SPAN)
        for i in range(n_per_trend):
            w = _bounded_walk(rng, n_vertices, _WANDER, _WANDER * 0.5)
            y = 0.5 + offs[i] + w + fans[i] * ramp
            arrays.append(np.column_stack([x, y]))

    labels = np.repeat(np.array([0, 1], dtype=np.int64), n_per_trend)
    params = {"n_per_trend": n_per_trend, "separation": separation,
              "n_vertices": n_vertices}
    return LabeledLineSet(_make_lineset(arrays), labels, params, seed)
