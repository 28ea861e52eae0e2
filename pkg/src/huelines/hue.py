"""Circular MDS: place cluster mean vectors on the hue circle.

Targets are the pairwise Euclidean distances between mean vectors,
scaled so the largest lands at pi (the longest realizable arc). The
stress of a configuration theta is

    S = sqrt( sum_{i<j} (delta_ij - d_ij)^2 / sum_{i<j} d_ij^2 )

with d the wrapped arc distance. Descent uses the closed-form gradient:
writing A and B for the stress numerator and denominator sums and
g_kj = sign(wrap(theta_k - theta_j)) for the arc-distance derivative,

    dA/dtheta_k = -2 sum_j (delta_kj - d_kj) g_kj
    dB/dtheta_k =  2 sum_j d_kj g_kj
    dS/dtheta_k = (A'B - AB') / (2 S B^2)

Pairs sitting exactly at the kinks (d of 0 or pi) contribute a zero
sub-gradient. Pinned angles never move; template sectors are enforced
by projecting after every accepted step.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .assignment import MeanVector

TWO_PI = 2.0 * math.pi

# sector layouts at rotation zero: (center, width) in degrees
TEMPLATE_SECTORS = {
    "i": ((0.0, 18.0),),
    "V": ((0.0, 93.6),),
    "L": ((0.0, 18.0), (90.0, 79.2)),
    "I": ((0.0, 18.0), (180.0, 18.0)),
    "T": ((0.0, 180.0),),
    "Y": ((0.0, 93.6), (180.0, 18.0)),
    "X": ((0.0, 93.6), (180.0, 93.6)),
    "N": (),
}
TEMPLATE_NAMES = tuple(TEMPLATE_SECTORS)


def arc_distance(theta_i: float, theta_j: float) -> float:
    """Shortest angular distance between two angles, in [0, pi]."""
    w = math.fmod(abs(theta_i - theta_j), TWO_PI)
    return w if w <= math.pi else TWO_PI - w


def _pairwise_arc(theta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Signed wrapped differences and their absolute arc distances."""
    diff = theta[:, None] - theta[None, :]
    w = np.mod(diff + np.pi, TWO_PI) - np.pi
    return w, np.abs(w)


@dataclass(frozen=True)
class SectorSet:
    """A union of angular sectors; empty means the whole circle is allowed."""

    sectors: tuple[tuple[float, float], ...]  # (center, width) in radians

    def contains(self, angle: float) -> bool:
        if not self.sectors:
            return True
        return any(arc_distance(angle, c) <= w / 2 + 1e-12 for c, w in self.sectors)

    def project(self, angle: float) -> float:
        """Nearest point of the union by arc distance; identity when inside."""
        if not self.sectors:
            return angle
        best = None
        for c, w in self.sectors:
            gap = arc_distance(angle, c) - w / 2
            if gap <= 0:
                return angle
            lo, hi = (c - w / 2) % TWO_PI, (c + w / 2) % TWO_PI
            for endpoint in (lo, hi):
                d = arc_distance(angle, endpoint)
                if best is None or d < best[0]:
                    best = (d, endpoint)
        return best[1]

    def rotated(self, rotation: float) -> "SectorSet":
        return SectorSet(tuple(((c + rotation) % TWO_PI, w) for c, w in self.sectors))


def template_sectors(name: str, rotation: float = 0.0) -> SectorSet:
    if name not in TEMPLATE_SECTORS:
        raise ValueError(f"unknown template {name!r}; choose from {', '.join(TEMPLATE_NAMES)}")
    base = tuple(
        (math.radians(c), math.radians(w)) for c, w in TEMPLATE_SECTORS[name]
    )
    return SectorSet(base).rotated(rotation)


@dataclass(frozen=True)
class HueProblem:
    delta: np.ndarray  # (k, k) target arc distances in [0, pi]
    fixed: dict[int, float] = field(default_factory=dict)
    template: SectorSet | None = None

    def __post_init__(self):
        d = np.asarray(self.delta, dtype=np.float64)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise ValueError("delta must be square")
        if not np.allclose(d, d.T, atol=1e-12) or np.abs(np.diagonal(d)).max(initial=0) > 1e-12:
            raise ValueError("delta must be symmetric with a zero diagonal")
        if d.size and (d.min() < -1e-12 or d.max() > math.pi + 1e-9):
            raise ValueError("delta entries must lie in [0, pi]")
        for idx, pin in self.fixed.items():
            if not 0 <= idx < d.shape[0]:
                raise ValueError(f"pinned cluster {idx} out of range")
            if not 0.0 <= pin < TWO_PI:
                raise ValueError("pinned angles must be normalized to [0, 2*pi)")

    @property
    def k(self) -> int:
        return self.delta.shape[0]


@dataclass(frozen=True)
class HueAssignment:
    theta: np.ndarray  # (k,) angles in [0, 2*pi)
    stress: float

    def degrees(self) -> np.ndarray:
        return np.degrees(self.theta)

    def to_json_dict(self) -> dict:
        return {str(i): float(d) for i, d in enumerate(self.degrees())}


def target_arc_distances(means: list[MeanVector]) -> np.ndarray:
    """Pairwise Euclidean distances between mean vectors, scaled onto [0, pi]."""
    k = len(means)
    if k < 2:
        raise ValueError("need at least 2 clusters for target distances")
    eu = np.zeros((k, k))
    for a in range(k):
        for b in range(a + 1, k):
            ids = np.union1d(means[a].ids, means[b].ids)
            va = np.zeros(len(ids))
            vb = np.zeros(len(ids))
            pa = np.searchsorted(ids, means[a].ids)
            pb = np.searchsorted(ids, means[b].ids)
            va[pa] = means[a].values
            vb[pb] = means[b].values
            eu[a, b] = eu[b, a] = float(np.linalg.norm(va - vb))
    top = eu.max()
    if top == 0.0:
        warnings.warn("all cluster means identical; every target distance is zero")
        return np.zeros((k, k))
    return math.pi * eu / top


def circular_stress(theta, delta) -> float:
    """Normalized residual between target and realized arc distances."""
    theta = np.asarray(theta, dtype=np.float64)
    delta = np.asarray(delta, dtype=np.float64)
    _, d = _pairwise_arc(theta)
    iu = np.triu_indices(len(theta), 1)
    den = float((d[iu] ** 2).sum())
    if den == 0.0:
        if float((delta[iu] ** 2).sum()) == 0.0:
            return 0.0
        warnings.warn("all angles coincide; stress undefined, returning inf")
        return math.inf
    num = float(((delta[iu] - d[iu]) ** 2).sum())
    return math.sqrt(num / den)


def stress_gradient(theta, delta) -> np.ndarray:
    """Closed-form dS/dtheta; zero sub-gradient at kinks and at perfect fit."""
    theta = np.asarray(theta, dtype=np.float64)
    delta = np.asarray(delta, dtype=np.float64)
    k = len(theta)
    w, d = _pairwise_arc(theta)
    iu = np.triu_indices(k, 1)
    a_sum = float(((delta[iu] - d[iu]) ** 2).sum())
    b_sum = float((d[iu] ** 2).sum())
    if b_sum == 0.0 or a_sum == 0.0:
        return np.zeros(k)
    g = np.sign(w)
    g[(d == 0.0) | (d == math.pi)] = 0.0
    a_prime = -2.0 * ((delta - d) * g).sum(axis=1)
    b_prime = 2.0 * (d * g).sum(axis=1)
    s = math.sqrt(a_sum / b_sum)
    return (a_prime * b_sum - a_sum * b_prime) / (2.0 * s * b_sum * b_sum)


def _project(theta, free_idx, sectors: SectorSet | None):
    out = theta.copy()
    for i in free_idx:
        angle = out[i] % TWO_PI
        if sectors is not None:
            angle = sectors.project(angle) % TWO_PI
        out[i] = angle
    return out


def _descend(theta0, problem: HueProblem, max_iters: int, tol: float):
    """One projected gradient-descent run; returns (theta, stress, history)."""
    free_idx = np.array(
        [i for i in range(problem.k) if i not in problem.fixed], dtype=np.int64
    )
    theta = _project(theta0, free_idx, problem.template)
    for i, pin in problem.fixed.items():
        theta[i] = pin
    s = circular_stress(theta, problem.delta)
    history = [s]
    if not len(free_idx) or not math.isfinite(s):
        return theta, s, history
    for _ in range(max_iters):
        g = stress_gradient(theta, problem.delta)
        mask = np.zeros(problem.k, dtype=bool)
        mask[free_idx] = True
        g = np.where(mask, g, 0.0)
        gnorm2 = float((g ** 2).sum())
        if gnorm2 == 0.0:
            break
        alpha, accepted = 1.0, None
        while alpha > 1e-14:
            cand = _project(theta - alpha * g, free_idx, problem.template)
            for i, pin in problem.fixed.items():
                cand[i] = pin
            s_cand = circular_stress(cand, problem.delta)
            if s_cand <= s - 1e-4 * alpha * gnorm2:
                accepted = (cand, s_cand)
                break
            alpha *= 0.5
        if accepted is None:
            break
        prev = s
        theta, s = accepted
        history.append(s)
        if abs(prev - s) < tol:
            break
    return theta, s, history


def optimize_hues(
    problem: HueProblem,
    seed: int = 0,
    restarts: int = 10,
    max_iters: int = 2000,
    tol: float = 1e-9,
) -> HueAssignment:
    """Best of `restarts` seeded descents; pins are honored bitwise."""
    if problem.k == 1:
        angle = problem.fixed.get(0, 0.0)
        if 0 not in problem.fixed and problem.template is not None:
            angle = problem.template.project(angle) % TWO_PI
        return HueAssignment(theta=np.array([angle]), stress=0.0)

    rng = np.random.default_rng(seed)
    best = None
    with warnings.catch_warnings():
        # a restart whose angles all collapse scores inf and is discarded;
        # the coincide warning only matters for single direct calls
        warnings.filterwarnings("ignore", message="all angles coincide")
        for r in range(restarts):
            theta0 = rng.uniform(0.0, TWO_PI, size=problem.k)
            theta, s, _ = _descend(theta0, problem, max_iters, tol)
            if best is None or s < best[1]:
                best = (theta, s)
    return HueAssignment(theta=best[0], stress=float(best[1]))


def fit_template_rotation(theta, name: str) -> tuple[SectorSet, float]:
    """Grid-search the one-degree rotation whose sectors need the least total
    projection movement for these angles; returns (sectors, rotation)."""
    if name not in TEMPLATE_SECTORS:
        raise ValueError(f"unknown template {name!r}; choose from {', '.join(TEMPLATE_NAMES)}")
    if not TEMPLATE_SECTORS[name]:
        return SectorSet(()), 0.0
    theta = np.asarray(theta, dtype=np.float64)
    best = None
    for deg in range(360):
        sectors = template_sectors(name, rotation=math.radians(deg))
        cost = sum(arc_distance(t, sectors.project(t % TWO_PI)) for t in theta)
        if best is None or cost < best[0] - 1e-15:
            best = (cost, sectors, math.radians(deg))
    return best[1], best[2]


def apply_harmonic_template(assignment: HueAssignment, template: str) -> HueAssignment:
    """Snap every angle to the best-rotated template sectors.

    Pin handling happens upstream: callers that need pinned clusters kept
    in place re-optimize afterwards with the fitted sectors and pins. The
    carried stress is the input one; re-optimization refreshes it.
    """
    sectors, _ = fit_template_rotation(assignment.theta, template)
    if not sectors.sectors:
        return assignment
    projected = np.array(
        [sectors.project(t % TWO_PI) % TWO_PI for t in assignment.theta]
    )
    return HueAssignment(theta=projected, stress=assignment.stress)
