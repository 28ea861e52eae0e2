"""Estimator-style facade over the pipeline.

Follows the fit/predict convention: construct with keyword parameters,
`fit` a line set, read trailing-underscore attributes, steer the fitted
result with `split`, `set_hue`, and `set_template`. Parameter edits on a
fitted instance apply incrementally where the pipeline allows it.
"""

from __future__ import annotations

import numpy as np

from . import pipeline
from .assignment import assign_lines, write_line_assignment_csv
from .config import PipelineConfig
from .features import extract_feature_sets
from .model import LineSet
from .render import Image, legend_dict, render_cluster_lines, render_density


class NotFittedError(RuntimeError):
    pass


# parameters that feed preprocessing; changing one discards the fit
_REFIT_PARAMS = frozenset(
    {"width", "height", "radius", "max_samples", "seed",
     "l_hi", "l_lo", "c_lo", "c_hi"})
# parameters the fitted pipeline can absorb in place
_LIVE_PARAMS = frozenset({"min_density", "k", "metric", "log_scale", "template"})

_PARAM_NAMES = (
    "width", "height", "radius", "min_density", "max_samples", "metric",
    "k", "seed", "l_hi", "l_lo", "c_lo", "c_hi", "log_scale", "template",
    "scale",
)


class LineDensityClusterer:
    """Cluster dense line bundles and assign them distinct hues.

    Parameters mirror `PipelineConfig`; see there for ranges and
    defaults. Construction stores them verbatim, `fit` validates.
    """

    def __init__(
        self,
        *,
        width: int | None = None,
        height: int | None = None,
        radius: float = 1.0,
        min_density: int = 2,
        max_samples: int = 5000,
        metric: str = "overlap",
        k: int = 3,
        seed: int = 0,
        l_hi: float = 95.0,
        l_lo: float = 30.0,
        c_lo: float = 8.0,
        c_hi: float = 70.0,
        log_scale: bool | None = None,
        template: str = "N",
        scale: int = 1,
    ):
        self.width = width
        self.height = height
        self.radius = radius
        self.min_density = min_density
        self.max_samples = max_samples
        self.metric = metric
        self.k = k
        self.seed = seed
        self.l_hi = l_hi
        self.l_lo = l_lo
        self.c_lo = c_lo
        self.c_hi = c_hi
        self.log_scale = log_scale
        self.template = template
        self.scale = scale

    # -- parameter plumbing -------------------------------------------------

    def get_params(self, deep: bool = True) -> dict:
        return {name: getattr(self, name) for name in _PARAM_NAMES}

    def set_params(self, **params) -> "LineDensityClusterer":
        """Update parameters; returns self.

        On a fitted instance, sample-preserving edits (k, metric,
        log_scale, template, and threshold moves that keep the same bin
        sample) update the fitted state in place. A threshold move that
        would change the sample raises StaleSampleError with the
        parameter left untouched; call `reprocess` to apply it the
        expensive way. Any preprocessing parameter discards the fit.
        """
        unknown = set(params) - set(_PARAM_NAMES)
        if unknown:
            raise ValueError(f"unknown parameters: {sorted(unknown)}")

        fitted = hasattr(self, "state_")
        live = {n: v for n, v in params.items()
                if n in _LIVE_PARAMS and v is not None and v != getattr(self, n)}
        if fitted and live:
            state = self.state_
            template = live.pop("template", None)
            if live:
                state = pipeline.set_params(state, **live)
            if template is not None:
                state = pipeline.set_template(state, template)
            self._adopt(state)

        for name, value in params.items():
            setattr(self, name, value)

        if fitted and any(
            n in _REFIT_PARAMS and v != self.state_.config.to_json_dict().get(n)
            for n, v in params.items()
        ):
            del self.state_
            self._clear_fitted()
        return self

    def _config(self) -> PipelineConfig:
        return PipelineConfig(**{n: getattr(self, n) for n in _PARAM_NAMES})

    # -- fitting ------------------------------------------------------------

    def fit(self, ls: LineSet) -> "LineDensityClusterer":
        state = pipeline.run_pipeline(ls, self._config())
        self._adopt(state)
        return self

    def _adopt(self, state: pipeline.PipelineState) -> None:
        self.state_ = state
        self.labels_ = state.la.labels
        self.bin_labels_ = state.cmap.labels
        self.hue_degrees_ = state.hue_degrees()
        # keep live params in step with what the state actually holds
        p = state.params
        self.min_density = p.min_density
        self.k = p.k
        self.metric = p.metric
        self.log_scale = p.log_scale
        self.template = p.template

    def _clear_fitted(self) -> None:
        for name in ("labels_", "bin_labels_", "hue_degrees_"):
            if hasattr(self, name):
                delattr(self, name)

    def _require_fit(self) -> pipeline.PipelineState:
        if not hasattr(self, "state_"):
            raise NotFittedError("call fit() first")
        return self.state_

    # -- inference ----------------------------------------------------------

    def predict(self, ls: LineSet | None = None) -> np.ndarray:
        """Cluster label per line; -1 where no fitted cluster claims it.

        With no argument, returns the fitted labels. A new line set is
        rasterized onto the fitted grid and routed through the fitted
        partition and density field.
        """
        state = self._require_fit()
        if ls is None:
            return self.labels_
        fg = extract_feature_sets(ls, state.pre.spec, radius=state.pre.fg.radius)
        la = assign_lines(ls, state.cmap, fg, state.pre.dg)
        return la.labels

    # -- interactive steering -----------------------------------------------

    def split(self, cluster_id: int) -> "LineDensityClusterer":
        self._adopt(pipeline.split(self._require_fit(), cluster_id))
        return self

    def set_hue(
        self, cluster_id: int, degrees: float, pinned: bool = True
    ) -> "LineDensityClusterer":
        self._adopt(pipeline.set_hue(self._require_fit(), cluster_id, degrees, pinned))
        return self

    def set_template(self, name: str) -> "LineDensityClusterer":
        self._adopt(pipeline.set_template(self._require_fit(), name))
        return self

    def reprocess(self, min_density: int | None = None) -> "LineDensityClusterer":
        """Rebuild the bin sample and dendrogram at a new threshold.

        The recovery path for StaleSampleError; resets splits and pins.
        """
        state = self._require_fit()
        if min_density is None:
            min_density = state.params.min_density
        self._adopt(pipeline.repreprocess(state, min_density))
        return self

    # -- outputs ------------------------------------------------------------

    def render_image(self, scale: int | None = None) -> Image:
        state = self._require_fit()
        return render_density(
            state.pre.dg, state.cmap, state.hues,
            scale=self.scale if scale is None else scale,
            log_scale=state.params.log_scale, ramp=state.ramp)

    def cluster_image(self, cluster_id: int, scale: int | None = None) -> Image:
        state = self._require_fit()
        if not 0 <= cluster_id < state.clustering.k:
            raise pipeline.UnknownClusterError(cluster_id)
        return render_cluster_lines(
            state.pre.ls, state.la, cluster_id, state.pre.spec,
            hue=float(self.hue_degrees_[cluster_id]),
            scale=self.scale if scale is None else scale)

    def legend(self) -> dict:
        state = self._require_fit()
        return legend_dict(state.hues, state.la, degrees=self.hue_degrees_)

    def write_lines_csv(self, path: str) -> None:
        write_line_assignment_csv(self._require_fit().la, path)
