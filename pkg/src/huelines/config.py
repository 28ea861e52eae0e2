"""Pipeline configuration: one flat record of every user-facing knob.

A config fully determines a batch run on a given dataset. Grid size and
log scaling default by data kind (wide time-series panels vs square
trajectory maps) and are resolved against the parsed LineSet, so the
stored form keeps `None` for "decide from the data".
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, replace
from typing import TextIO

from .hue import TEMPLATE_NAMES
from .model import LineKind
from .validation import check_metric

_TS_BINS = (512, 256)
_TRAJ_BINS = (512, 512)


@dataclass(frozen=True)
class PipelineConfig:
    width: int | None = None
    height: int | None = None
    radius: float = 1.0
    min_density: int = 2
    max_samples: int = 5000
    metric: str = "overlap"
    k: int = 3
    seed: int = 0
    l_hi: float = 95.0
    l_lo: float = 30.0
    c_lo: float = 8.0
    c_hi: float = 70.0
    log_scale: bool | None = None
    template: str = "N"
    scale: int = 1
    out_dir: str = "out"

    def __post_init__(self):
        for name in ("width", "height"):
            v = getattr(self, name)
            if v is not None and (int(v) != v or v < 1):
                raise ValueError(f"{name} must be a positive integer")
        if not self.radius > 0:
            raise ValueError("radius must be positive")
        if int(self.min_density) != self.min_density or self.min_density < 0:
            raise ValueError("min_density must be a non-negative integer")
        if int(self.max_samples) != self.max_samples or self.max_samples < 2:
            raise ValueError("max_samples must be an integer >= 2")
        check_metric(self.metric)
        if int(self.k) != self.k or self.k < 1:
            raise ValueError("k must be a positive integer")
        if int(self.seed) != self.seed:
            raise ValueError("seed must be an integer")
        if not 0.0 <= self.l_lo < self.l_hi <= 100.0:
            raise ValueError("luminance ramp needs 0 <= l_lo < l_hi <= 100")
        if not 0.0 <= self.c_lo <= self.c_hi:
            raise ValueError("chroma ramp needs 0 <= c_lo <= c_hi")
        if self.template not in TEMPLATE_NAMES:
            raise ValueError(
                f"unknown template {self.template!r}; choose from {', '.join(TEMPLATE_NAMES)}")
        if int(self.scale) != self.scale or self.scale < 1:
            raise ValueError("scale must be a positive integer")

    def resolve(self, kind: LineKind) -> "PipelineConfig":
        """Fill kind-dependent defaults; the result has no None fields."""
        w, h = (_TS_BINS if kind == LineKind.TIMESERIES else _TRAJ_BINS)
        log = kind == LineKind.TRAJECTORY
        return replace(
            self,
            width=self.width if self.width is not None else w,
            height=self.height if self.height is not None else h,
            log_scale=self.log_scale if self.log_scale is not None else log,
        )

    def to_json_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json_dict(cls, payload: dict) -> "PipelineConfig":
        if not isinstance(payload, dict):
            raise ValueError("config payload must be a JSON object")
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(payload) - known
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(sorted(unknown))}")
        return cls(**payload)


def save_config(config: PipelineConfig, target: str | TextIO) -> None:
    own = isinstance(target, str)
    fh = open(target, "w") if own else target
    try:
        json.dump(config.to_json_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    finally:
        if own:
            fh.close()


def load_config(source: str | TextIO) -> PipelineConfig:
    own = isinstance(source, str)
    fh = open(source) if own else source
    try:
        return PipelineConfig.from_json_dict(json.load(fh))
    finally:
        if own:
            fh.close()
