"""Rasterize densities, cluster labels, and hues into images.

Bins map to pixel blocks (nearest-neighbor upscale); the bin grid's y
axis points up, so bin row 0 lands at the bottom of the image. Colors
come from a single ramp: density drives luminance down and chroma up,
hue is constant per cluster, and below-threshold bins fall back to an
achromatic version of the same ramp.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import TextIO

import numpy as np
from PIL import Image as PILImage

from .assignment import ClusterMap, LineAssignment
from .colorspace import HclColor, hcl_to_display_array
from .features import DensityGrid, extract_feature_sets
from .hue import HueAssignment
from .model import GridSpec, LineKind, LineSet, Polyline

L_HI, L_LO = 95.0, 30.0
C_LO, C_HI = 8.0, 70.0
STROKE_RADIUS = 0.5  # bin units; a 1-bin-wide stroke


@dataclass(frozen=True)
class Ramp:
    """Endpoints of the shared luminance/chroma density ramp."""

    l_hi: float = L_HI
    l_lo: float = L_LO
    c_lo: float = C_LO
    c_hi: float = C_HI

    def __post_init__(self):
        if not 0.0 <= self.l_lo < self.l_hi <= 100.0:
            raise ValueError("luminance ramp needs 0 <= l_lo < l_hi <= 100")
        if not 0.0 <= self.c_lo <= self.c_hi:
            raise ValueError("chroma ramp needs 0 <= c_lo <= c_hi")


_DEFAULT_RAMP = Ramp()


@dataclass(frozen=True)
class Image:
    width: int
    height: int
    pixels: np.ndarray  # (height, width, 3) uint8, row 0 at the top

    def __post_init__(self):
        if self.pixels.shape != (self.height, self.width, 3):
            raise ValueError("pixel buffer does not match declared size")


def _ramp_t(density, dmax: int, log_scale: bool):
    density = np.asarray(density, dtype=np.float64)
    if log_scale:
        return np.log1p(density) / np.log1p(dmax)
    return density / dmax


def density_ramp(
    density: int, dmax: int, hue: float, log_scale: bool = False,
    ramp: Ramp = _DEFAULT_RAMP,
) -> HclColor:
    """Color for one bin: light and washed-out at 0, dark and saturated at dmax."""
    if dmax < 1:
        raise ValueError("dmax must be at least 1")
    if not 0 <= density <= dmax:
        raise ValueError("density must lie in [0, dmax]")
    t = float(_ramp_t(density, dmax, log_scale))
    return HclColor(
        hue=float(hue % 360.0),
        chroma=ramp.c_lo + t * (ramp.c_hi - ramp.c_lo),
        luminance=ramp.l_hi - t * (ramp.l_hi - ramp.l_lo),
    )


def _upscale(bin_rgb: np.ndarray, scale: int) -> np.ndarray:
    if scale == 1:
        return bin_rgb
    return bin_rgb.repeat(scale, axis=0).repeat(scale, axis=1)


def _flip_rows(bin_rgb: np.ndarray) -> np.ndarray:
    return bin_rgb[::-1]


def render_density(
    dg: DensityGrid,
    cmap: ClusterMap | None,
    hues: HueAssignment | None,
    scale: int = 1,
    log_scale: bool = False,
    ramp: Ramp = _DEFAULT_RAMP,
) -> Image:
    """Colorized density raster; pass cmap=None for a plain grayscale plot."""
    if scale < 1 or int(scale) != scale:
        raise ValueError("scale must be a positive integer")
    dmax = max(dg.max_density, 1)
    t = _ramp_t(dg.counts, dmax, log_scale)
    lum = ramp.l_hi - t * (ramp.l_hi - ramp.l_lo)
    chroma = ramp.c_lo + t * (ramp.c_hi - ramp.c_lo)
    hue = np.zeros(dg.spec.n_bins)

    if cmap is None:
        labels = np.full(dg.spec.n_bins, -1, dtype=np.int64)
    else:
        labels = cmap.labels
    none_mask = labels < 0
    if hues is not None and not none_mask.all():
        hue_table = hues.degrees()
        hue[~none_mask] = hue_table[labels[~none_mask]]
    # below-threshold bins: same lightness ramp, no color
    chroma = np.where(none_mask, 0.0, chroma)

    rgb = hcl_to_display_array(hue, chroma, lum)
    bin_rgb = rgb.reshape(dg.spec.height, dg.spec.width, 3)
    pixels = _upscale(_flip_rows(bin_rgb), int(scale))
    return Image(width=pixels.shape[1], height=pixels.shape[0], pixels=pixels)


def render_cluster_lines(
    ls: LineSet,
    la: LineAssignment,
    cluster_id: int,
    spec: GridSpec,
    hue: float,
    scale: int = 1,
) -> Image:
    """Only the lines assigned to one cluster, mid-ramp hue on white."""
    if scale < 1 or int(scale) != scale:
        raise ValueError("scale must be a positive integer")
    chosen = la.lines_of(cluster_id)
    white = np.full((spec.height, spec.width, 3), 255, dtype=np.uint8)
    if len(chosen):
        subset = LineSet(
            lines=[
                Polyline(id=new_id, vertices=ls.lines[old].vertices)
                for new_id, old in enumerate(chosen)
            ],
            bbox=ls.bbox,
            kind=ls.kind,
        )
        fg = extract_feature_sets(subset, spec, radius=STROKE_RADIUS)
        stroke = density_ramp(1, 2, hue)  # mid ramp: t = 0.5
        color = hcl_to_display_array(stroke.hue, stroke.chroma, stroke.luminance)
        rows, cols = np.divmod(fg.nonempty_bins(), spec.width)
        white[rows, cols] = color
    pixels = _upscale(_flip_rows(white), int(scale))
    return Image(width=pixels.shape[1], height=pixels.shape[0], pixels=pixels)


def save_png(image: Image, path: str) -> None:
    PILImage.fromarray(image.pixels, mode="RGB").save(path, format="PNG")


def legend_dict(hues: HueAssignment, la: LineAssignment, degrees=None) -> dict:
    """Per-cluster hue (degrees) and line count for the side-car legend.

    Pass `degrees` to publish externally authoritative values (pinned
    hues keep the exact number the user typed instead of a radians
    round trip).
    """
    degrees = hues.degrees() if degrees is None else np.asarray(degrees, float)
    return {
        str(c): {
            "hue_deg": float(degrees[c]),
            "line_count": int((la.labels == c).sum()),
        }
        for c in range(len(degrees))
    }


def write_legend_json(
    hues: HueAssignment, la: LineAssignment, target: str | TextIO, degrees=None
) -> None:
    own = isinstance(target, str)
    fh = open(target, "w") if own else target
    try:
        json.dump(legend_dict(hues, la, degrees), fh, indent=2, sort_keys=True)
        fh.write("\n")
    finally:
        if own:
            fh.close()
