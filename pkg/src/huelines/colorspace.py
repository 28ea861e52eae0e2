"""HCL (cylindrical CIE Luv, D65) to display sRGB, with gamut clamping.

Conversion path: HCL -> Luv -> XYZ -> linear sRGB -> gamma-encoded 8-bit.
Out-of-gamut colors are pulled back by shrinking chroma alone (bisection),
so hue and luminance survive the clamp untouched.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# sRGB / D65 constants
_M_XYZ_TO_RGB = np.array([
    [3.2406, -1.5372, -0.4986],
    [-0.9689, 1.8758, 0.0415],
    [0.0557, -0.2040, 1.0570],
])
# exact inverse of the display matrix keeps round trips within one step
_M_RGB_TO_XYZ = np.linalg.inv(_M_XYZ_TO_RGB)
_REF_Y = 1.0
_REF_U = 0.19784
_REF_V = 0.46834
_LAB_E = 0.008856
_LAB_K = 903.3


@dataclass(frozen=True)
class HclColor:
    hue: float  # degrees, [0, 360)
    chroma: float  # >= 0
    luminance: float  # [0, 100]

    def __post_init__(self):
        if not (np.isfinite(self.hue) and np.isfinite(self.chroma) and np.isfinite(self.luminance)):
            raise ValueError("HCL components must be finite")
        if self.chroma < 0:
            raise ValueError("chroma must be non-negative")
        if not 0.0 <= self.luminance <= 100.0:
            raise ValueError("luminance must lie in [0, 100]")


def _luv_to_linear_rgb(l, u, v):
    """Vectorized Luv -> linear sRGB; inputs broadcast together."""
    l = np.asarray(l, dtype=np.float64)
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        var_y = (l + 16.0) / 116.0
        y = np.where(var_y ** 3 > _LAB_E, var_y ** 3, (116.0 * var_y - 16.0) / _LAB_K) * _REF_Y
        var_u = u / (13.0 * l) + _REF_U
        var_v = v / (13.0 * l) + _REF_V
        x = -(9.0 * y * var_u) / ((var_u - 4.0) * var_v - var_u * var_v)
        z = (9.0 * y - 15.0 * var_v * y - var_v * x) / (3.0 * var_v)
    dark = l <= 0.0
    x = np.where(dark, 0.0, x)
    y = np.where(dark, 0.0, y)
    z = np.where(dark, 0.0, z)
    xyz = np.stack([x, y, z], axis=-1)
    return xyz @ _M_XYZ_TO_RGB.T


def _gamma_encode(linear):
    linear = np.clip(linear, 0.0, 1.0)
    return np.where(
        linear <= 0.0031308,
        12.92 * linear,
        1.055 * np.power(linear, 1.0 / 2.4) - 0.055,
    )


def _gamma_decode(encoded):
    encoded = np.asarray(encoded, dtype=np.float64)
    return np.where(
        encoded > 0.04045,
        np.power((encoded + 0.055) / 1.055, 2.4),
        encoded / 12.92,
    )


def _hcl_to_linear_rgb(h_deg, c, l):
    h = np.radians(np.asarray(h_deg, dtype=np.float64))
    c = np.asarray(c, dtype=np.float64)
    l = np.asarray(l, dtype=np.float64)
    return _luv_to_linear_rgb(l, c * np.cos(h), c * np.sin(h))


def _in_gamut(linear, tol=1e-9):
    return np.all(linear >= -tol, axis=-1) & np.all(linear <= 1.0 + tol, axis=-1)


def clamp_chroma(h_deg, c, l, iterations: int = 40):
    """Largest chroma <= c that fits the sRGB gamut at this hue and luminance."""
    h_deg, c, l = np.broadcast_arrays(
        np.asarray(h_deg, dtype=np.float64),
        np.asarray(c, dtype=np.float64),
        np.asarray(l, dtype=np.float64),
    )
    ok = _in_gamut(_hcl_to_linear_rgb(h_deg, c, l))
    lo = np.where(ok, c, 0.0)
    hi = c.astype(np.float64).copy()
    for _ in range(iterations):
        if ok.all():
            break
        mid = (lo + hi) / 2.0
        mid_ok = _in_gamut(_hcl_to_linear_rgb(h_deg, mid, l))
        lo = np.where(~ok & mid_ok, mid, lo)
        hi = np.where(~ok & ~mid_ok, mid, hi)
    return np.where(ok, c, lo)


def hcl_to_display_array(h_deg, c, l) -> np.ndarray:
    """Vectorized HCL -> 8-bit sRGB with chroma-only gamut clamping."""
    c_fit = clamp_chroma(h_deg, c, l)
    encoded = _gamma_encode(_hcl_to_linear_rgb(h_deg, c_fit, l))
    return np.round(encoded * 255.0).astype(np.uint8)


def hcl_to_display(color: HclColor) -> tuple[int, int, int]:
    """An HclColor as a display sRGB triple."""
    rgb = hcl_to_display_array(color.hue, color.chroma, color.luminance)
    return (int(rgb[0]), int(rgb[1]), int(rgb[2]))


def display_to_hcl(rgb) -> HclColor:
    """8-bit sRGB back to HCL (for round-trip checks and tooling)."""
    encoded = np.asarray(rgb, dtype=np.float64) / 255.0
    linear = _gamma_decode(encoded)
    x, y, z = linear @ _M_RGB_TO_XYZ.T
    if x == y == z == 0.0:
        return HclColor(hue=0.0, chroma=0.0, luminance=0.0)
    denom = x + 15.0 * y + 3.0 * z
    var_u = 4.0 * x / denom
    var_v = 9.0 * y / denom
    ratio = y / _REF_Y
    l = 116.0 * np.cbrt(ratio) - 16.0 if ratio > _LAB_E else _LAB_K * ratio
    if l <= 0.0:
        return HclColor(hue=0.0, chroma=0.0, luminance=0.0)
    u = 13.0 * l * (var_u - _REF_U)
    v = 13.0 * l * (var_v - _REF_V)
    chroma = float(np.hypot(u, v))
    hue = float(np.degrees(np.arctan2(v, u)) % 360.0)
    return HclColor(hue=hue, chroma=chroma, luminance=float(min(l, 100.0)))
