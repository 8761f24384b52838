"""Colour records and conversions between sRGB, HSV, XYZ and CIELAB.

Conventions: 8-bit sRGB, D65 white, 2 degree observer, hue in degrees.
Scalar functions take and return the small record types below; the
``*_array`` variants work on ``(n, 3)`` float arrays and are what the image
pipelines use.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .kernels import WHITE_D65, XYZ_TO_SRGB

_LAB_SLACK = 1e-9


def _check_channel(name, value):
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise TypeError(f"{name} must be an integer, got {value!r}")
    if not 0 <= value <= 255:
        raise ValueError(f"{name}={value} outside [0, 255]")


@dataclass(frozen=True)
class RgbColor:
    r: int
    g: int
    b: int

    def __post_init__(self):
        for name in ("r", "g", "b"):
            _check_channel(name, getattr(self, name))
            object.__setattr__(self, name, int(getattr(self, name)))

    def as_tuple(self):
        return (self.r, self.g, self.b)

    def as_array(self):
        return np.array(self.as_tuple(), dtype=np.float64)


@dataclass(frozen=True)
class HsvColor:
    """Hue in degrees [0, 360); saturation and value as fractions."""

    h: float
    s: float
    v: float

    def __post_init__(self):
        if not 0.0 <= self.h < 360.0:
            raise ValueError(f"hue {self.h} outside [0, 360)")
        if not 0.0 <= self.s <= 1.0:
            raise ValueError(f"saturation {self.s} outside [0, 1]")
        if not 0.0 <= self.v <= 1.0:
            raise ValueError(f"value {self.v} outside [0, 1]")
        if self.s == 0.0 and self.h != 0.0:
            object.__setattr__(self, "h", 0.0)

    def as_tuple(self):
        return (self.h, self.s, self.v)


@dataclass(frozen=True)
class XyzColor:
    """Tristimulus values scaled so the white point has Y = 100."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        for name in ("x", "y", "z"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name}={getattr(self, name)} is negative")


@dataclass(frozen=True)
class LabColor:
    l: float  # noqa: E741
    a: float
    b: float

    def __post_init__(self):
        l = float(self.l)  # noqa: E741
        if not -_LAB_SLACK <= l <= 100.0 + _LAB_SLACK:
            raise ValueError(f"lightness {l} outside [0, 100]")
        object.__setattr__(self, "l", min(max(l, 0.0), 100.0))
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))

    @classmethod
    def from_array(cls, arr):
        arr = np.asarray(arr, dtype=np.float64).reshape(3)
        return cls(arr[0], arr[1], arr[2])

    def as_tuple(self):
        return (self.l, self.a, self.b)

    def as_array(self):
        return np.array(self.as_tuple(), dtype=np.float64)


# ---------------------------------------------------------------------------
# array conversions
# ---------------------------------------------------------------------------


def rgb_array_to_lab(rgb):
    """``(n, 3)`` sRGB values in [0, 255] (float allowed) to LAB."""
    rgb = np.asarray(rgb, dtype=np.float64).reshape(-1, 3)
    return kernels.srgb_to_lab(rgb)


def lab_array_to_rgb(lab):
    """LAB to unclamped, unrounded sRGB in the [0, 255] scale."""
    lab = np.asarray(lab, dtype=np.float64).reshape(-1, 3)
    fy = (lab[:, 0] + 16.0) / 116.0
    fx = fy + lab[:, 1] / 500.0
    fz = fy - lab[:, 2] / 200.0
    f = np.stack([fx, fy, fz], axis=1)
    delta = 6.0 / 29.0
    t = np.where(f > delta, f**3, 3.0 * delta**2 * (f - 4.0 / 29.0))
    xyz = t * WHITE_D65 / 100.0
    lin = xyz @ XYZ_TO_SRGB.T
    srgb = np.where(
        lin <= 0.0031308,
        12.92 * lin,
        1.055 * np.abs(lin) ** (1.0 / 2.4) * np.sign(lin) - 0.055,
    )
    return srgb * 255.0


def rgb_array_to_hsv(rgb):
    """``(n, 3)`` sRGB in [0, 255] to HSV with hue in degrees, s and v in [0, 1]."""
    rgb = np.asarray(rgb, dtype=np.float64).reshape(-1, 3) / 255.0
    mx = rgb.max(axis=1)
    mn = rgb.min(axis=1)
    delta = mx - mn
    r, g, b = rgb[:, 0], rgb[:, 1], rgb[:, 2]
    safe = np.where(delta == 0.0, 1.0, delta)
    h = np.where(
        mx == r,
        ((g - b) / safe) % 6.0,
        np.where(mx == g, (b - r) / safe + 2.0, (r - g) / safe + 4.0),
    )
    h = np.where(delta == 0.0, 0.0, h * 60.0) % 360.0
    s = np.where(mx == 0.0, 0.0, delta / np.where(mx == 0.0, 1.0, mx))
    return np.stack([h, s, mx], axis=1)


def hsv_array_to_rgb(hsv):
    """Inverse of :func:`rgb_array_to_hsv`, returning unrounded [0, 255] floats."""
    hsv = np.asarray(hsv, dtype=np.float64).reshape(-1, 3)
    h = (hsv[:, 0] % 360.0) / 60.0
    s, v = hsv[:, 1], hsv[:, 2]
    c = v * s
    x = c * (1.0 - np.abs(h % 2.0 - 1.0))
    m = v - c
    sector = np.floor(h).astype(int) % 6
    zeros = np.zeros_like(c)
    table = [
        (c, x, zeros),
        (x, c, zeros),
        (zeros, c, x),
        (zeros, x, c),
        (x, zeros, c),
        (c, zeros, x),
    ]
    out = np.zeros((len(hsv), 3))
    for idx, (r, g, b) in enumerate(table):
        sel = sector == idx
        out[sel, 0] = r[sel]
        out[sel, 1] = g[sel]
        out[sel, 2] = b[sel]
    return (out + m[:, None]) * 255.0


def quantize_rgb(values):
    """Round and clip float RGB to the 8-bit grid."""
    return np.clip(np.rint(values), 0, 255).astype(np.uint8)


# ---------------------------------------------------------------------------
# scalar conversions
# ---------------------------------------------------------------------------


def rgb_to_hsv(c: RgbColor) -> HsvColor:
    h, s, v = rgb_array_to_hsv(c.as_array())[0]
    return HsvColor(float(h), float(s), float(v))


def hsv_to_rgb(c: HsvColor) -> RgbColor:
    r, g, b = quantize_rgb(hsv_array_to_rgb(np.array(c.as_tuple())))[0]
    return RgbColor(int(r), int(g), int(b))


def rgb_to_xyz(c: RgbColor) -> XyzColor:
    lin = c.as_array() / 255.0
    lin = np.where(lin <= 0.04045, lin / 12.92, ((lin + 0.055) / 1.055) ** 2.4)
    x, y, z = kernels.SRGB_TO_XYZ @ lin * 100.0
    return XyzColor(float(x), float(y), float(z))


def rgb_to_lab(c: RgbColor) -> LabColor:
    return LabColor.from_array(rgb_array_to_lab(c.as_array())[0])


def lab_to_rgb_checked(c: LabColor):
    """Convert to 8-bit sRGB and report whether gamut clamping was needed."""
    raw = lab_array_to_rgb(c.as_array())[0]
    clamped = bool(np.any(raw < -1e-6) or np.any(raw > 255.0 + 1e-6))
    r, g, b = quantize_rgb(raw)
    return RgbColor(int(r), int(g), int(b)), clamped


def lab_to_rgb(c: LabColor) -> RgbColor:
    return lab_to_rgb_checked(c)[0]
