"""Colour-difference metrics: Euclidean, CIE76, CIE94 (graphic arts) and CIEDE2000."""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import kernels
from .color import LabColor, RgbColor, lab_array_to_rgb, rgb_array_to_lab


@dataclass(frozen=True)
class DeltaEParams:
    """Parametric factors k_L, k_C, k_H."""

    k_l: float = 1.0
    k_c: float = 1.0
    k_h: float = 1.0

    def __post_init__(self):
        for name in ("k_l", "k_c", "k_h"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")


DEFAULT_PARAMS = DeltaEParams()


class DistanceMetric(str, Enum):
    EUCLIDEAN_RGB = "euclidean-rgb"
    EUCLIDEAN_LAB = "euclidean-lab"
    CIE76 = "cie76"
    CIE94 = "cie94"
    CIEDE2000 = "ciede2000"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            names = ", ".join(m.value for m in cls)
            raise ValueError(f"unknown metric {value!r}; expected one of {names}") from None


def _lab(c):
    return c.as_array() if isinstance(c, LabColor) else np.asarray(c, dtype=np.float64)


def euclidean_distance(p, q):
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    return float(np.sqrt(np.sum((q - p) ** 2)))


def cie76(a: LabColor, b: LabColor) -> float:
    return euclidean_distance(_lab(a), _lab(b))


def cie94_array(lab1, lab2, params=DEFAULT_PARAMS):
    """Graphic-arts CIE94; the first argument is the reference (its chroma sets S_C, S_H)."""
    lab1 = np.atleast_2d(np.asarray(lab1, dtype=np.float64))
    lab2 = np.atleast_2d(np.asarray(lab2, dtype=np.float64))
    dl = lab1[:, 0] - lab2[:, 0]
    c1 = np.hypot(lab1[:, 1], lab1[:, 2])
    c2 = np.hypot(lab2[:, 1], lab2[:, 2])
    dc = c1 - c2
    da = lab1[:, 1] - lab2[:, 1]
    db = lab1[:, 2] - lab2[:, 2]
    dh2 = np.maximum(da * da + db * db - dc * dc, 0.0)
    s_c = 1.0 + 0.045 * c1
    s_h = 1.0 + 0.015 * c1
    return np.sqrt(
        (dl / params.k_l) ** 2 + (dc / (params.k_c * s_c)) ** 2 + dh2 / (params.k_h * s_h) ** 2
    )


def cie94(a: LabColor, b: LabColor, params: DeltaEParams = DEFAULT_PARAMS) -> float:
    return float(cie94_array(_lab(a), _lab(b), params)[0])


def ciede2000_array(lab1, lab2, params=DEFAULT_PARAMS):
    """Row-wise CIEDE2000 for ``(n, 3)`` arrays (either side may be a single row)."""
    lab1 = np.atleast_2d(np.asarray(lab1, dtype=np.float64))
    lab2 = np.atleast_2d(np.asarray(lab2, dtype=np.float64))
    return kernels.ciede2000(lab1, lab2, params.k_l, params.k_c, params.k_h)


def ciede2000(a: LabColor, b: LabColor, params: DeltaEParams = DEFAULT_PARAMS) -> float:
    return float(ciede2000_array(_lab(a), _lab(b), params)[0])


def lab_distance_array(metric, lab1, lab2, params=DEFAULT_PARAMS):
    """Distance between LAB rows under any metric.

    ``euclidean-rgb`` converts both sides back to (unclamped) sRGB first.
    """
    metric = DistanceMetric.parse(metric)
    lab1 = np.atleast_2d(np.asarray(lab1, dtype=np.float64))
    lab2 = np.atleast_2d(np.asarray(lab2, dtype=np.float64))
    if metric is DistanceMetric.CIEDE2000:
        return ciede2000_array(lab1, lab2, params)
    if metric is DistanceMetric.CIE94:
        return cie94_array(lab1, lab2, params)
    if metric is DistanceMetric.EUCLIDEAN_RGB:
        lab1, lab2 = lab_array_to_rgb(lab1), lab_array_to_rgb(lab2)
    return np.sqrt(np.sum((lab1 - lab2) ** 2, axis=1))


def color_distance(
    metric, a: RgbColor, b: RgbColor, params: DeltaEParams = DEFAULT_PARAMS
) -> float:
    metric = DistanceMetric.parse(metric)
    if metric is DistanceMetric.EUCLIDEAN_RGB:
        return euclidean_distance(a.as_array(), b.as_array())
    lab = rgb_array_to_lab(np.stack([a.as_array(), b.as_array()]))
    return float(lab_distance_array(metric, lab[:1], lab[1:], params)[0])
