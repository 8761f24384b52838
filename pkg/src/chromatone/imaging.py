"""Rasters, masks and the pixel-level operations the pipelines are built from."""

import os
from dataclasses import dataclass

import numpy as np
from PIL import Image, UnidentifiedImageError

from . import kernels
from .color import LabColor, rgb_array_to_lab
from .errors import (
    DimensionMismatchError,
    EmptyRegionError,
    ImageDecodeError,
    ImageNotFoundError,
)

MAX_SIDE = 1024
DEFAULT_KERNEL_DIVISOR = 20


@dataclass(frozen=True)
class ImageBuffer:
    """8-bit RGB raster stored as a ``(height, width, 3)`` uint8 array."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 3 or px.shape[2] != 3 or px.shape[0] < 1 or px.shape[1] < 1:
            raise ValueError(f"expected an (h, w, 3) array, got shape {px.shape}")
        if px.dtype != np.uint8:
            if np.any(px < 0) or np.any(px > 255):
                raise ValueError("pixel values must lie in [0, 255]")
            px = px.astype(np.uint8)
        object.__setattr__(self, "pixels", px)

    @property
    def width(self):
        return self.pixels.shape[1]

    @property
    def height(self):
        return self.pixels.shape[0]

    @property
    def size(self):
        return (self.width, self.height)

    @classmethod
    def uniform(cls, width, height, rgb):
        return cls(np.tile(np.asarray(rgb, dtype=np.uint8), (height, width, 1)))


@dataclass(frozen=True)
class PixelMask:
    bits: np.ndarray

    def __post_init__(self):
        bits = np.asarray(self.bits, dtype=bool)
        if bits.ndim != 2:
            raise ValueError(f"mask must be 2-D, got shape {bits.shape}")
        object.__setattr__(self, "bits", bits)

    @property
    def width(self):
        return self.bits.shape[1]

    @property
    def height(self):
        return self.bits.shape[0]

    @property
    def size(self):
        return (self.width, self.height)

    def count(self):
        return int(self.bits.sum())

    @classmethod
    def full(cls, width, height, value=True):
        return cls(np.full((height, width), bool(value)))


@dataclass(frozen=True)
class LabThresholds:
    l_min: float = 0.0
    l_max: float = 100.0
    a_min: float = -128.0
    a_max: float = 127.0
    b_min: float = -128.0
    b_max: float = 127.0

    def __post_init__(self):
        for axis in ("l", "a", "b"):
            lo, hi = getattr(self, f"{axis}_min"), getattr(self, f"{axis}_max")
            if lo > hi:
                raise ValueError(f"{axis}_min={lo} exceeds {axis}_max={hi}")
        if not (0.0 <= self.l_min and self.l_max <= 100.0):
            raise ValueError("lightness bounds must lie in [0, 100]")

    def contains(self, lab):
        lab = np.asarray(lab)
        return (
            (lab[..., 0] >= self.l_min)
            & (lab[..., 0] <= self.l_max)
            & (lab[..., 1] >= self.a_min)
            & (lab[..., 1] <= self.a_max)
            & (lab[..., 2] >= self.b_min)
            & (lab[..., 2] <= self.b_max)
        )


DEFAULT_SKIN_THRESHOLDS = LabThresholds(35, 90, 0, 35, 5, 45)
DEFAULT_VEIN_THRESHOLDS = LabThresholds(25, 75, -30, 20, -40, 10)


def _require_same_size(a, b, what="mask"):
    if a.size != b.size:
        raise DimensionMismatchError(a.size, b.size, what)


def _open(path):
    path = os.fspath(path)
    if not os.path.isfile(path):
        raise ImageNotFoundError(f"no such image file: {path}")
    try:
        with Image.open(path) as im:
            im.load()
            return im.copy()
    except (UnidentifiedImageError, OSError, SyntaxError) as exc:
        raise ImageDecodeError(f"cannot decode {path}: {exc}") from exc


def decode_image(path) -> ImageBuffer:
    im = _open(path)
    if im.mode in ("I;16", "I;16B", "I", "F"):
        arr = np.asarray(im, dtype=np.float64)
        scale = 255.0 / 65535.0 if arr.max() > 255 else 1.0
        gray = np.clip(np.rint(arr * scale), 0, 255).astype(np.uint8)
        return ImageBuffer(np.repeat(gray[:, :, None], 3, axis=2))
    return ImageBuffer(np.asarray(im.convert("RGB"), dtype=np.uint8))


def load_mask(path, img: ImageBuffer) -> PixelMask:
    """Read a mask image; pixels with gray level >= 128 are members."""
    gray = np.asarray(_open(path).convert("L"))
    mask = PixelMask(gray >= 128)
    _require_same_size(img, mask)
    return mask


def save_image(img: ImageBuffer, path):
    Image.fromarray(img.pixels, "RGB").save(path)


def save_mask(mask: PixelMask, path):
    Image.fromarray(mask.bits.astype(np.uint8) * 255, "L").save(path)


def downscale(img: ImageBuffer, max_side=MAX_SIDE) -> ImageBuffer:
    """Area-average down to ``max_side`` on the long edge; smaller images pass through."""
    long_side = max(img.width, img.height)
    if long_side <= max_side:
        return img
    scale = max_side / long_side
    size = (max(1, round(img.width * scale)), max(1, round(img.height * scale)))
    im = Image.fromarray(img.pixels, "RGB").resize(size, Image.Resampling.BOX)
    return ImageBuffer(np.asarray(im))


def gamma_correct(img: ImageBuffer, gamma: float) -> ImageBuffer:
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    if gamma == 1.0:
        return img
    lut = np.rint(255.0 * (np.arange(256) / 255.0) ** (1.0 / gamma))
    return ImageBuffer(lut.astype(np.uint8)[img.pixels])


def blur_kernel_size(width, height, kernel_divisor=DEFAULT_KERNEL_DIVISOR):
    if kernel_divisor < 1:
        raise ValueError("kernel_divisor must be at least 1")
    k = max(3, int(round(min(width, height) / kernel_divisor)))
    return k if k % 2 else k + 1


def gaussian_weights(size):
    sigma = 0.3 * ((size - 1) * 0.5 - 1.0) + 0.8
    x = np.arange(size) - (size - 1) / 2.0
    w = np.exp(-(x**2) / (2.0 * sigma**2))
    return w / w.sum()


def gaussian_blur(img: ImageBuffer, kernel_divisor=DEFAULT_KERNEL_DIVISOR) -> ImageBuffer:
    """Separable Gaussian blur whose kernel grows with the shorter image side.

    Borders are reflected without repeating the edge pixel.
    """
    size = blur_kernel_size(img.width, img.height, kernel_divisor)
    out = kernels.blur_separable(img.pixels.astype(np.float64), gaussian_weights(size))
    return ImageBuffer(np.clip(np.rint(out), 0, 255).astype(np.uint8))


def morphological_close(mask: PixelMask, radius: int) -> PixelMask:
    """Dilation then erosion with a (2r+1)-square; the outside counts as background."""
    if radius < 1:
        raise ValueError("radius must be at least 1")
    padded = np.pad(mask.bits, radius, constant_values=False)
    closed = kernels.erode(kernels.dilate(padded, radius), radius)
    return PixelMask(closed[radius:-radius, radius:-radius])


def image_lab(img: ImageBuffer):
    """Per-pixel LAB as an ``(h, w, 3)`` array."""
    return rgb_array_to_lab(img.pixels.reshape(-1, 3)).reshape(img.height, img.width, 3)


def lab_threshold_mask(img: ImageBuffer, t: LabThresholds, lab=None) -> PixelMask:
    if lab is None:
        lab = image_lab(img)
    return PixelMask(t.contains(lab))


def subtract_mask(a: PixelMask, b: PixelMask) -> PixelMask:
    _require_same_size(a, b)
    return PixelMask(a.bits & ~b.bits)


def masked_pixels(img: ImageBuffer, mask: PixelMask):
    """Member pixels as an ``(n, 3)`` uint8 array in row-major order."""
    _require_same_size(img, mask)
    return img.pixels[mask.bits]


def mean_lab(pixels) -> LabColor:
    """Average of the per-pixel LAB values (convert first, then average)."""
    pixels = np.asarray(pixels).reshape(-1, 3)
    if len(pixels) == 0:
        raise EmptyRegionError("cannot average an empty pixel set")
    return LabColor.from_array(rgb_array_to_lab(pixels).mean(axis=0))


def circular_mask(center, radius, width, height) -> PixelMask:
    """Pixels whose centers lie within ``radius`` of ``center`` (x, y).

    Pixel (x, y) is centred on integer coordinates, matching landmark files.
    """
    if not radius > 0:
        raise ValueError("radius must be positive")
    cx, cy = center
    ys, xs = np.mgrid[0:height, 0:width]
    d2 = (xs - cx) ** 2 + (ys - cy) ** 2
    return PixelMask(d2 <= radius * radius)
