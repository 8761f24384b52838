"""Synthetic labelled corpora with known ground truth.

Each generator writes PNG images (plus masks or landmark files) and a
``manifest.csv`` into an output directory. Colours come from the bundled
scales; Gaussian noise of the requested sigma is added per channel.
"""

import csv
import json
from pathlib import Path

import numpy as np
from scipy.optimize import nnls

from .color import lab_array_to_rgb, lab_to_rgb_checked, quantize_rgb, rgb_array_to_lab
from .delta_e import ciede2000_array
from .imaging import ImageBuffer, LabThresholds, PixelMask, save_image, save_mask
from .scales import UndertoneRefs, bundled_scale

KINDS = ("skin", "hair", "iris", "vein")
SKIN_BACKGROUND = (58, 84, 70)
WRIST_SKIN_LAB = (72.0, 12.0, 20.0)


def _ellipse(width, height, cx, cy, rx, ry):
    ys, xs = np.mgrid[0:height, 0:width]
    return ((xs - cx) / rx) ** 2 + ((ys - cy) / ry) ** 2 <= 1.0


def _disk(width, height, cx, cy, r):
    return _ellipse(width, height, cx, cy, r, r)


def _ref_rgb(lab):
    return np.array(lab_to_rgb_checked(lab)[0].as_tuple(), dtype=np.float64)


def add_noise(pixels, sigma, rng):
    """Add zero-mean Gaussian noise and requantise to 8 bits."""
    pixels = np.asarray(pixels, dtype=np.float64)
    if sigma > 0:
        pixels = pixels + rng.normal(0.0, sigma, pixels.shape)
    return quantize_rgb(pixels)


def dither_lab(target, count, rng):
    """``count`` 8-bit pixels whose mean LAB is as close as possible to ``target``.

    Mixes the corners of the RGB lattice cell around the exact colour with
    non-negative weights solved in LAB space.
    """
    target = np.asarray(target, dtype=np.float64)
    exact = lab_array_to_rgb(target)[0]
    base = np.clip(np.floor(exact), 0, 254)
    corners = np.array(
        [base + np.array([i, j, k]) for i in (0, 1) for j in (0, 1) for k in (0, 1)]
    )
    labs = rgb_array_to_lab(corners)
    # the last row pins the weights to sum to one
    weight = 1e3
    a = np.vstack([labs.T, np.full(len(corners), weight)])
    b = np.concatenate([target, [weight]])
    w, _ = nnls(a, b)
    w = w / w.sum()
    raw = w * count
    counts = np.floor(raw).astype(int)
    for idx in np.argsort(-(raw - counts), kind="stable")[: count - counts.sum()]:
        counts[idx] += 1
    pixels = np.repeat(corners, counts, axis=0)
    return pixels[rng.permutation(len(pixels))].astype(np.uint8)


def _write_manifest(out, header, rows):
    with open(out / "manifest.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _gen_skin(out, count, noise, rng, size=(128, 128)):
    scale = bundled_scale("skin")
    w, h = size
    face = _ellipse(w, h, w / 2, h / 2, w * 0.34, h * 0.42)
    rows = []
    for i in range(count):
        cls = scale.classes[i % len(scale.classes)]
        img = np.empty((h, w, 3))
        img[:] = SKIN_BACKGROUND
        img[face] = _ref_rgb(cls.reference)
        name = f"skin_{i:03d}"
        save_image(ImageBuffer(add_noise(img, noise, rng)), out / f"{name}.png")
        save_mask(PixelMask(face), out / f"{name}_mask.png")
        rows.append([f"{name}.png", cls.name, f"{name}_mask.png"])
    _write_manifest(out, ["path", "label", "mask_path"], rows)


def _gen_hair(out, count, noise, rng, size=(128, 128)):
    scale = bundled_scale("hair")
    w, h = size
    hair = _ellipse(w, h, w / 2, h * 0.3, w * 0.42, h * 0.26)
    face = _ellipse(w, h, w / 2, h * 0.62, w * 0.3, h * 0.34)
    hair &= ~face
    rows = []
    for i in range(count):
        cls = scale.classes[i % len(scale.classes)]
        base = _ref_rgb(cls.reference)
        lab = cls.reference.as_array()
        highlight = _ref_rgb_array(lab + np.array([10.0, 0.0, 0.0]))
        img = np.empty((h, w, 3))
        img[:] = SKIN_BACKGROUND
        img[face] = _ref_rgb(bundled_scale("skin").classes[3].reference)
        img[hair] = base
        # thin lighter strands over ~15% of the hair region
        strands = hair & (rng.random((h, w)) < 0.15)
        img[strands] = highlight
        name = f"hair_{i:03d}"
        save_image(ImageBuffer(add_noise(img, noise, rng)), out / f"{name}.png")
        save_mask(PixelMask(hair), out / f"{name}_mask.png")
        rows.append([f"{name}.png", cls.name, f"{name}_mask.png"])
    _write_manifest(out, ["path", "label", "mask_path"], rows)


def _ref_rgb_array(lab):
    return np.clip(np.rint(lab_array_to_rgb(lab)[0]), 0, 255)


def face_landmarks(width, height, eye_width):
    """A plausible 68-point layout whose eye geometry is fully determined.

    Eye centres sit at (0.3w, 0.4h) and (0.7w, 0.4h).
    """
    pts = np.zeros((68, 2))
    cx, cy = width / 2, height / 2
    t = np.linspace(np.pi * 0.05, np.pi * 0.95, 17)
    pts[0:17] = np.c_[cx - np.cos(t) * width * 0.45, cy + np.sin(t) * height * 0.45]
    pts[17:22] = np.c_[np.linspace(0.15, 0.42, 5) * width, np.full(5, 0.28 * height)]
    pts[22:27] = np.c_[np.linspace(0.58, 0.85, 5) * width, np.full(5, 0.28 * height)]
    pts[27:36] = np.c_[np.full(9, cx), np.linspace(0.45, 0.65, 9) * height]
    pts[48:68] = np.c_[
        cx + np.cos(np.linspace(0, 2 * np.pi, 20, endpoint=False)) * width * 0.12,
        0.8 * height + np.sin(np.linspace(0, 2 * np.pi, 20, endpoint=False)) * height * 0.05,
    ]
    half = eye_width / 2.0
    lid = eye_width * 0.18
    for start, ex in ((36, 0.3 * width), (42, 0.7 * width)):
        ey = 0.4 * height
        pts[start : start + 6] = [
            (ex - half, ey),
            (ex - half / 3, ey - lid),
            (ex + half / 3, ey - lid),
            (ex + half, ey),
            (ex + half / 3, ey + lid),
            (ex - half / 3, ey + lid),
        ]
    return np.rint(pts).astype(int)


def paint_eyes(img, landmarks, iris_rgb, pupil_rgb=(10, 10, 10), radius_factor=0.4):
    """Paint iris disks (and darker pupils) centred on the eye landmarks."""
    h, w = img.shape[:2]
    for start in (36, 42):
        eye = landmarks[start : start + 6].astype(float)
        c = eye.mean(axis=0)
        ew = np.hypot(*(eye[3] - eye[0]))
        sclera = _ellipse(w, h, c[0], c[1], ew / 2 + 2, ew * 0.45)
        img[sclera] = (235, 232, 228)
        img[_disk(w, h, c[0], c[1], radius_factor * ew + 1.5)] = iris_rgb
        img[_disk(w, h, c[0], c[1], 0.25 * radius_factor * ew)] = pupil_rgb
    return img


def _gen_iris(out, count, noise, rng, size=(160, 96), eye_width=30):
    scale = bundled_scale("iris")
    w, h = size
    landmarks = face_landmarks(w, h, eye_width)
    rows = []
    for i in range(count):
        cls = scale.classes[i % len(scale.classes)]
        img = np.empty((h, w, 3))
        img[:] = _ref_rgb(bundled_scale("skin").classes[2].reference)
        paint_eyes(img, landmarks, _ref_rgb(cls.reference))
        name = f"iris_{i:03d}"
        save_image(ImageBuffer(add_noise(img, noise, rng)), out / f"{name}.png")
        np.savetxt(out / f"{name}.txt", landmarks, fmt="%d")
        rows.append([f"{name}.png", cls.name, "", f"{name}.txt"])
    _write_manifest(out, ["path", "label", "mask_path", "landmarks_path"], rows)


def wrist_thresholds(noise=0.0):
    """Skin box around the synthetic wrist colour; everything else counts as vein."""
    half = 4.0 + 2.0 * noise
    l, a, b = WRIST_SKIN_LAB  # noqa: E741
    skin = LabThresholds(max(0.0, l - half), min(100.0, l + half), a - half, a + half, b - half, b + half)
    return skin, LabThresholds()


def wrist_image(vein_lab, rng, size=(128, 96), noise=0.0):
    """Wrist-coloured image with three vein bands whose mean LAB is ``vein_lab``."""
    w, h = size
    img = np.empty((h, w, 3), dtype=np.uint8)
    img[:] = quantize_rgb(lab_array_to_rgb(WRIST_SKIN_LAB))[0]
    bands = np.zeros((h, w), dtype=bool)
    for y0 in (20, 44, 68):
        bands[y0 : y0 + 6, 12 : w - 12] = True
    img[bands] = dither_lab(vein_lab, int(bands.sum()), rng)
    return ImageBuffer(add_noise(img, noise, rng)), PixelMask(bands)


def _sample_vein_lab(rng, refs, skin_t):
    while True:
        lab = np.array([rng.uniform(30, 80), rng.uniform(-30, 30), rng.uniform(-40, 45)])
        if lab_to_rgb_checked_array(lab) or skin_t.contains(lab):
            continue
        dw, dc = ciede2000_array(np.array([refs.warm.as_tuple(), refs.cool.as_tuple()]), lab)
        if abs(dw - dc) > 0.5:
            return lab, ("Warm" if dw <= dc else "Cool")


def lab_to_rgb_checked_array(lab):
    raw = lab_array_to_rgb(lab)[0]
    return bool(np.any(raw < 1.0) or np.any(raw > 254.0))


def _gen_vein(out, count, noise, rng):
    refs = UndertoneRefs()
    skin_t, vein_t = wrist_thresholds(noise)
    rows = []
    for i in range(count):
        if i % 10 == 0:
            lab, label = refs.warm.as_array(), "Warm"
        elif i % 10 == 1:
            lab, label = refs.cool.as_array(), "Cool"
        else:
            lab, label = _sample_vein_lab(rng, refs, skin_t)
        img, _ = wrist_image(lab, rng, noise=noise)
        name = f"vein_{i:03d}"
        save_image(img, out / f"{name}.png")
        rows.append([f"{name}.png", label])
    _write_manifest(out, ["path", "label"], rows)
    doc = {
        "skin": {k: float(v) for k, v in vars(skin_t).items()},
        "vein": {k: float(v) for k, v in vars(vein_t).items()},
    }
    (out / "thresholds.json").write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


_GENERATORS = {"skin": _gen_skin, "hair": _gen_hair, "iris": _gen_iris, "vein": _gen_vein}


def generate(out, kind, count, noise=0.0, seed=42):
    """Write a synthetic corpus of ``count`` images and return the manifest path."""
    if kind not in _GENERATORS:
        raise ValueError(f"unknown fixture kind {kind!r}; expected one of {', '.join(KINDS)}")
    if count < 1:
        raise ValueError("count must be positive")
    if noise < 0:
        raise ValueError("noise must be nonnegative")
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    _GENERATORS[kind](out, count, float(noise), np.random.default_rng(seed))
    return out / "manifest.csv"
