"""Skin tone, hair, iris and undertone classification pipelines."""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .clustering import ClusterConfig, dominant_cluster, kmeans, xmeans
from .color import (
    HsvColor,
    LabColor,
    RgbColor,
    hsv_to_rgb,
    rgb_array_to_hsv,
    rgb_array_to_lab,
    rgb_to_lab,
)
from .delta_e import ciede2000_array, lab_distance_array
from .errors import (
    DegenerateLandmarksError,
    EmptyRegionError,
    InsufficientPixelsError,
    LandmarkFormatError,
    NoVeinsDetectedError,
    ScaleFormatError,
)
from .imaging import (
    DEFAULT_KERNEL_DIVISOR,
    DEFAULT_SKIN_THRESHOLDS,
    DEFAULT_VEIN_THRESHOLDS,
    ImageBuffer,
    LabThresholds,
    PixelMask,
    blur_kernel_size,
    circular_mask,
    downscale,
    gamma_correct,
    gaussian_blur,
    image_lab,
    lab_threshold_mask,
    masked_pixels,
    morphological_close,
    subtract_mask,
)
from .scales import ToneScale, UndertoneRefs

MIN_REGION_PIXELS = 50
HAIR_CLUSTERS = 3
IRIS_RADIUS_FACTOR = 0.4
PUPIL_FACTOR = 0.35
DEFAULT_CLOSE_RADIUS = 2

# 0-based indices into the 68-point layout
LEFT_EYE = tuple(range(36, 42))
RIGHT_EYE = tuple(range(42, 48))


@dataclass(frozen=True)
class Classification:
    label: str
    distance: float
    dominant: LabColor
    runner_up: Optional[tuple] = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.distance < 0:
            raise ValueError("distance must be nonnegative")
        if self.runner_up is not None and self.runner_up[1] < self.distance:
            raise ValueError("runner-up is closer than the chosen label")


@dataclass(frozen=True)
class DominantColor:
    rgb: RgbColor
    hsv: HsvColor
    lab: LabColor
    share: float
    clusters: int
    pixels: int


def _require_pixels(count, minimum=MIN_REGION_PIXELS):
    if count < minimum:
        raise InsufficientPixelsError(count, minimum)


def hsv_points(rgb):
    """HSV features on comparable scales: (hue degrees, s*255, v*255); hue is not wrapped."""
    hsv = rgb_array_to_hsv(rgb)
    hsv[:, 1:] *= 255.0
    return hsv


def _hsv_from_center(center):
    h = float(np.rint(center[0])) % 360.0
    s = float(np.clip(np.rint(center[1]), 0, 255)) / 255.0
    v = float(np.clip(np.rint(center[2]), 0, 255)) / 255.0
    return HsvColor(h, s, v)


def preprocess(img: ImageBuffer, blur=True, kernel_divisor=DEFAULT_KERNEL_DIVISOR, gamma=1.0):
    img = gamma_correct(img, gamma)
    if blur:
        img = gaussian_blur(img, kernel_divisor)
    return img


def extract_dominant(
    img: ImageBuffer,
    mask: PixelMask,
    cfg: ClusterConfig = ClusterConfig(),
    blur=True,
    kernel_divisor=DEFAULT_KERNEL_DIVISOR,
    gamma=1.0,
    space="hsv",
) -> DominantColor:
    """Dominant colour of the masked region via X-means in HSV or RGB."""
    if space not in ("hsv", "rgb"):
        raise ValueError(f"unknown clustering space {space!r}")
    _require_pixels(mask.count())
    img = preprocess(img, blur, kernel_divisor, gamma)
    rgb = masked_pixels(img, mask).astype(np.float64)
    if space == "hsv":
        model = xmeans(hsv_points(rgb), cfg)
        center, share = dominant_cluster(model)
        hsv = _hsv_from_center(center)
        dom_rgb = hsv_to_rgb(hsv)
    else:
        model = xmeans(rgb, cfg)
        center, share = dominant_cluster(model)
        r, g, b = (int(v) for v in np.clip(np.rint(center), 0, 255))
        dom_rgb = RgbColor(r, g, b)
        h, s, v = rgb_array_to_hsv(dom_rgb.as_array())[0]
        hsv = HsvColor(float(h), float(s), float(v))
    return DominantColor(dom_rgb, hsv, rgb_to_lab(dom_rgb), share, model.k, len(rgb))


def extract_dominant_skin_tone(
    img: ImageBuffer,
    skin_mask: PixelMask,
    cfg: ClusterConfig = ClusterConfig(),
    blur=True,
    kernel_divisor=DEFAULT_KERNEL_DIVISOR,
    gamma=1.0,
) -> HsvColor:
    """Dominant skin HSV, hue in whole degrees and s, v on the 1/255 grid."""
    return extract_dominant(img, skin_mask, cfg, blur, kernel_divisor, gamma, "hsv").hsv


def _ranked(labels, distances, dominant, metadata):
    order = np.argsort(distances, kind="stable")
    best = int(order[0])
    runner = None
    if len(order) > 1:
        runner = (labels[int(order[1])], float(distances[order[1]]))
    return Classification(labels[best], float(distances[best]), dominant, runner, metadata)


def scale_distances(dominant: LabColor, scale: ToneScale):
    """Distance from ``dominant`` to each class reference (reference first)."""
    return lab_distance_array(scale.metric, scale.references(), dominant.as_array(), scale.params)


def classify_nearest(dominant: LabColor, scale: ToneScale, metadata=None) -> Classification:
    """Closest class under the scale's metric; ties go to the earlier class."""
    return _ranked(scale.names, scale_distances(dominant, scale), dominant, dict(metadata or {}))


def classify_two_stage(dominant: LabColor, scale: ToneScale, metadata=None) -> Classification:
    """Pick the closest main class, then the closest subclass inside it."""
    if not all(c.subclasses for c in scale.classes):
        raise ScaleFormatError(f"scale {scale.name!r} has classes without subclasses")
    main_d = scale_distances(dominant, scale)
    main_idx = int(np.argmin(main_d))
    main = scale.classes[main_idx]
    sub_scale_names = [s.name for s in main.subclasses]
    sub_refs = np.array([s.reference.as_tuple() for s in main.subclasses])
    sub_d = lab_distance_array(scale.metric, sub_refs, dominant.as_array(), scale.params)
    meta = dict(metadata or {})
    meta.update(main_class=main.name, main_distance=float(main_d[main_idx]))
    return _ranked(sub_scale_names, sub_d, dominant, meta)


def classify_skin(
    img: ImageBuffer,
    skin_mask: PixelMask,
    scale: ToneScale,
    cfg: ClusterConfig = ClusterConfig(),
    blur=True,
    kernel_divisor=DEFAULT_KERNEL_DIVISOR,
    gamma=1.0,
    space="hsv",
    two_stage=False,
) -> Classification:
    dom = extract_dominant(img, skin_mask, cfg, blur, kernel_divisor, gamma, space)
    meta = {
        "cluster_share": dom.share,
        "clusters": dom.clusters,
        "pixels": dom.pixels,
        "dominant_hsv": [int(round(dom.hsv.h)), int(round(dom.hsv.s * 255)), int(round(dom.hsv.v * 255))],
        "dominant_rgb": list(dom.rgb.as_tuple()),
        "blur_kernel": blur_kernel_size(img.width, img.height, kernel_divisor) if blur else 0,
    }
    if two_stage:
        return classify_two_stage(dom.lab, scale, meta)
    return classify_nearest(dom.lab, scale, meta)


def classify_hair(
    img: ImageBuffer, hair_mask: PixelMask, scale: ToneScale, seed: int = 42
) -> Classification:
    """Score each category by the mean of its distances to the dominant and average colours."""
    count = hair_mask.count()
    _require_pixels(count)
    lab = rgb_array_to_lab(masked_pixels(img, hair_mask))
    k = min(HAIR_CLUSTERS, len(np.unique(lab, axis=0)))
    model = kmeans(lab, k, ClusterConfig(initial_k=1, max_k=max(k, 1), seed=seed))
    center, share = dominant_cluster(model)
    dominant = LabColor.from_array(center)
    average = LabColor.from_array(lab.mean(axis=0))
    refs = scale.references()
    d_dom = lab_distance_array(scale.metric, refs, dominant.as_array(), scale.params)
    d_avg = lab_distance_array(scale.metric, refs, average.as_array(), scale.params)
    combined = (d_dom + d_avg) / 2.0
    meta = {
        "cluster_share": share,
        "clusters": model.k,
        "pixels": count,
        "average_lab": list(average.as_tuple()),
    }
    return _ranked(scale.names, combined, dominant, meta)


def load_landmarks(path):
    """Read 68 ``x y`` lines into a ``(68, 2)`` float array."""
    rows = []
    try:
        with open(path, encoding="utf-8") as fh:
            lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    except OSError as exc:
        raise LandmarkFormatError(f"cannot read landmarks {path}: {exc}") from exc
    for lineno, line in enumerate(lines, 1):
        parts = line.split()
        if len(parts) != 2:
            raise LandmarkFormatError(f"{path}:{lineno}: expected 'x y', got {line!r}")
        try:
            rows.append((float(parts[0]), float(parts[1])))
        except ValueError:
            raise LandmarkFormatError(f"{path}:{lineno}: non-numeric coordinate") from None
    if len(rows) != 68:
        raise LandmarkFormatError(f"{path}: expected 68 landmarks, found {len(rows)}")
    return np.array(rows)


def iris_region(landmarks, eye, width, height):
    """Annulus around one eye's landmark centroid, pupil excluded."""
    pts = np.asarray(landmarks, dtype=np.float64)[list(eye)]
    center = pts.mean(axis=0)
    eye_width = float(np.hypot(*(pts[3] - pts[0])))
    if eye_width <= 0.0:
        raise DegenerateLandmarksError(f"eye landmarks {eye[0] + 1}-{eye[-1] + 1} have zero width")
    radius = IRIS_RADIUS_FACTOR * eye_width
    outer = circular_mask(center, radius, width, height)
    inner = circular_mask(center, PUPIL_FACTOR * radius, width, height)
    return subtract_mask(outer, inner)


def classify_iris(img: ImageBuffer, landmarks, scale: ToneScale) -> Classification:
    landmarks = np.asarray(landmarks, dtype=np.float64)
    if landmarks.shape != (68, 2):
        raise LandmarkFormatError(f"expected (68, 2) landmarks, got {landmarks.shape}")
    means = []
    counts = []
    for eye in (LEFT_EYE, RIGHT_EYE):
        region = iris_region(landmarks, eye, img.width, img.height)
        px = masked_pixels(img, region)
        if len(px) == 0:
            raise EmptyRegionError(f"iris annulus for landmarks {eye[0] + 1}-{eye[-1] + 1} is empty")
        means.append(px.astype(np.float64).mean(axis=0))
        counts.append(len(px))
    avg_rgb = np.mean(means, axis=0)
    dominant = LabColor.from_array(rgb_array_to_lab(avg_rgb)[0])
    meta = {"pixels": sum(counts), "eye_pixels": counts, "average_rgb": [float(v) for v in avg_rgb]}
    return classify_nearest(dominant, scale, meta)


def vein_region(
    img: ImageBuffer,
    skin_t: LabThresholds = DEFAULT_SKIN_THRESHOLDS,
    vein_t: LabThresholds = DEFAULT_VEIN_THRESHOLDS,
    close_radius=DEFAULT_CLOSE_RADIUS,
):
    """Vein-coloured pixels that are not skin-coloured, after closing.

    Returns the mask, the per-pixel LAB array it indexes, and the skin mask.
    """
    lab = image_lab(img)
    skin = lab_threshold_mask(img, skin_t, lab)
    vein = lab_threshold_mask(img, vein_t, lab)
    veins = morphological_close(subtract_mask(vein, skin), close_radius)
    return veins, lab, skin


def _vein_mean(img, skin_t, vein_t, close_radius):
    img = downscale(img)
    veins, lab, skin = vein_region(img, skin_t, vein_t, close_radius)
    n = veins.count()
    if n == 0:
        raise NoVeinsDetectedError()
    mean = LabColor.from_array(lab[veins.bits].mean(axis=0))
    return mean, {"vein_pixels": n, "skin_pixels": skin.count()}


def classify_undertone(
    img: ImageBuffer,
    skin_t: LabThresholds = DEFAULT_SKIN_THRESHOLDS,
    vein_t: LabThresholds = DEFAULT_VEIN_THRESHOLDS,
    refs: UndertoneRefs = UndertoneRefs(),
    close_radius=DEFAULT_CLOSE_RADIUS,
    strategy="ciede2000",
) -> Classification:
    """Warm/Cool from the mean LAB of the vein pixels; ties go to Warm."""
    mean, meta = _vein_mean(img, skin_t, vein_t, close_radius)
    if strategy == "cosine":
        result = classify_undertone_cosine(mean, refs)
        result.metadata.update(meta)
        return result
    if strategy != "ciede2000":
        raise ValueError(f"unknown undertone strategy {strategy!r}")
    return classify_undertone_lab(mean, refs, meta)


def classify_undertone_lab(vein_mean: LabColor, refs: UndertoneRefs = UndertoneRefs(), metadata=None):
    warm_d, cool_d = ciede2000_array(
        np.array([refs.warm.as_tuple(), refs.cool.as_tuple()]), vein_mean.as_array()
    )
    meta = dict(metadata or {})
    meta.update(warm_delta=float(warm_d), cool_delta=float(cool_d))
    if warm_d <= cool_d:
        return Classification("Warm", float(warm_d), vein_mean, ("Cool", float(cool_d)), meta)
    return Classification("Cool", float(cool_d), vein_mean, ("Warm", float(warm_d)), meta)


def _cosine(u, v):
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise ValueError("cosine similarity is undefined for a zero vector")
    return float(np.dot(u, v) / (nu * nv))


def classify_undertone_cosine(vein_mean: LabColor, refs: UndertoneRefs = UndertoneRefs()):
    """Warm/Cool by highest cosine similarity of (L, a, b) vectors; reported distance is 1 - similarity."""
    v = vein_mean.as_array()
    sim_w = _cosine(v, refs.warm.as_array())
    sim_c = _cosine(v, refs.cool.as_array())
    meta = {"warm_similarity": sim_w, "cool_similarity": sim_c}
    dw, dc = max(0.0, 1.0 - sim_w), max(0.0, 1.0 - sim_c)
    if sim_w >= sim_c:
        return Classification("Warm", dw, vein_mean, ("Cool", dc), meta)
    return Classification("Cool", dc, vein_mean, ("Warm", dw), meta)
