"""Perceptual colour classification of skin, hair, iris and undertone."""

from .classify import (
    Classification,
    classify_hair,
    classify_iris,
    classify_nearest,
    classify_skin,
    classify_two_stage,
    classify_undertone,
    extract_dominant_skin_tone,
)
from .clustering import ClusterConfig, ClusterModel, kmeans, kmeans_pp_init, xmeans
from .color import HsvColor, LabColor, RgbColor, XyzColor, hsv_to_rgb, lab_to_rgb, rgb_to_hsv, rgb_to_lab
from .delta_e import DeltaEParams, DistanceMetric, cie76, cie94, ciede2000, color_distance
from .evaluation import ConfusionMatrix, evaluate_corpus, metrics
from .imaging import ImageBuffer, LabThresholds, PixelMask
from .kernels import BACKEND
from .scales import ToneClass, ToneScale, UndertoneRefs, bundled_scale, load_tone_scale

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Classification",
    "ClusterConfig",
    "ClusterModel",
    "ConfusionMatrix",
    "DeltaEParams",
    "DistanceMetric",
    "HsvColor",
    "ImageBuffer",
    "LabColor",
    "LabThresholds",
    "PixelMask",
    "RgbColor",
    "ToneClass",
    "ToneScale",
    "UndertoneRefs",
    "XyzColor",
    "bundled_scale",
    "cie76",
    "cie94",
    "ciede2000",
    "classify_hair",
    "classify_iris",
    "classify_nearest",
    "classify_skin",
    "classify_two_stage",
    "classify_undertone",
    "color_distance",
    "evaluate_corpus",
    "extract_dominant_skin_tone",
    "hsv_to_rgb",
    "kmeans",
    "kmeans_pp_init",
    "lab_to_rgb",
    "load_tone_scale",
    "metrics",
    "rgb_to_hsv",
    "rgb_to_lab",
    "xmeans",
]
