"""Reference tone scales and their JSON file format.

A scale file looks like::

    {"name": "skin", "metric": "ciede2000",
     "classes": [{"name": "1", "lab": [88, 6, 14]}, ...]}

Classes may carry ``"subclasses"`` (same shape, recursively). A class with
subclasses may omit ``"lab"``; its reference is then the mean of its
subclass references.
"""

import json
import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .color import LabColor
from .delta_e import DEFAULT_PARAMS, DeltaEParams, DistanceMetric
from .errors import ScaleFormatError

SCALE_DIR_ENV = "CHROMATONE_SCALE_DIR"
BUNDLED = ("skin", "skin2stage", "hair", "iris", "undertone")


@dataclass(frozen=True)
class ToneClass:
    name: str
    reference: LabColor
    subclasses: tuple = ()


@dataclass(frozen=True)
class ToneScale:
    name: str
    classes: tuple
    metric: DistanceMetric = DistanceMetric.CIEDE2000
    params: DeltaEParams = DEFAULT_PARAMS

    def __post_init__(self):
        object.__setattr__(self, "classes", tuple(self.classes))
        object.__setattr__(self, "metric", DistanceMetric.parse(self.metric))
        if len(self.classes) < 2:
            raise ScaleFormatError(f"scale {self.name!r} needs at least two classes")
        _check_unique(self.classes, self.name)

    @property
    def names(self):
        return [c.name for c in self.classes]

    def leaf_names(self):
        out = []
        for c in self.classes:
            if c.subclasses:
                out.extend(s.name for s in c.subclasses)
            else:
                out.append(c.name)
        return out

    def references(self):
        return np.array([c.reference.as_tuple() for c in self.classes])

    def with_metric(self, metric):
        return ToneScale(self.name, self.classes, metric, self.params)

    def __getitem__(self, name):
        for c in self.classes:
            if c.name == name:
                return c
        raise KeyError(name)


@dataclass(frozen=True)
class UndertoneRefs:
    warm: LabColor = field(default_factory=lambda: LabColor(70.0, 20.0, 40.0))
    cool: LabColor = field(default_factory=lambda: LabColor(60.0, -20.0, -30.0))

    def __post_init__(self):
        if self.warm == self.cool:
            raise ValueError("warm and cool references must differ")


def _check_unique(classes, scale_name):
    seen = set()
    for c in classes:
        if c.name in seen:
            raise ScaleFormatError(f"duplicate class name {c.name!r} in scale {scale_name!r}")
        seen.add(c.name)
        if c.subclasses:
            _check_unique(c.subclasses, f"{scale_name}/{c.name}")


def _parse_lab(value, where):
    if not isinstance(value, (list, tuple)) or len(value) != 3:
        raise ScaleFormatError(f"{where}: 'lab' must be a list of three numbers")
    try:
        l, a, b = (float(v) for v in value)  # noqa: E741
    except (TypeError, ValueError):
        raise ScaleFormatError(f"{where}: 'lab' entries must be numbers") from None
    if not 0.0 <= l <= 100.0:
        raise ScaleFormatError(f"{where}: lightness {l} outside [0, 100]")
    return LabColor(l, a, b)


def _parse_class(obj, where):
    if not isinstance(obj, dict):
        raise ScaleFormatError(f"{where}: class entry must be an object")
    name = obj.get("name")
    if not isinstance(name, str) or not name:
        raise ScaleFormatError(f"{where}: missing or empty 'name'")
    where = f"{where} ({name!r})"
    subs = ()
    if "subclasses" in obj:
        raw = obj["subclasses"]
        if not isinstance(raw, list) or not raw:
            raise ScaleFormatError(f"{where}: 'subclasses' must be a non-empty list")
        subs = tuple(_parse_class(s, f"{where}.subclasses[{i}]") for i, s in enumerate(raw))
    if "lab" in obj:
        ref = _parse_lab(obj["lab"], where)
    elif subs:
        ref = LabColor.from_array(np.mean([s.reference.as_tuple() for s in subs], axis=0))
    else:
        raise ScaleFormatError(f"{where}: missing 'lab'")
    return ToneClass(name, ref, subs)


def parse_tone_scale(doc, source="<scale>"):
    if not isinstance(doc, dict):
        raise ScaleFormatError(f"{source}: top level must be an object")
    classes = doc.get("classes")
    if not isinstance(classes, list):
        raise ScaleFormatError(f"{source}: 'classes' must be a list")
    parsed = tuple(_parse_class(c, f"{source}: classes[{i}]") for i, c in enumerate(classes))
    try:
        metric = DistanceMetric.parse(doc.get("metric", "ciede2000"))
    except ValueError as exc:
        raise ScaleFormatError(f"{source}: {exc}") from None
    return ToneScale(str(doc.get("name", Path(source).stem)), parsed, metric)


def load_tone_scale(path) -> ToneScale:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScaleFormatError(f"cannot read scale file {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScaleFormatError(
            f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from None
    return parse_tone_scale(doc, str(path))


def scale_path(name):
    """Location of a bundled scale, honouring ``CHROMATONE_SCALE_DIR``."""
    override = os.environ.get(SCALE_DIR_ENV)
    if override:
        return Path(override) / f"{name}.json"
    return Path(str(resources.files("chromatone") / "scales" / f"{name}.json"))


def bundled_scale(name) -> ToneScale:
    return load_tone_scale(scale_path(name))


def undertone_refs_from_scale(scale: ToneScale) -> UndertoneRefs:
    names = sorted(scale.names)
    if names != ["Cool", "Warm"]:
        raise ScaleFormatError(
            f"undertone scale must have exactly the classes 'Warm' and 'Cool', got {scale.names}"
        )
    return UndertoneRefs(warm=scale["Warm"].reference, cool=scale["Cool"].reference)


def load_undertone_refs(path=None) -> UndertoneRefs:
    return undertone_refs_from_scale(
        load_tone_scale(path) if path else bundled_scale("undertone")
    )


def pair_classes(scale: ToneScale) -> ToneScale:
    """Group consecutive classes in pairs as main classes for two-stage matching.

    Each main class references the LAB mean of its two members; an odd last
    class forms a main class on its own.
    """
    mains = []
    for i in range(0, len(scale.classes), 2):
        members = scale.classes[i : i + 2]
        ref = LabColor.from_array(np.mean([m.reference.as_tuple() for m in members], axis=0))
        mains.append(ToneClass("+".join(m.name for m in members), ref, tuple(members)))
    return ToneScale(f"{scale.name}-paired", mains, scale.metric, scale.params)
