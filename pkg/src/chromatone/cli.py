"""``chromatone`` command-line interface.

Classification commands print one JSON object per run. Exit codes: 0 on
success, 2 for usage or input errors, 3 when the pipeline finds no usable
signal in otherwise valid input.
"""

import argparse
import json
import sys
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Optional

from . import fixtures
from .classify import (
    DEFAULT_CLOSE_RADIUS,
    classify_hair,
    classify_iris,
    classify_skin,
    classify_undertone,
    load_landmarks,
)
from .clustering import ClusterConfig
from .color import lab_to_rgb_checked, rgb_to_hsv
from .delta_e import DistanceMetric
from .errors import ChromatoneError, InputError, ManifestError, ScaleFormatError
from .evaluation import evaluate_corpus, format_metrics, metrics, read_manifest
from .imaging import (
    DEFAULT_KERNEL_DIVISOR,
    DEFAULT_SKIN_THRESHOLDS,
    DEFAULT_VEIN_THRESHOLDS,
    decode_image,
    load_mask,
)
from .scales import bundled_scale, load_tone_scale, load_undertone_refs, pair_classes

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_PIPELINE = 3

PIPELINES = ("skin", "skin2stage", "hair", "iris", "undertone")
_PIPELINE_SCALE = {"skin": "skin", "skin2stage": "skin2stage", "hair": "hair", "iris": "iris"}


@dataclass(frozen=True)
class RunConfig:
    seed: int = 42
    blur: bool = True
    kernel_divisor: int = DEFAULT_KERNEL_DIVISOR
    gamma: float = 1.0
    metric: Optional[str] = None  # None keeps the scale file's metric
    scale_path: Optional[str] = None
    thresholds_path: Optional[str] = None

    def __post_init__(self):
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ValueError(f"seed must be a nonnegative integer, got {self.seed!r}")
        if not isinstance(self.kernel_divisor, int) or self.kernel_divisor < 1:
            raise ValueError(f"kernel_divisor must be a positive integer, got {self.kernel_divisor!r}")
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma!r}")
        if self.metric is not None:
            object.__setattr__(self, "metric", DistanceMetric.parse(self.metric).value)

    @classmethod
    def from_json(cls, path):
        try:
            doc = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise InputError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
        if not isinstance(doc, dict):
            raise InputError(f"{path}: config must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(doc) - known)
        if unknown:
            raise InputError(f"{path}: unknown config keys {unknown}")
        return cls(**doc)


def run_config(args) -> RunConfig:
    cfg = RunConfig.from_json(args.config) if args.config else RunConfig()
    overrides = {}
    for name in ("seed", "kernel_divisor", "gamma", "metric", "scale_path", "thresholds_path"):
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = value
    if getattr(args, "no_blur", False):
        overrides["blur"] = False
    return replace(cfg, **overrides)


def load_thresholds(path):
    """Read ``{"skin": {...}, "vein": {...}}``; missing sections keep the defaults."""
    if path is None:
        return DEFAULT_SKIN_THRESHOLDS, DEFAULT_VEIN_THRESHOLDS
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise InputError(f"cannot read thresholds {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
    if not isinstance(doc, dict) or set(doc) - {"skin", "vein"}:
        raise InputError(f"{path}: expected an object with 'skin' and/or 'vein' sections")
    out = []
    for key, default in (("skin", DEFAULT_SKIN_THRESHOLDS), ("vein", DEFAULT_VEIN_THRESHOLDS)):
        section = doc.get(key)
        if section is None:
            out.append(default)
            continue
        try:
            out.append(replace(default, **{k: float(v) for k, v in section.items()}))
        except (TypeError, ValueError, AttributeError) as exc:
            raise InputError(f"{path}: bad '{key}' thresholds: {exc}") from None
    return tuple(out)


def load_scale(cfg: RunConfig, name):
    scale = load_tone_scale(cfg.scale_path) if cfg.scale_path else bundled_scale(name)
    if cfg.metric is not None:
        scale = scale.with_metric(cfg.metric)
    return scale


def _two_stage_scale(scale):
    if all(c.subclasses for c in scale.classes):
        return scale
    if any(c.subclasses for c in scale.classes):
        raise ScaleFormatError(f"scale {scale.name!r} mixes classes with and without subclasses")
    return pair_classes(scale)


def _result_json(result):
    meta = result.metadata
    hsv = meta.get("dominant_hsv")
    if hsv is None:
        rgb, _ = lab_to_rgb_checked(result.dominant)
        h = rgb_to_hsv(rgb)
        hsv = [int(round(h.h)) % 360, int(round(h.s * 255)), int(round(h.v * 255))]
    doc = {
        "label": result.label,
        "distance": result.distance,
        "dominant_hsv": hsv,
        "dominant_lab": list(result.dominant.as_tuple()),
        "cluster_share": meta.get("cluster_share"),
    }
    for key in ("warm_delta", "cool_delta", "main_class"):
        if key in meta:
            doc[key] = meta[key]
    return json.dumps(doc)


def _require(row, attr, what):
    value = getattr(row, attr)
    if value is None:
        raise ManifestError(f"{row.source or row.path}: pipeline needs a {what} column")
    return value


def row_classifier(pipeline, cfg: RunConfig, strategy="ciede2000", space="hsv"):
    """Return ``(classify_row, labels)`` for one of :data:`PIPELINES`."""
    cluster_cfg = ClusterConfig(seed=cfg.seed)
    if pipeline == "undertone":
        skin_t, vein_t = load_thresholds(cfg.thresholds_path)
        refs = load_undertone_refs(cfg.scale_path)

        def classify_row(row):
            return classify_undertone(
                decode_image(row.path), skin_t, vein_t, refs, DEFAULT_CLOSE_RADIUS, strategy
            )

        return classify_row, ["Warm", "Cool"]

    scale = load_scale(cfg, _PIPELINE_SCALE[pipeline])
    if pipeline in ("skin", "skin2stage"):
        two_stage = pipeline == "skin2stage"
        if two_stage:
            scale = _two_stage_scale(scale)

        def classify_row(row):
            img = decode_image(row.path)
            mask = load_mask(_require(row, "mask_path", "mask_path"), img)
            return classify_skin(
                img, mask, scale, cluster_cfg, cfg.blur, cfg.kernel_divisor, cfg.gamma, space, two_stage
            )

        labels = scale.leaf_names() if two_stage else scale.names
        return classify_row, labels

    if pipeline == "hair":

        def classify_row(row):
            img = decode_image(row.path)
            return classify_hair(img, load_mask(_require(row, "mask_path", "mask_path"), img), scale, cfg.seed)

        return classify_row, scale.names

    def classify_row(row):
        img = decode_image(row.path)
        return classify_iris(img, load_landmarks(_require(row, "landmarks_path", "landmarks_path")), scale)

    return classify_row, scale.names


def _single(pipeline, args, **row_fields):
    from .evaluation import ManifestRow

    cfg = run_config(args)
    classify_row, _ = row_classifier(
        pipeline, cfg, getattr(args, "strategy", "ciede2000"), getattr(args, "space", "hsv")
    )
    row = ManifestRow(Path(args.image), "", source=args.image, **row_fields)
    print(_result_json(classify_row(row)))
    return EXIT_OK


def cmd_skin(args):
    return _single("skin2stage" if args.two_stage else "skin", args, mask_path=Path(args.mask))


def cmd_hair(args):
    return _single("hair", args, mask_path=Path(args.mask))


def cmd_iris(args):
    return _single("iris", args, landmarks_path=Path(args.landmarks))


def cmd_undertone(args):
    return _single("undertone", args)


def cmd_evaluate(args):
    cfg = run_config(args)
    if args.jobs < 1:
        raise InputError("--jobs must be at least 1")
    classify_row, labels = row_classifier(args.pipeline, cfg, args.strategy, args.space)
    result = evaluate_corpus(read_manifest(args.manifest), classify_row, labels, args.jobs)
    if args.report:
        try:
            result.write_report(args.report)
        except OSError as exc:
            raise InputError(f"cannot write report {args.report}: {exc}") from exc
    if result.matrix.total == 0:
        print(f"no rows classified; failures: {result.failures}")
        return EXIT_PIPELINE
    print(format_metrics(metrics(result.matrix), result.failures))
    return EXIT_OK


def cmd_gen_fixtures(args):
    try:
        manifest = fixtures.generate(args.out, args.kind, args.count, args.noise, args.seed)
    except OSError as exc:
        raise InputError(f"cannot write fixtures to {args.out}: {exc}") from exc
    print(manifest)
    return EXIT_OK


def _add_run_options(p, metric=True):
    p.add_argument("--config", help="JSON file with RunConfig fields")
    p.add_argument("--seed", type=int, help="clustering seed (default 42)")
    p.add_argument("--no-blur", action="store_true", help="skip the Gaussian blur")
    p.add_argument("--kernel-divisor", type=int, dest="kernel_divisor")
    p.add_argument("--gamma", type=float)
    p.add_argument("--scale", dest="scale_path", help="tone scale JSON file")
    if metric:
        p.add_argument("--metric", choices=[m.value for m in DistanceMetric])


def build_parser():
    parser = argparse.ArgumentParser(prog="chromatone", description="Skin, hair, iris and undertone colour classification.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("skin", help="classify skin tone from an image and skin mask")
    p.add_argument("--image", required=True)
    p.add_argument("--mask", required=True)
    p.add_argument("--space", choices=("hsv", "rgb"), default="hsv")
    p.add_argument("--two-stage", action="store_true")
    _add_run_options(p)
    p.set_defaults(func=cmd_skin)

    p = sub.add_parser("hair", help="classify hair colour from an image and hair mask")
    p.add_argument("--image", required=True)
    p.add_argument("--mask", required=True)
    _add_run_options(p)
    p.set_defaults(func=cmd_hair)

    p = sub.add_parser("iris", help="classify iris colour from an image and 68 landmarks")
    p.add_argument("--image", required=True)
    p.add_argument("--landmarks", required=True)
    _add_run_options(p)
    p.set_defaults(func=cmd_iris)

    p = sub.add_parser("undertone", help="classify Warm/Cool undertone from a wrist image")
    p.add_argument("--image", required=True)
    p.add_argument("--thresholds", dest="thresholds_path")
    p.add_argument("--strategy", choices=("ciede2000", "cosine"), default="ciede2000")
    _add_run_options(p, metric=False)
    p.set_defaults(func=cmd_undertone)

    p = sub.add_parser("evaluate", help="evaluate a pipeline over a labelled manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--pipeline", required=True, choices=PIPELINES)
    p.add_argument("--report", help="write the per-row CSV report here")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--space", choices=("hsv", "rgb"), default="hsv")
    p.add_argument("--thresholds", dest="thresholds_path")
    p.add_argument("--strategy", choices=("ciede2000", "cosine"), default="ciede2000")
    _add_run_options(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("gen-fixtures", help="write a synthetic labelled corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--kind", required=True, choices=fixtures.KINDS)
    p.add_argument("--count", type=int, default=8)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=42)
    p.set_defaults(func=cmd_gen_fixtures)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse uses 0 for --help and 2 for usage errors
        return EXIT_OK if exc.code in (0, None) else EXIT_INPUT
    try:
        return args.func(args)
    except InputError as exc:
        print(f"chromatone: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ChromatoneError as exc:
        print(f"chromatone: {exc}", file=sys.stderr)
        return EXIT_PIPELINE
    except (ValueError, OSError) as exc:
        print(f"chromatone: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001
        print(f"chromatone: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PIPELINE


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
