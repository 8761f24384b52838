"""Confusion matrices, classification metrics and labelled-corpus evaluation."""

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ChromatoneError, ManifestError

REPORT_HEADER = (
    "path",
    "truth",
    "predicted",
    "distance",
    "dominant_l",
    "dominant_a",
    "dominant_b",
    "cluster_share",
    "status",
)


class ConfusionMatrix:
    """``counts[i, j]`` = instances of true class i predicted as class j."""

    def __init__(self, labels, counts=None):
        self.labels = list(labels)
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("labels must be unique")
        self._index = {name: i for i, name in enumerate(self.labels)}
        n = len(self.labels)
        if counts is None:
            counts = np.zeros((n, n), dtype=np.int64)
        counts = np.array(counts, dtype=np.int64)
        if counts.shape != (n, n):
            raise ValueError(f"counts must be {n}x{n}, got {counts.shape}")
        if np.any(counts < 0):
            raise ValueError("counts must be nonnegative")
        self.counts = counts

    def record(self, truth, predicted):
        for name in (truth, predicted):
            if name not in self._index:
                raise KeyError(f"unknown label {name!r}")
        self.counts[self._index[truth], self._index[predicted]] += 1
        return self

    @property
    def total(self):
        return int(self.counts.sum())

    def __repr__(self):
        return f"ConfusionMatrix(labels={self.labels!r}, total={self.total})"


@dataclass(frozen=True)
class ClassMetrics:
    tp: int
    fp: int
    fn: int
    tn: int
    accuracy: float
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class MetricsReport:
    accuracy: float
    per_class: dict
    macro_precision: float
    macro_recall: float
    macro_f1: float
    macro_accuracy: float


def _ratio(num, den):
    return num / den if den else 0.0


def metrics(cm: ConfusionMatrix) -> MetricsReport:
    """One-vs-rest counts per class, macro (unweighted) averages and overall accuracy.

    Zero denominators give 0 for precision and recall.
    """
    total = cm.total
    if total == 0 or not cm.labels:
        raise ValueError("metrics need a non-empty confusion matrix")
    c = cm.counts
    per_class = {}
    for i, name in enumerate(cm.labels):
        tp = int(c[i, i])
        fp = int(c[:, i].sum()) - tp
        fn = int(c[i, :].sum()) - tp
        tn = total - tp - fp - fn
        p = _ratio(tp, tp + fp)
        r = _ratio(tp, tp + fn)
        f1 = _ratio(2 * p * r, p + r)
        per_class[name] = ClassMetrics(tp, fp, fn, tn, (tp + tn) / total, p, r, f1)
    vals = list(per_class.values())
    return MetricsReport(
        accuracy=float(np.trace(c)) / total,
        per_class=per_class,
        macro_precision=sum(m.precision for m in vals) / len(vals),
        macro_recall=sum(m.recall for m in vals) / len(vals),
        macro_f1=sum(m.f1 for m in vals) / len(vals),
        macro_accuracy=sum(m.accuracy for m in vals) / len(vals),
    )


def format_metrics(report: MetricsReport, failures=0):
    lines = [f"accuracy: {report.accuracy:.4f}"]
    lines.append(
        f"macro precision: {report.macro_precision:.4f}  "
        f"recall: {report.macro_recall:.4f}  f1: {report.macro_f1:.4f}"
    )
    lines.append(f"failures: {failures}")
    width = max(len("class"), *(len(n) for n in report.per_class))
    lines.append(f"{'class':<{width}}  precision  recall  f1      support")
    for name, m in report.per_class.items():
        lines.append(
            f"{name:<{width}}  {m.precision:9.4f}  {m.recall:6.4f}  {m.f1:6.4f}  {m.tp + m.fn:7d}"
        )
    return "\n".join(lines)


@dataclass(frozen=True)
class ManifestRow:
    path: Path
    label: str
    mask_path: Path = None
    landmarks_path: Path = None
    source: str = ""


def read_manifest(path):
    """Parse a ``path,label[,mask_path][,landmarks_path]`` CSV.

    Relative paths are resolved against the manifest's directory.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc}") from exc
    reader = csv.DictReader(io.StringIO(text))
    if not reader.fieldnames or not {"path", "label"} <= set(reader.fieldnames):
        raise ManifestError(f"{path}: header must start with 'path,label'")
    base = path.parent

    def resolve(value):
        if not value:
            return None
        p = Path(value)
        return p if p.is_absolute() else base / p

    rows = []
    for row in reader:
        rows.append(
            ManifestRow(
                resolve(row["path"]),
                row["label"],
                resolve(row.get("mask_path")),
                resolve(row.get("landmarks_path")),
                row["path"],
            )
        )
    return rows


def _fmt(value):
    return "" if value is None else f"{value:.6f}"


@dataclass
class CorpusResult:
    matrix: ConfusionMatrix
    rows: list
    failures: int

    def report_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(REPORT_HEADER)
        writer.writerows(self.rows)
        return buf.getvalue()

    def write_report(self, path):
        Path(path).write_text(self.report_csv(), encoding="utf-8")


def evaluate_corpus(manifest, classify_row, labels, jobs=1) -> CorpusResult:
    """Classify every manifest row and accumulate a confusion matrix.

    ``classify_row`` maps a :class:`ManifestRow` to a ``Classification``.
    Rows that raise a chromatone error, or whose truth label is not one of
    ``labels``, are reported as failures and left out of the matrix.
    """
    rows = read_manifest(manifest) if not isinstance(manifest, list) else manifest
    cm = ConfusionMatrix(labels)

    def run(row):
        try:
            return classify_row(row), None
        except ChromatoneError as exc:
            return None, exc

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(run, rows))
    else:
        outcomes = [run(row) for row in rows]

    report = []
    failures = 0
    for row, (result, err) in zip(rows, outcomes):
        if err is None and row.label not in cm._index:
            err = ManifestError(f"truth label {row.label!r} is not a known class")
        if err is not None:
            failures += 1
            status = f"error: {err}".replace("\n", " ")
            report.append([row.source or str(row.path), row.label, "", "", "", "", "", "", status])
            continue
        cm.record(row.label, result.label)
        dom = result.dominant
        share = result.metadata.get("cluster_share")
        report.append(
            [
                row.source or str(row.path),
                row.label,
                result.label,
                _fmt(result.distance),
                _fmt(dom.l),
                _fmt(dom.a),
                _fmt(dom.b),
                _fmt(share),
                "ok",
            ]
        )
    return CorpusResult(cm, report, failures)
