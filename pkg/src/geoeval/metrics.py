"""Geotagging and geocoding metric suite.

Geotagging is scored with precision/recall/F over matched spans (exact or
overlap matching). Geocoding is scored over the great-circle errors of the
geotagging true positives with three complementary metrics: mean error,
accuracy@X km, and the area under the log-scaled error curve (AUC), plus
the median for reference. AUC uses ln(1 + x) rather than a bare logarithm
so that zero-error resolutions integrate to zero instead of diverging; the
normaliser ln(1 + 20039) keeps the all-worst-case distribution at exactly
1.0.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional, Sequence

from .corpus import PredictionRecord, ToponymAnnotation
from .geodesy import MAX_ERROR_KM, great_circle_distance
from .stats import StatTestResult

DEFAULT_THRESHOLD_KM = 161.0

_LOG_MAX = math.log1p(MAX_ERROR_KM)

GoldSpan = tuple[str, ToponymAnnotation]
MatchedPair = tuple[GoldSpan, PredictionRecord]


class MatchMode(Enum):
    EXACT = "exact"
    OVERLAP = "overlap"


@dataclass(frozen=True)
class TaggingCounts:
    tp: int
    fp: int
    fn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.fn) < 0:
            raise ValueError("counts must be non-negative")

    @property
    def n_gold(self) -> int:
        return self.tp + self.fn

    @property
    def n_predicted(self) -> int:
        return self.tp + self.fp


@dataclass
class SpanMatchResult:
    counts: TaggingCounts
    pairs: list[MatchedPair]


def match_spans(
    gold: Sequence[GoldSpan],
    pred: Sequence[PredictionRecord],
    mode: MatchMode = MatchMode.EXACT,
) -> SpanMatchResult:
    """Greedily match gold spans to predictions within each document.

    Gold spans are visited left to right; each takes the unmatched
    prediction with the largest overlap (exact mode requires identical
    offsets). Every gold span matches at most one prediction and vice
    versa. Unmatched predictions are false positives, unmatched gold
    spans false negatives.
    """
    pred_by_doc: dict[str, list[PredictionRecord]] = defaultdict(list)
    for rec in pred:
        pred_by_doc[rec.doc_id].append(rec)
    gold_by_doc: dict[str, list[GoldSpan]] = defaultdict(list)
    for doc_id, ann in gold:
        gold_by_doc[doc_id].append((doc_id, ann))

    pairs: list[MatchedPair] = []
    for doc_id, gold_here in gold_by_doc.items():
        candidates = sorted(pred_by_doc.get(doc_id, []), key=lambda r: (r.start, r.end))
        used = [False] * len(candidates)
        for gold_span in sorted(gold_here, key=lambda g: (g[1].start, g[1].end)):
            ann = gold_span[1]
            best_j = -1
            best_overlap = 0
            for j, rec in enumerate(candidates):
                if used[j]:
                    continue
                if mode is MatchMode.EXACT:
                    if rec.start == ann.start and rec.end == ann.end:
                        overlap = ann.end - ann.start
                    else:
                        continue
                else:
                    overlap = min(ann.end, rec.end) - max(ann.start, rec.start)
                    if overlap <= 0:
                        continue
                if overlap > best_overlap:
                    best_j, best_overlap = j, overlap
            if best_j >= 0:
                used[best_j] = True
                pairs.append((gold_span, candidates[best_j]))

    tp = len(pairs)
    counts = TaggingCounts(tp=tp, fp=len(pred) - tp, fn=len(gold) - tp)
    return SpanMatchResult(counts=counts, pairs=pairs)


@dataclass(frozen=True)
class FScore:
    precision: float
    recall: float
    f: float
    degenerate: bool = False  # a denominator was zero


def f_from_precision_recall(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def f_score(counts: TaggingCounts) -> FScore:
    """Precision, recall and their harmonic mean; zero denominators give 0."""
    degenerate = counts.n_predicted == 0 or counts.n_gold == 0
    precision = counts.tp / counts.n_predicted if counts.n_predicted else 0.0
    recall = counts.tp / counts.n_gold if counts.n_gold else 0.0
    return FScore(
        precision=precision,
        recall=recall,
        f=f_from_precision_recall(precision, recall),
        degenerate=degenerate,
    )


class ErrorDistribution:
    """Ascending geocoding errors in km; the input to all curve metrics."""

    __slots__ = ("errors",)

    def __init__(self, errors: Iterable[float]):
        values = sorted(float(e) for e in errors)
        for e in values:
            if not math.isfinite(e) or e < 0 or e > MAX_ERROR_KM:
                raise ValueError(f"error {e} outside [0, {MAX_ERROR_KM}]")
        self.errors = tuple(values)

    @property
    def n(self) -> int:
        return len(self.errors)

    def __len__(self) -> int:
        return len(self.errors)

    def __iter__(self):
        return iter(self.errors)

    def __eq__(self, other):
        return isinstance(other, ErrorDistribution) and self.errors == other.errors

    def __repr__(self):
        return f"ErrorDistribution(n={self.n})"


def _require_nonempty(dist: ErrorDistribution) -> None:
    if dist.n == 0:
        raise ValueError("metric undefined for an empty error distribution")


def mean_error(dist: ErrorDistribution) -> float:
    _require_nonempty(dist)
    return math.fsum(dist.errors) / dist.n


def median_error(dist: ErrorDistribution) -> float:
    _require_nonempty(dist)
    mid = dist.n // 2
    if dist.n % 2:
        return dist.errors[mid]
    return (dist.errors[mid - 1] + dist.errors[mid]) / 2.0


def accuracy_at(dist: ErrorDistribution, threshold_km: float = DEFAULT_THRESHOLD_KM) -> float:
    """Fraction of errors within threshold_km (inclusive)."""
    _require_nonempty(dist)
    return bisect_right(dist.errors, threshold_km) / dist.n


def auc(dist: ErrorDistribution) -> float:
    """Normalised area under the log-scaled error curve, in [0, 1].

    Errors are sorted ascending, mapped through ln(1 + x), integrated by
    the trapezoid rule over the index axis and divided by the area of an
    all-worst-case curve. Lower is better: 0 means every error was zero.
    """
    _require_nonempty(dist)
    logs = [math.log1p(e) for e in dist.errors]
    if dist.n == 1:
        return logs[0] / _LOG_MAX
    area = math.fsum((logs[i] + logs[i + 1]) / 2.0 for i in range(dist.n - 1))
    return area / ((dist.n - 1) * _LOG_MAX)


def geocoding_errors(pairs: Iterable[MatchedPair]) -> tuple[ErrorDistribution, int]:
    """Great-circle error for every matched, resolved pair.

    Pairs missing either gold or predicted coordinates cannot be scored;
    they are counted (second return value) rather than silently dropped.
    """
    errors: list[float] = []
    unresolved = 0
    for (_, ann), rec in pairs:
        if ann.coord is None or rec.predicted_coord is None:
            unresolved += 1
            continue
        errors.append(great_circle_distance(rec.predicted_coord, ann.coord))
    return ErrorDistribution(errors), unresolved


@dataclass
class TaggingMetrics:
    precision: float
    recall: float
    f_score: float
    counts: TaggingCounts
    degenerate: bool = False


@dataclass
class GeocodingMetrics:
    mean_error_km: float
    median_error_km: float
    auc: float
    accuracy_at_km: dict[float, float]
    n_errors: int


@dataclass
class EvalReport:
    """Bundled metric values and counts for one system on one corpus."""

    dataset_id: str
    gazetteer_version: str
    n_gold: int = 0
    n_predicted: int = 0
    n_resolved: int = 0
    tagging: Optional[TaggingMetrics] = None
    geocoding: Optional[GeocodingMetrics] = None
    warnings: list[str] = field(default_factory=list)
    stat_tests: list[StatTestResult] = field(default_factory=list)


def tagging_metrics(counts: TaggingCounts) -> TaggingMetrics:
    score = f_score(counts)
    return TaggingMetrics(
        precision=score.precision,
        recall=score.recall,
        f_score=score.f,
        counts=counts,
        degenerate=score.degenerate,
    )


def geocoding_metrics(
    dist: ErrorDistribution,
    thresholds_km: Sequence[float] = (DEFAULT_THRESHOLD_KM,),
) -> GeocodingMetrics:
    return GeocodingMetrics(
        mean_error_km=mean_error(dist),
        median_error_km=median_error(dist),
        auc=auc(dist),
        accuracy_at_km={t: accuracy_at(dist, t) for t in thresholds_km},
        n_errors=dist.n,
    )


def render_report(report: EvalReport) -> str:
    """Machine-readable key/value report, one field per line."""
    lines = [
        f"dataset_id: {report.dataset_id}",
        f"gazetteer_version: {report.gazetteer_version}",
        f"n_gold: {report.n_gold}",
        f"n_predicted: {report.n_predicted}",
        f"n_resolved: {report.n_resolved}",
    ]
    if report.tagging is not None:
        t = report.tagging
        lines += [
            f"tp: {t.counts.tp}",
            f"fp: {t.counts.fp}",
            f"fn: {t.counts.fn}",
            f"precision: {t.precision:.6f}",
            f"recall: {t.recall:.6f}",
            f"f_score: {t.f_score:.6f}",
        ]
        if t.degenerate:
            lines.append("f_score_degenerate: true")
    if report.geocoding is not None:
        g = report.geocoding
        lines += [
            f"mean_error_km: {g.mean_error_km:.4f}",
            f"median_error_km: {g.median_error_km:.4f}",
            f"auc: {g.auc:.6f}",
        ]
        for threshold in sorted(g.accuracy_at_km):
            lines.append(f"accuracy_at_{threshold:g}km: {g.accuracy_at_km[threshold]:.6f}")
    for test in report.stat_tests:
        lines.append(
            f"stat_test: {test.name} statistic={test.statistic:.6g} "
            f"p={test.p_value:.6g} n={test.n}"
        )
    for warning in report.warnings:
        lines.append(f"warning: {warning}")
    return "\n".join(lines) + "\n"


def report_csv_header(thresholds_km: Sequence[float] = (DEFAULT_THRESHOLD_KM,)) -> str:
    columns = [
        "dataset_id",
        "gazetteer_version",
        "n_gold",
        "n_predicted",
        "n_resolved",
        "precision",
        "recall",
        "f_score",
        "mean_error_km",
        "median_error_km",
        "auc",
    ]
    columns += [f"acc_at_{t:g}km" for t in sorted(thresholds_km)]
    columns += ["test_name", "test_statistic", "test_p", "test_n"]
    return ",".join(columns)


def report_csv_row(report: EvalReport) -> str:
    """One flat CSV row per system x dataset, for tabulation."""

    def fmt(value) -> str:
        if value is None:
            return ""
        if isinstance(value, float):
            return f"{value:.6f}"
        return str(value)

    t = report.tagging
    g = report.geocoding
    cells = [
        report.dataset_id,
        report.gazetteer_version,
        fmt(report.n_gold),
        fmt(report.n_predicted),
        fmt(report.n_resolved),
        fmt(t.precision if t else None),
        fmt(t.recall if t else None),
        fmt(t.f_score if t else None),
        fmt(g.mean_error_km if g else None),
        fmt(g.median_error_km if g else None),
        fmt(g.auc if g else None),
    ]
    if g is not None:
        cells += [fmt(g.accuracy_at_km[t_km]) for t_km in sorted(g.accuracy_at_km)]
    test = report.stat_tests[0] if report.stat_tests else None
    cells += [
        test.name if test else "",
        fmt(test.statistic if test else None),
        fmt(test.p_value if test else None),
        fmt(test.n if test else None),
    ]
    return ",".join(cells)
