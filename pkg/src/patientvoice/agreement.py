"""Inter-annotator agreement: pairwise precision/recall/F1 and Cohen's kappa.

Each unordered annotator pair is scored once, with the lexicographically
smaller annotator id acting as the reference side. Kappa is symmetric, so
the orientation only affects precision and recall.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, Sequence

from patientvoice.corpus import LABELS, Label


class UnscorablePairError(ValueError):
    """Raised when a pair (or a whole collection) has no co-annotated posts."""


@dataclass(frozen=True)
class AnnotationRecord:
    post_id: str
    annotator_id: str
    label: Label


@dataclass(frozen=True)
class ConfusionTable:
    """2x2 counts; rows are the reference labels, columns the comparison's.

    Class order is (PATIENT_VOICE, NOT_RELEVANT) on both axes.
    """

    counts: tuple[tuple[int, int], tuple[int, int]]

    def __post_init__(self) -> None:
        rows = tuple(tuple(int(c) for c in row) for row in self.counts)
        if len(rows) != 2 or any(len(row) != 2 for row in rows):
            raise ValueError("confusion table must be 2x2")
        if any(c < 0 for row in rows for c in row):
            raise ValueError("confusion counts must be non-negative")
        object.__setattr__(self, "counts", rows)

    @property
    def total(self) -> int:
        return sum(sum(row) for row in self.counts)

    @property
    def row_totals(self) -> tuple[int, int]:
        return tuple(sum(row) for row in self.counts)

    @property
    def col_totals(self) -> tuple[int, int]:
        return tuple(sum(row[j] for row in self.counts) for j in range(2))

    @property
    def diagonal(self) -> int:
        return self.counts[0][0] + self.counts[1][1]

    def transpose(self) -> "ConfusionTable":
        c = self.counts
        return ConfusionTable(((c[0][0], c[1][0]), (c[0][1], c[1][1])))


@dataclass(frozen=True)
class PairMetrics:
    """Per-class and averaged precision/recall/F1 for one confusion table.

    Ratios that come out 0/0 are reported as 0 and listed in ``degenerate``
    as "metric:class" strings, keeping macro averages total.
    """

    per_class_precision: Mapping[Label, float]
    per_class_recall: Mapping[Label, float]
    per_class_f1: Mapping[Label, float]
    weighted_precision: float
    weighted_recall: float
    weighted_f1: float
    macro_precision: float
    macro_recall: float
    macro_f1: float
    degenerate: tuple[str, ...]


@dataclass(frozen=True)
class PairwiseAgreement:
    annotator_a: str
    annotator_b: str
    metrics: PairMetrics
    kappa: float
    n_items: int


@dataclass(frozen=True)
class AgreementReport:
    pairs: tuple[PairwiseAgreement, ...]
    mean_weighted: tuple[float, float, float]
    mean_macro: tuple[float, float, float]
    mean_kappa: float


def confusion(records: Sequence[AnnotationRecord], a: str, b: str) -> ConfusionTable:
    """Confusion table over posts annotated by both a and b.

    Posts seen by only one of the two are excluded. Raises
    UnscorablePairError when there is no co-annotated post.
    """
    by_annotator: dict[str, dict[str, Label]] = {a: {}, b: {}}
    for record in records:
        if record.annotator_id not in by_annotator:
            continue
        labels = by_annotator[record.annotator_id]
        if record.post_id in labels:
            raise ValueError(
                f"duplicate annotation for post {record.post_id!r} "
                f"by annotator {record.annotator_id!r}"
            )
        labels[record.post_id] = record.label
    shared = sorted(set(by_annotator[a]) & set(by_annotator[b]))
    if not shared:
        raise UnscorablePairError(f"pair not scorable: {a!r} and {b!r} share no posts")
    counts = [[0, 0], [0, 0]]
    for post_id in shared:
        i = LABELS.index(by_annotator[a][post_id])
        j = LABELS.index(by_annotator[b][post_id])
        counts[i][j] += 1
    return ConfusionTable(tuple(tuple(row) for row in counts))


def _safe_ratio(num: int, den: int, flag: str, flags: list[str]) -> float:
    if den == 0:
        flags.append(flag)
        return 0.0
    return num / den


def pair_metrics(table: ConfusionTable) -> PairMetrics:
    if table.total == 0:
        raise ValueError("cannot score an empty confusion table")
    flags: list[str] = []
    precision: dict[Label, float] = {}
    recall: dict[Label, float] = {}
    f1: dict[Label, float] = {}
    rows, cols = table.row_totals, table.col_totals
    for i, label in enumerate(LABELS):
        correct = table.counts[i][i]
        precision[label] = _safe_ratio(correct, cols[i], f"precision:{label.value}", flags)
        recall[label] = _safe_ratio(correct, rows[i], f"recall:{label.value}", flags)
        denom = precision[label] + recall[label]
        if denom == 0.0:
            flags.append(f"f1:{label.value}")
            f1[label] = 0.0
        else:
            f1[label] = 2.0 * precision[label] * recall[label] / denom
    n = table.total
    weighted = tuple(
        sum(rows[i] * metric[label] for i, label in enumerate(LABELS)) / n
        for metric in (precision, recall, f1)
    )
    macro = tuple(
        sum(metric[label] for label in LABELS) / len(LABELS)
        for metric in (precision, recall, f1)
    )
    return PairMetrics(
        per_class_precision=precision,
        per_class_recall=recall,
        per_class_f1=f1,
        weighted_precision=weighted[0],
        weighted_recall=weighted[1],
        weighted_f1=weighted[2],
        macro_precision=macro[0],
        macro_recall=macro[1],
        macro_f1=macro[2],
        degenerate=tuple(flags),
    )


def cohens_kappa(table: ConfusionTable) -> float:
    """Chance-corrected agreement: (p_o - p_e) / (1 - p_e).

    p_o is the observed agreement rate, p_e the agreement expected from the
    two annotators' marginal label rates. When both annotators are constant
    and identical (p_e = 1) agreement is perfect and kappa is 1.
    """
    n = table.total
    if n == 0:
        raise ValueError("cannot score an empty confusion table")
    rows, cols = table.row_totals, table.col_totals
    pe_numerator = sum(rows[i] * cols[i] for i in range(2))
    if pe_numerator == n * n:
        return 1.0
    p_o = table.diagonal / n
    p_e = pe_numerator / (n * n)
    return (p_o - p_e) / (1.0 - p_e)


def score_pair(records: Sequence[AnnotationRecord], a: str, b: str) -> PairwiseAgreement:
    """Full agreement record for one annotator pair (a as reference)."""
    table = confusion(records, a, b)
    return PairwiseAgreement(
        annotator_a=a,
        annotator_b=b,
        metrics=pair_metrics(table),
        kappa=cohens_kappa(table),
        n_items=table.total,
    )


def score_all_pairs(records: Sequence[AnnotationRecord]) -> list[PairwiseAgreement]:
    """Score every annotator pair that shares at least one post.

    Pair orientation follows lexicographic order of annotator ids. Raises
    UnscorablePairError when no pair at all is scorable.
    """
    annotators = sorted({r.annotator_id for r in records})
    pairs = []
    for a, b in itertools.combinations(annotators, 2):
        try:
            pairs.append(score_pair(records, a, b))
        except UnscorablePairError:
            continue
    if not pairs:
        raise UnscorablePairError("no scorable annotator pair in the collection")
    return pairs


def aggregate(pairs: Sequence[PairwiseAgreement]) -> AgreementReport:
    """Arithmetic means of the pairwise metrics across scorable pairs."""
    if not pairs:
        raise ValueError("cannot aggregate an empty pair list")
    n = len(pairs)
    mean_weighted = (
        sum(p.metrics.weighted_precision for p in pairs) / n,
        sum(p.metrics.weighted_recall for p in pairs) / n,
        sum(p.metrics.weighted_f1 for p in pairs) / n,
    )
    mean_macro = (
        sum(p.metrics.macro_precision for p in pairs) / n,
        sum(p.metrics.macro_recall for p in pairs) / n,
        sum(p.metrics.macro_f1 for p in pairs) / n,
    )
    mean_kappa = sum(p.kappa for p in pairs) / n
    return AgreementReport(tuple(pairs), mean_weighted, mean_macro, mean_kappa)


def report_csv(report: AgreementReport) -> str:
    """Per-pair rows plus a summary row of the weighted/macro means."""
    lines = [
        "annotator_a,annotator_b,n_items,"
        "weighted_precision,weighted_recall,weighted_f1,"
        "macro_precision,macro_recall,macro_f1,kappa"
    ]
    for p in report.pairs:
        m = p.metrics
        lines.append(
            f"{p.annotator_a},{p.annotator_b},{p.n_items},"
            f"{m.weighted_precision:.6f},{m.weighted_recall:.6f},{m.weighted_f1:.6f},"
            f"{m.macro_precision:.6f},{m.macro_recall:.6f},{m.macro_f1:.6f},"
            f"{p.kappa:.6f}"
        )
    w, mac = report.mean_weighted, report.mean_macro
    total_items = sum(p.n_items for p in report.pairs)
    lines.append(
        f"mean,,{total_items},"
        f"{w[0]:.6f},{w[1]:.6f},{w[2]:.6f},"
        f"{mac[0]:.6f},{mac[1]:.6f},{mac[2]:.6f},"
        f"{report.mean_kappa:.6f}"
    )
    return "\n".join(lines) + "\n"
