"""Test-set metrics and the three experiment protocols.

Experiment drivers train one classifier per dataset (or per combination of
datasets) and per embeddings mode, evaluate on the matching test sets, and
emit report tables with best-per-cell markers. The headline metric triple
reported in tables is the PatientVoice-class precision/recall/F1 by default;
macro or weighted triples can be selected instead.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence, Union

from patientvoice import classifier as clf
from patientvoice.agreement import ConfusionTable, pair_metrics
from patientvoice.corpus import (
    COMBINED,
    LABELS,
    DatasetKey,
    Label,
    LabeledPost,
    SplitBundle,
)
from patientvoice.ingestion import combine_bundles
from patientvoice.similarity import CombinationPlan

HEADLINES = ("patient_voice", "macro", "weighted")

ModelRegistry = dict[tuple[DatasetKey, str], clf.ClassifierModel]


@dataclass(frozen=True)
class EvalResult:
    classifier_key: DatasetKey
    test_key: DatasetKey
    mode: str
    per_class_precision: Mapping[Label, float]
    per_class_recall: Mapping[Label, float]
    per_class_f1: Mapping[Label, float]
    weighted_precision: float
    weighted_recall: float
    weighted_f1: float
    macro_precision: float
    macro_recall: float
    macro_f1: float
    support: Mapping[Label, int]
    degenerate: tuple[str, ...]

    def headline(self, which: str = "patient_voice") -> tuple[float, float, float]:
        if which == "patient_voice":
            pv = Label.PATIENT_VOICE
            return (
                self.per_class_precision[pv],
                self.per_class_recall[pv],
                self.per_class_f1[pv],
            )
        if which == "macro":
            return (self.macro_precision, self.macro_recall, self.macro_f1)
        if which == "weighted":
            return (self.weighted_precision, self.weighted_recall, self.weighted_f1)
        raise ValueError(f"unknown headline metric {which!r}")


@dataclass(frozen=True)
class ComparisonRow:
    test_key: DatasetKey
    classifier_key: DatasetKey
    mode: str
    precision: float
    recall: float
    f1: float
    best_precision: bool = False
    best_recall: bool = False
    best_f1: bool = False


@dataclass(frozen=True)
class ComparisonTable:
    rows: tuple[ComparisonRow, ...]
    headline: str = "patient_voice"


def evaluate(
    model: clf.ClassifierModel,
    test: Sequence[LabeledPost],
    test_key: Optional[DatasetKey] = None,
    mode: Optional[str] = None,
) -> EvalResult:
    """Standard per-class precision/recall/F1 from the gold-vs-predicted
    confusion table (gold labels on rows, predictions on columns)."""
    if not test:
        raise ValueError("cannot evaluate on an empty test set")
    counts = [[0, 0], [0, 0]]
    support = {label: 0 for label in LABELS}
    for lp in test:
        gold = LABELS.index(lp.label)
        predicted = LABELS.index(clf.predict(model, lp.post).label)
        counts[gold][predicted] += 1
        support[lp.label] += 1
    metrics = pair_metrics(ConfusionTable(tuple(tuple(row) for row in counts)))
    return EvalResult(
        classifier_key=model.trained_on or DatasetKey.all_data(),
        test_key=test_key or model.trained_on or DatasetKey.all_data(),
        mode=mode or model.embeddings.provenance,
        per_class_precision=metrics.per_class_precision,
        per_class_recall=metrics.per_class_recall,
        per_class_f1=metrics.per_class_f1,
        weighted_precision=metrics.weighted_precision,
        weighted_recall=metrics.weighted_recall,
        weighted_f1=metrics.weighted_f1,
        macro_precision=metrics.macro_precision,
        macro_recall=metrics.macro_recall,
        macro_f1=metrics.macro_f1,
        support=support,
        degenerate=metrics.degenerate,
    )


def _check_testable(bundle: SplitBundle) -> None:
    if not bundle.test:
        raise ValueError(f"bundle {bundle.key.name()} has an empty test partition")


def experiment_specific(
    bundles: Sequence[SplitBundle],
    config: clf.TrainingConfig,
    modes: Sequence[clf.EmbeddingsMode],
    registry: Optional[ModelRegistry] = None,
) -> list[EvalResult]:
    """One classifier per dataset per embeddings mode, each evaluated on its
    own test set."""
    for bundle in bundles:
        _check_testable(bundle)
    results = []
    for bundle in sorted(bundles, key=lambda b: (b.key.source, b.key.domain)):
        for mode in modes:
            model = clf.train(bundle.train, bundle.validation, config, mode, trained_on=bundle.key)
            if registry is not None:
                registry[(bundle.key, mode.kind)] = model
            results.append(evaluate(model, bundle.test, test_key=bundle.key, mode=mode.kind))
    return results


def combined_key_for(members: Sequence[DatasetKey]) -> DatasetKey:
    """Key for a merged dataset: the shared axis is kept, the other is
    COMBINED; fully heterogeneous groups map to the all-data key."""
    sources = {key.source for key in members}
    domains = {key.domain for key in members}
    source = sources.pop() if len(sources) == 1 else COMBINED
    domain = domains.pop() if len(domains) == 1 else COMBINED
    return DatasetKey(source, domain)


def standard_groupings(
    keys: Sequence[DatasetKey],
) -> list[tuple[DatasetKey, list[DatasetKey]]]:
    """Per-domain, per-source and all-data groupings over specific keys."""
    keys = sorted(set(keys), key=lambda k: (k.source, k.domain))
    groupings: list[tuple[DatasetKey, list[DatasetKey]]] = []
    for domain in sorted({k.domain for k in keys}):
        members = [k for k in keys if k.domain == domain]
        groupings.append((DatasetKey(COMBINED, domain), members))
    for source in sorted({k.source for k in keys}):
        members = [k for k in keys if k.source == source]
        groupings.append((DatasetKey(source, COMBINED), members))
    groupings.append((DatasetKey.all_data(), list(keys)))
    return groupings


def groupings_from_plan(
    plan: CombinationPlan,
) -> list[tuple[DatasetKey, list[DatasetKey]]]:
    groupings = []
    for merge in plan.merges:
        members = sorted(merge, key=lambda k: (k.source, k.domain))
        groupings.append((combined_key_for(members), members))
    return groupings


Groupings = Union[CombinationPlan, Sequence[tuple[DatasetKey, Sequence[DatasetKey]]]]


def experiment_combined(
    bundles: Sequence[SplitBundle],
    groupings: Groupings,
    config: clf.TrainingConfig,
    modes: Sequence[clf.EmbeddingsMode],
    registry: Optional[ModelRegistry] = None,
) -> list[EvalResult]:
    """Train on merged bundles (per grouping, per mode) and evaluate each on
    its merged test set. Groupings may overlap; results stay keyed by the
    grouping's combined key."""
    if isinstance(groupings, CombinationPlan):
        groupings = groupings_from_plan(groupings)
    by_key = {bundle.key: bundle for bundle in bundles}
    results = []
    for new_key, members in groupings:
        missing = [key for key in members if key not in by_key]
        if missing:
            names = ", ".join(key.name() for key in missing)
            raise ValueError(f"grouping {new_key.name()} references unknown bundles: {names}")
        combined = combine_bundles([by_key[key] for key in members], new_key)
        _check_testable(combined)
        for mode in modes:
            model = clf.train(combined.train, combined.validation, config, mode, trained_on=new_key)
            if registry is not None:
                registry[(new_key, mode.kind)] = model
            results.append(evaluate(model, combined.test, test_key=new_key, mode=mode.kind))
    return results


def _applicable_classifiers(key: DatasetKey) -> list[DatasetKey]:
    return [
        key,
        DatasetKey(COMBINED, key.domain),
        DatasetKey(key.source, COMBINED),
        DatasetKey.all_data(),
    ]


def experiment_cross(
    bundles: Sequence[SplitBundle],
    registry: ModelRegistry,
    modes: Sequence[clf.EmbeddingsMode],
    headline: str = "patient_voice",
) -> ComparisonTable:
    """Evaluate, on every specific test set, each classifier whose train data
    contains that dataset: the specific, domain-combined, source-combined and
    all-data models. Best precision/recall/F1 are marked per test set per
    mode; ties are all marked."""
    if headline not in HEADLINES:
        raise ValueError(f"unknown headline metric {headline!r}")
    rows: list[ComparisonRow] = []
    for bundle in sorted(bundles, key=lambda b: (b.key.source, b.key.domain)):
        _check_testable(bundle)
        for mode in modes:
            for classifier_key in _applicable_classifiers(bundle.key):
                model = registry.get((classifier_key, mode.kind))
                if model is None:
                    raise ValueError(
                        f"missing model for classifier {classifier_key.name()} "
                        f"mode {mode.kind} on test set {bundle.key.name()}"
                    )
                result = evaluate(model, bundle.test, test_key=bundle.key, mode=mode.kind)
                precision, recall, f1 = result.headline(headline)
                rows.append(
                    ComparisonRow(
                        test_key=bundle.key,
                        classifier_key=classifier_key,
                        mode=mode.kind,
                        precision=precision,
                        recall=recall,
                        f1=f1,
                    )
                )
    return ComparisonTable(rows=tuple(_mark_best(rows)), headline=headline)


def _mark_best(rows: Sequence[ComparisonRow]) -> list[ComparisonRow]:
    groups: dict[tuple[DatasetKey, str], list[ComparisonRow]] = {}
    for row in rows:
        groups.setdefault((row.test_key, row.mode), []).append(row)
    marked = []
    for row in rows:
        group = groups[(row.test_key, row.mode)]
        marked.append(
            ComparisonRow(
                test_key=row.test_key,
                classifier_key=row.classifier_key,
                mode=row.mode,
                precision=row.precision,
                recall=row.recall,
                f1=row.f1,
                best_precision=row.precision == max(r.precision for r in group),
                best_recall=row.recall == max(r.recall for r in group),
                best_f1=row.f1 == max(r.f1 for r in group),
            )
        )
    return marked


# ---------------------------------------------------------------------------
# Report rendering
# ---------------------------------------------------------------------------

def _result_rows(results: Sequence[EvalResult], headline: str):
    """(test, classifier, mode, p, r, f1, best flags) rows for EvalResults,
    best-marked per (test_key, metric) across the rows sharing a test set."""
    triples = []
    for result in results:
        precision, recall, f1 = result.headline(headline)
        triples.append((result, precision, recall, f1))
    by_test: dict[DatasetKey, list[tuple]] = {}
    for entry in triples:
        by_test.setdefault(entry[0].test_key, []).append(entry)
    rows = []
    for result, precision, recall, f1 in triples:
        group = by_test[result.test_key]
        rows.append(
            ComparisonRow(
                test_key=result.test_key,
                classifier_key=result.classifier_key,
                mode=result.mode,
                precision=precision,
                recall=recall,
                f1=f1,
                best_precision=precision == max(e[1] for e in group),
                best_recall=recall == max(e[2] for e in group),
                best_f1=f1 == max(e[3] for e in group),
            )
        )
    return rows


def _sorted_rows(rows: Sequence[ComparisonRow]) -> list[ComparisonRow]:
    return sorted(
        rows,
        key=lambda r: (
            (r.test_key.source, r.test_key.domain),
            (r.classifier_key.source, r.classifier_key.domain),
            r.mode,
        ),
    )


def _format_cell(value: float, best: bool, fmt: str) -> str:
    text = f"{value:.6f}"
    if not best:
        return text
    return f"{text}*" if fmt == "csv" else f"**{text}**"


def render_report(
    results: Union[Sequence[EvalResult], ComparisonTable],
    fmt: str = "csv",
    headline: str = "patient_voice",
) -> str:
    """Render an experiment report; best cells carry '*' in CSV and bold in
    markdown. Row order is (test key, classifier key, mode)."""
    if fmt not in ("csv", "markdown"):
        raise ValueError(f"unknown report format {fmt!r}")
    if isinstance(results, ComparisonTable):
        rows = _sorted_rows(results.rows)
    else:
        if not results:
            raise ValueError("cannot render an empty result list")
        rows = _sorted_rows(_result_rows(results, headline))
    header = ("test_dataset", "classifier", "mode", "precision", "recall", "f1")
    lines = []
    if fmt == "csv":
        lines.append(",".join(header))
    else:
        lines.append("| " + " | ".join(header) + " |")
        lines.append("|" + "|".join([" --- "] * len(header)) + "|")
    for row in rows:
        cells = (
            row.test_key.name(),
            row.classifier_key.name(),
            row.mode,
            _format_cell(row.precision, row.best_precision, fmt),
            _format_cell(row.recall, row.best_recall, fmt),
            _format_cell(row.f1, row.best_f1, fmt),
        )
        if fmt == "csv":
            lines.append(",".join(cells))
        else:
            lines.append("| " + " | ".join(cells) + " |")
    return "\n".join(lines) + "\n"
