"""Command-line entry point.

Subcommands wire the library end to end: ingest -> split -> similarity /
iaa / train -> eval -> compare, plus a synthetic-corpus generator used by
the test suite and for demos.

Exit codes: 0 success, 1 I/O failure, 2 input or configuration error,
3 unsatisfiable precondition, 4 numeric failure during training.

Every knob is available as a flag and as a key=value line in a config file
passed with --config; flags win over the file. Report files start with a
"# generated <timestamp>" line unless --no-timestamp is given; data and
model files are always timestamp-free.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional, Sequence

from patientvoice import classifier as clf
from patientvoice import evaluation, ingestion, similarity, synth
from patientvoice.agreement import UnscorablePairError, aggregate, report_csv, score_all_pairs
from patientvoice.corpus import (
    DEFAULT_DOMAINS,
    DEFAULT_SOURCES,
    LABELS,
    DatasetKey,
    Label,
    SplitBundle,
    label_counts,
    validate_bundle,
)
from patientvoice.ingestion import IngestError
from patientvoice.textprep import PrepConfig, TermSequence, prepare


class PlanError(ValueError):
    """Bad experiment plan, config file or command configuration."""


class PreconditionError(Exception):
    """Input is well-formed but the requested computation is undefined."""


# ---------------------------------------------------------------------------
# Small helpers
# ---------------------------------------------------------------------------

def _write_text(path: Path, body: str, timestamp: bool) -> None:
    """Atomic write (temp file + rename), optionally with a header line."""
    path.parent.mkdir(parents=True, exist_ok=True)
    header = ""
    if timestamp:
        stamp = datetime.now(timezone.utc).isoformat(timespec="seconds")
        header = f"# generated {stamp}\n"
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(header + body, encoding="utf-8")
    os.replace(tmp, path)


def parse_kv_file(path: Path) -> dict[str, str]:
    """key = value lines; '#' starts a comment, blank lines are skipped."""
    values: dict[str, str] = {}
    for line_no, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise PlanError(f"{path}: line {line_no}: expected 'key = value'")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    return values


def _setting(args, name: str, fallback, cast=str):
    """Resolution order: explicit flag > --config file entry > fallback."""
    flag_value = getattr(args, name, None)
    if flag_value is not None:
        return flag_value
    config_values = getattr(args, "_config_values", {})
    if name in config_values:
        return cast(config_values[name])
    return fallback


def _prep_config(args) -> PrepConfig:
    return PrepConfig(
        stopword_path=_setting(args, "stopwords", None),
        stem=not _setting(args, "no_stem", False, lambda v: v.lower() == "true"),
        min_token_length=_setting(args, "min_token_length", 1, int),
        keep_trailing_plus=_setting(args, "keep_trailing_plus", False, lambda v: v.lower() == "true"),
    )


def _require_seed(args) -> int:
    seed = _setting(args, "seed", None, int)
    if seed is None:
        raise PlanError("a --seed is required for this subcommand")
    return int(seed)


# ---------------------------------------------------------------------------
# Experiment plan files
# ---------------------------------------------------------------------------

_PLAN_CONFIG_KEYS = {
    "epochs": int,
    "learning_rate": float,
    "batch_size": int,
    "patience": int,
    "seed": int,
    "encoder_depth": int,
    "embedding_width": int,
    "window_size": int,
    "pooling": str,
    "min_frequency": int,
}

_CONFIG_FIELD_BY_KEY = {
    "epochs": "epochs",
    "learning_rate": "learning_rate",
    "batch_size": "batch_size",
    "patience": "early_stop_patience",
    "seed": "seed",
    "encoder_depth": "encoder_depth",
    "embedding_width": "embedding_width",
    "window_size": "window_size",
    "pooling": "pooling",
    "min_frequency": "min_frequency",
}


class ExperimentPlan:
    """Parsed plan: named bundles, named groups and scalar settings."""

    def __init__(
        self,
        bundles: dict[str, SplitBundle],
        groups: list[tuple[str, list[str]]],
        settings: dict[str, str],
        base_dir: Path,
    ):
        self.bundles = bundles
        self.groups = groups
        self.settings = settings
        self.base_dir = base_dir

    def group_bundles(self) -> list[tuple[DatasetKey, list[DatasetKey]]]:
        groupings = []
        for name, members in self.groups:
            missing = [m for m in members if m not in self.bundles]
            if missing:
                raise PlanError(f"group {name!r} references unknown bundles: {', '.join(missing)}")
            keys = [self.bundles[m].key for m in members]
            groupings.append((evaluation.combined_key_for(keys), keys))
        return groupings


def _load_bundle_part(base: Path, path_value: str) -> tuple:
    posts = ingestion.load_labeled_posts(base / path_value)
    return tuple(posts)


def load_plan(path: Path) -> ExperimentPlan:
    values = parse_kv_file(path)
    base = path.parent
    bundle_parts: dict[str, dict[str, str]] = {}
    groups: list[tuple[str, list[str]]] = []
    settings: dict[str, str] = {}
    for key, value in values.items():
        if key.startswith("bundle."):
            parts = key.split(".")
            if len(parts) != 3 or parts[2] not in ("train", "validation", "test"):
                raise PlanError(f"{path}: bad bundle key {key!r}")
            bundle_parts.setdefault(parts[1], {})[parts[2]] = value
        elif key.startswith("group."):
            name = key[len("group."):]
            members = [m.strip() for m in value.split(",") if m.strip()]
            if not members:
                raise PlanError(f"{path}: group {name!r} has no members")
            groups.append((name, members))
        else:
            settings[key] = value
    if not bundle_parts:
        raise PlanError(f"{path}: plan defines no bundles")
    bundles: dict[str, SplitBundle] = {}
    for name, parts in sorted(bundle_parts.items()):
        if "train" not in parts:
            raise PlanError(f"{path}: bundle {name!r} has no train file")
        train = _load_bundle_part(base, parts["train"])
        validation = _load_bundle_part(base, parts["validation"]) if "validation" in parts else ()
        test = _load_bundle_part(base, parts["test"]) if "test" in parts else ()
        if not train:
            raise PlanError(f"{path}: bundle {name!r} train file is empty")
        keys = {(lp.post.source, lp.post.domain) for lp in train}
        if len(keys) != 1:
            raise PlanError(f"{path}: bundle {name!r} mixes (source, domain) pairs")
        source, domain = keys.pop()
        bundle = SplitBundle(DatasetKey(source, domain), train, validation, test)
        violations = validate_bundle(bundle)
        if violations:
            raise PlanError(f"{path}: bundle {name!r} invalid: {'; '.join(violations)}")
        if bundle.key in {b.key for b in bundles.values()}:
            raise PlanError(f"{path}: two bundles share the key {bundle.key.name()}")
        bundles[name] = bundle
    return ExperimentPlan(bundles, groups, settings, base)


def _training_config(args, plan: Optional[ExperimentPlan]) -> clf.TrainingConfig:
    config = clf.TrainingConfig()
    overrides = {}
    plan_settings = plan.settings if plan else {}
    for key, cast in _PLAN_CONFIG_KEYS.items():
        field = _CONFIG_FIELD_BY_KEY[key]
        value = _setting(args, key, None, cast)
        if value is None and key in plan_settings:
            value = cast(plan_settings[key])
        if value is not None:
            overrides[field] = cast(value)
    if overrides:
        try:
            config = replace(config, **overrides)
        except ValueError as exc:
            raise PlanError(str(exc)) from None
    return config


def _modes(args, plan: Optional[ExperimentPlan]) -> list[clf.EmbeddingsMode]:
    raw = _setting(args, "mode", None)
    if raw is None and plan is not None:
        raw = plan.settings.get("modes")
    if raw is None:
        raw = "random"
    kinds = [m.strip() for m in str(raw).split(",") if m.strip()]
    embeddings = _setting(args, "embeddings", None)
    if embeddings is None and plan is not None and "embeddings" in plan.settings:
        embeddings = str(plan.base_dir / plan.settings["embeddings"])
    modes = []
    for kind in kinds:
        if kind == clf.PRETRAINED and not embeddings:
            raise PlanError("pretrained mode requires --embeddings (or an 'embeddings' plan entry)")
        try:
            modes.append(clf.EmbeddingsMode(kind, embeddings if kind == clf.PRETRAINED else None))
        except ValueError as exc:
            raise PlanError(str(exc)) from None
    return modes


def _model_path(models_dir: Path, key: DatasetKey, mode_kind: str) -> Path:
    return models_dir / f"{key.name()}__{mode_kind}.json"


def _load_registry_model(models_dir: Path, key: DatasetKey, mode_kind: str, context: str):
    path = _model_path(models_dir, key, mode_kind)
    if not path.exists():
        raise PlanError(
            f"missing model file {path.name} for classifier {key.name()} "
            f"mode {mode_kind} ({context})"
        )
    return clf.load_model(path)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_ingest(args) -> int:
    fmt = _setting(args, "format", ingestion.JSONL)
    labeled = bool(args.labeled)
    out_dir = Path(_setting(args, "out", "."))
    loaded_posts = []
    loaded_labels = {}
    for input_path in args.input:
        if labeled:
            for lp in ingestion.load_labeled_posts(input_path, fmt):
                loaded_posts.append(lp.post)
                loaded_labels[lp.post.id] = lp.label
        else:
            loaded_posts.extend(ingestion.load_posts(input_path, fmt))
    total = len(loaded_posts)
    kept = ingestion.deduplicate(loaded_posts)
    groups: dict[DatasetKey, list] = {}
    for post in kept:
        groups.setdefault(DatasetKey(post.source, post.domain), []).append(post)
    out_dir.mkdir(parents=True, exist_ok=True)
    for key in sorted(groups, key=lambda k: (k.source, k.domain)):
        path = out_dir / f"{key.name()}.jsonl"
        if labeled:
            ingestion.write_labeled_posts_jsonl(
                path, [ingestion.LabeledPost(p, loaded_labels[p.id]) for p in groups[key]]
            )
        else:
            ingestion.write_posts_jsonl(path, groups[key])
    print(f"kept {len(kept)} of {total} posts ({total - len(kept)} duplicates removed)")
    if labeled:
        print(f"{'dataset':<24}{'posts':>8}{'patient_voice':>16}{'not_relevant':>14}")
    else:
        print(f"{'dataset':<24}{'posts':>8}")
    for key in sorted(groups, key=lambda k: (k.source, k.domain)):
        posts = groups[key]
        if labeled:
            counts = label_counts([ingestion.LabeledPost(p, loaded_labels[p.id]) for p in posts])
            print(
                f"{key.name():<24}{len(posts):>8}"
                f"{counts[Label.PATIENT_VOICE]:>16}{counts[Label.NOT_RELEVANT]:>14}"
            )
        else:
            print(f"{key.name():<24}{len(posts):>8}")
    return 0


def cmd_split(args) -> int:
    seed = _require_seed(args)
    fraction = _setting(args, "train_fraction", 0.8, float)
    fmt = _setting(args, "format", ingestion.JSONL)
    out_dir = Path(_setting(args, "out", "."))
    posts = ingestion.load_labeled_posts(args.input, fmt)
    if not posts:
        raise PreconditionError(f"{args.input}: no posts to split")
    try:
        train, validation = ingestion.stratified_split(posts, fraction, seed)
    except ValueError as exc:
        raise PreconditionError(str(exc)) from None
    out_dir.mkdir(parents=True, exist_ok=True)
    ingestion.write_labeled_posts_jsonl(out_dir / "train.jsonl", train)
    ingestion.write_labeled_posts_jsonl(out_dir / "validation.jsonl", validation)
    print(f"train: {len(train)} posts, validation: {len(validation)} posts (seed {seed})")
    return 0


def cmd_similarity(args) -> int:
    if len(args.input) < 2:
        raise PreconditionError("similarity needs at least 2 dataset files")
    fmt = _setting(args, "format", ingestion.JSONL)
    out_dir = Path(_setting(args, "out", "."))
    k = _setting(args, "k", 20, int)
    threshold = _setting(args, "threshold", 0.75, float)
    granularity = _setting(args, "idf_granularity", "dataset")
    prep = _prep_config(args)
    timestamp = not args.no_timestamp

    per_dataset_posts: dict[DatasetKey, list] = {}
    for input_path in args.input:
        posts = ingestion.load_posts(input_path, fmt)
        if not posts:
            raise PreconditionError(f"{input_path}: dataset is empty")
        keys = {(p.source, p.domain) for p in posts}
        if len(keys) != 1:
            raise IngestError(f"{input_path}: posts mix (source, domain) pairs")
        source, domain = keys.pop()
        key = DatasetKey(source, domain)
        if key in per_dataset_posts:
            raise IngestError(f"{input_path}: duplicate dataset key {key.name()}")
        per_dataset_posts[key] = posts

    if granularity == "post":
        prepared = {
            key: [prepare(p.text, prep) for p in posts]
            for key, posts in per_dataset_posts.items()
        }
        for key, docs in prepared.items():
            if sum(len(doc) for doc in docs) == 0:
                raise PreconditionError(f"dataset {key.name()} is empty after preprocessing")
        vectors = similarity.dataset_vectors_post_idf(prepared)
    else:
        sequences = {}
        for key, posts in per_dataset_posts.items():
            terms: list[str] = []
            for post in posts:
                terms.extend(prepare(post.text, prep).terms)
            if not terms:
                raise PreconditionError(f"dataset {key.name()} is empty after preprocessing")
            sequences[key] = TermSequence(tuple(terms))
        vectors = similarity.dataset_vectors(sequences)

    matrix = similarity.pairwise_matrix(vectors)
    _write_text(out_dir / "matrix.csv", similarity.matrix_csv(matrix), timestamp)
    _write_text(out_dir / "similarity_long.csv", similarity.long_form_csv(matrix), timestamp)
    _write_text(out_dir / "top_terms.csv", similarity.top_terms_csv(vectors, k), timestamp)
    plan = similarity.combination_plan(matrix, threshold)
    if plan.merges:
        for merge in plan.merges:
            names = " + ".join(sorted(key.name() for key in merge))
            print(f"recommend combining: {names}")
    else:
        print(f"no dataset pair reaches similarity {threshold}")
    print(f"wrote matrix.csv, similarity_long.csv, top_terms.csv to {out_dir}")
    return 0


def cmd_iaa(args) -> int:
    records = ingestion.load_annotations(args.input)
    pairs = score_all_pairs(records)
    report = aggregate(pairs)
    out_dir = Path(_setting(args, "out", "."))
    _write_text(out_dir / "iaa_report.csv", report_csv(report), not args.no_timestamp)
    print(
        f"{len(report.pairs)} annotator pairs, mean kappa {report.mean_kappa:.3f}, "
        f"mean weighted F1 {report.mean_weighted[2]:.3f}"
    )
    print(f"wrote iaa_report.csv to {out_dir}")
    return 0


def cmd_train(args) -> int:
    plan = load_plan(Path(args.plan))
    config = _training_config(args, plan)
    modes = _modes(args, plan)
    models_dir = Path(_setting(args, "out", "models"))
    models_dir.mkdir(parents=True, exist_ok=True)
    jobs: list[tuple[DatasetKey, SplitBundle]] = [
        (bundle.key, bundle)
        for bundle in sorted(plan.bundles.values(), key=lambda b: (b.key.source, b.key.domain))
    ]
    for new_key, member_keys in plan.group_bundles():
        by_key = {b.key: b for b in plan.bundles.values()}
        combined = ingestion.combine_bundles([by_key[k] for k in member_keys], new_key)
        jobs.append((new_key, combined))
    for key, bundle in jobs:
        for mode in modes:
            model = clf.train(bundle.train, bundle.validation, config, mode, trained_on=key)
            path = _model_path(models_dir, key, mode.kind)
            checksum = clf.save_model(model, path)
            print(f"saved {path.name} checksum={checksum[:12]}")
    return 0


def _split_of(bundle: SplitBundle, which: str):
    return {"train": bundle.train, "validation": bundle.validation, "test": bundle.test}[which]


def cmd_eval(args) -> int:
    plan = load_plan(Path(args.plan))
    modes = _modes(args, plan)
    models_dir = Path(_setting(args, "models", "models"))
    out_dir = Path(_setting(args, "out", "reports"))
    fmt = _setting(args, "report_format", "csv")
    headline = _setting(args, "headline", "patient_voice")
    which = _setting(args, "split", "test")
    timestamp = not args.no_timestamp

    specific_results = []
    for bundle in sorted(plan.bundles.values(), key=lambda b: (b.key.source, b.key.domain)):
        posts = _split_of(bundle, which)
        for mode in modes:
            model = _load_registry_model(models_dir, bundle.key, mode.kind, "experiment 1")
            specific_results.append(
                evaluation.evaluate(model, posts, test_key=bundle.key, mode=mode.kind)
            )
    suffix = "md" if fmt == "markdown" else "csv"
    _write_text(
        out_dir / f"experiment1.{suffix}",
        evaluation.render_report(specific_results, fmt, headline),
        timestamp,
    )

    combined_results = []
    by_key = {b.key: b for b in plan.bundles.values()}
    for new_key, member_keys in plan.group_bundles():
        combined = ingestion.combine_bundles([by_key[k] for k in member_keys], new_key)
        posts = _split_of(combined, which)
        for mode in modes:
            model = _load_registry_model(models_dir, new_key, mode.kind, "experiment 2")
            combined_results.append(
                evaluation.evaluate(model, posts, test_key=new_key, mode=mode.kind)
            )
    if combined_results:
        _write_text(
            out_dir / f"experiment2.{suffix}",
            evaluation.render_report(combined_results, fmt, headline),
            timestamp,
        )
    print(
        f"wrote experiment1.{suffix}"
        + (f" and experiment2.{suffix}" if combined_results else "")
        + f" to {out_dir}"
    )
    return 0


def cmd_compare(args) -> int:
    plan = load_plan(Path(args.plan))
    modes = _modes(args, plan)
    models_dir = Path(_setting(args, "models", "models"))
    out_dir = Path(_setting(args, "out", "reports"))
    fmt = _setting(args, "report_format", "csv")
    headline = _setting(args, "headline", "patient_voice")
    bundles = sorted(plan.bundles.values(), key=lambda b: (b.key.source, b.key.domain))
    registry: evaluation.ModelRegistry = {}
    for bundle in bundles:
        for mode in modes:
            for key in (
                bundle.key,
                DatasetKey("combined", bundle.key.domain),
                DatasetKey(bundle.key.source, "combined"),
                DatasetKey.all_data(),
            ):
                if (key, mode.kind) not in registry:
                    registry[(key, mode.kind)] = _load_registry_model(
                        models_dir, key, mode.kind, f"test set {bundle.key.name()}"
                    )
    table = evaluation.experiment_cross(bundles, registry, modes, headline)
    suffix = "md" if fmt == "markdown" else "csv"
    _write_text(
        out_dir / f"experiment3.{suffix}",
        evaluation.render_report(table, fmt),
        not args.no_timestamp,
    )
    print(f"wrote experiment3.{suffix} to {out_dir} ({len(table.rows)} rows)")
    return 0


def cmd_synth(args) -> int:
    out_dir = Path(_setting(args, "out", "synth"))
    seed = _setting(args, "seed", 0, int)
    domains = tuple(
        d.strip() for d in _setting(args, "domains", ",".join(DEFAULT_DOMAINS)).split(",") if d.strip()
    )
    sources = tuple(
        s.strip() for s in _setting(args, "sources", ",".join(DEFAULT_SOURCES)).split(",") if s.strip()
    )
    config = synth.SynthConfig(
        domains=domains,
        sources=sources,
        seed=seed,
        train_size=_setting(args, "train_size", 40, int),
        validation_size=_setting(args, "validation_size", 10, int),
        test_size=_setting(args, "test_size", 10, int),
        signal_noise=_setting(args, "noise", 0.0, float),
    )
    width = _setting(args, "embedding_width", 16, int)
    bundles = synth.synthetic_grid(config)
    out_dir.mkdir(parents=True, exist_ok=True)
    plan_lines = [
        "# synthetic experiment plan",
        f"seed = {seed}",
        "modes = random,pretrained",
        "embeddings = embeddings.vec",
        "epochs = 5",
        "learning_rate = 0.1",
        "batch_size = 8",
        f"embedding_width = {width}",
        "encoder_depth = 1",
        "window_size = 1",
        "patience = 2",
    ]
    for bundle in bundles:
        name = bundle.key.name()
        bundle_dir = out_dir / name
        bundle_dir.mkdir(parents=True, exist_ok=True)
        ingestion.write_labeled_posts_jsonl(bundle_dir / "train.jsonl", bundle.train)
        ingestion.write_labeled_posts_jsonl(bundle_dir / "validation.jsonl", bundle.validation)
        ingestion.write_labeled_posts_jsonl(bundle_dir / "test.jsonl", bundle.test)
        for part in ("train", "validation", "test"):
            plan_lines.append(f"bundle.{name}.{part} = {name}/{part}.jsonl")
    names_by_domain: dict[str, list[str]] = {}
    names_by_source: dict[str, list[str]] = {}
    for bundle in bundles:
        names_by_domain.setdefault(bundle.key.domain, []).append(bundle.key.name())
        names_by_source.setdefault(bundle.key.source, []).append(bundle.key.name())
    if len(sources) > 1:
        for domain in domains:
            plan_lines.append(f"group.{domain} = {', '.join(names_by_domain[domain])}")
    if len(domains) > 1:
        for source in sources:
            plan_lines.append(f"group.{source}_combined = {', '.join(names_by_source[source])}")
    plan_lines.append(f"group.all = {', '.join(b.key.name() for b in bundles)}")
    synth.write_embeddings_file(out_dir / "embeddings.vec", synth.grid_vocabulary(config), width, seed)
    _write_text(out_dir / "plan.txt", "\n".join(plan_lines) + "\n", False)
    print(
        f"wrote {len(bundles)} datasets ({len(domains)} domains x {len(sources)} sources), "
        f"plan.txt and embeddings.vec to {out_dir}"
    )
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--out", help="output directory")
    sub.add_argument("--config", help="key=value config file; flags win over it")
    sub.add_argument("--no-timestamp", action="store_true", help="omit the timestamp header line")


def _add_training_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--seed", type=int)
    sub.add_argument("--mode", help="embeddings modes, comma-separated: random,pretrained")
    sub.add_argument("--embeddings", help="word2vec-style text embeddings file")
    sub.add_argument("--epochs", type=int)
    sub.add_argument("--learning-rate", dest="learning_rate", type=float)
    sub.add_argument("--batch-size", dest="batch_size", type=int)
    sub.add_argument("--patience", type=int)
    sub.add_argument("--encoder-depth", dest="encoder_depth", type=int)
    sub.add_argument("--embedding-width", dest="embedding_width", type=int)
    sub.add_argument("--window-size", dest="window_size", type=int)
    sub.add_argument("--pooling", choices=("attention", "mean"))
    sub.add_argument("--min-frequency", dest="min_frequency", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="patientvoice",
        description="Dataset vocabulary similarity, annotator agreement and "
        "patient-voice classification toolkit",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    ingest = commands.add_parser("ingest", help="load, deduplicate and normalize post files")
    ingest.add_argument("--input", action="append", required=True)
    ingest.add_argument("--format", choices=ingestion.FORMATS)
    ingest.add_argument("--labeled", action="store_true", help="inputs carry a label field")
    _add_common(ingest)
    ingest.set_defaults(func=cmd_ingest)

    split = commands.add_parser("split", help="seeded stratified train/validation split")
    split.add_argument("--input", required=True)
    split.add_argument("--format", choices=ingestion.FORMATS)
    split.add_argument("--train-fraction", dest="train_fraction", type=float)
    split.add_argument("--seed", type=int)
    _add_common(split)
    split.set_defaults(func=cmd_split)

    sim = commands.add_parser("similarity", help="TF-IDF cosine similarity analysis")
    sim.add_argument("--input", action="append", required=True, help="one dataset file per flag")
    sim.add_argument("--format", choices=ingestion.FORMATS)
    sim.add_argument("--k", type=int, help="top-terms list size (default 20)")
    sim.add_argument("--threshold", type=float, help="merge recommendation threshold (default 0.75)")
    sim.add_argument("--stopwords", help="stop-word file overriding the bundled list")
    sim.add_argument("--no-stem", dest="no_stem", action="store_true")
    sim.add_argument("--min-token-length", dest="min_token_length", type=int)
    sim.add_argument("--keep-trailing-plus", dest="keep_trailing_plus", action="store_true")
    sim.add_argument(
        "--idf-granularity",
        dest="idf_granularity",
        choices=("dataset", "post"),
        help="document unit for IDF (default dataset)",
    )
    _add_common(sim)
    sim.set_defaults(func=cmd_similarity)

    iaa = commands.add_parser("iaa", help="inter-annotator agreement report")
    iaa.add_argument("--input", required=True, help="annotation file (JSON lines or CSV)")
    _add_common(iaa)
    iaa.set_defaults(func=cmd_iaa)

    train = commands.add_parser("train", help="train all plan classifiers")
    train.add_argument("--plan", required=True)
    _add_training_flags(train)
    _add_common(train)
    train.set_defaults(func=cmd_train)

    evl = commands.add_parser("eval", help="evaluate trained classifiers on their own test sets")
    evl.add_argument("--plan", required=True)
    evl.add_argument("--models", help="directory holding trained models")
    evl.add_argument("--format", dest="report_format", choices=("csv", "markdown"))
    evl.add_argument("--headline", choices=evaluation.HEADLINES)
    evl.add_argument("--split", choices=("train", "validation", "test"))
    evl.add_argument("--mode", help="embeddings modes, comma-separated")
    evl.add_argument("--embeddings")
    _add_common(evl)
    evl.set_defaults(func=cmd_eval)

    compare = commands.add_parser(
        "compare", help="cross-evaluate every applicable classifier on each specific test set"
    )
    compare.add_argument("--plan", required=True)
    compare.add_argument("--models")
    compare.add_argument("--format", dest="report_format", choices=("csv", "markdown"))
    compare.add_argument("--headline", choices=evaluation.HEADLINES)
    compare.add_argument("--mode", help="embeddings modes, comma-separated")
    compare.add_argument("--embeddings")
    _add_common(compare)
    compare.set_defaults(func=cmd_compare)

    syn = commands.add_parser("synth", help="generate a synthetic dataset grid with a plan file")
    syn.add_argument("--seed", type=int)
    syn.add_argument("--domains", help="comma-separated domain names")
    syn.add_argument("--sources", help="comma-separated source names")
    syn.add_argument("--train-size", dest="train_size", type=int)
    syn.add_argument("--validation-size", dest="validation_size", type=int)
    syn.add_argument("--test-size", dest="test_size", type=int)
    syn.add_argument("--noise", type=float, help="label-signal noise rate in [0, 1]")
    syn.add_argument("--embedding-width", dest="embedding_width", type=int)
    _add_common(syn)
    syn.set_defaults(func=cmd_synth)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    config_values: dict[str, str] = {}
    if getattr(args, "config", None):
        try:
            config_values = parse_kv_file(Path(args.config))
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        except PlanError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
    args._config_values = config_values
    try:
        return args.func(args)
    except clf.TrainingDivergedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except UnscorablePairError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (IngestError, PlanError, clf.ModelFormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
