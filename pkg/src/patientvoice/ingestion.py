"""Loading, deduplication, seeded stratified splitting and bundle combination.

File formats accepted (UTF-8, LF or CRLF):
  - post files: JSON lines with fields id, source, domain, text (required)
    and created_at (optional); or CSV with the same header columns. Extra
    fields are ignored. Labeled variants additionally require a label field
    holding "patient_voice" or "not_relevant".
  - annotation files: JSON lines or headered CSV with post_id, annotator_id
    and label columns.
"""

from __future__ import annotations

import csv
import json
import math
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence, Union

from patientvoice.agreement import AnnotationRecord
from patientvoice.corpus import (
    LABELS,
    DatasetKey,
    Label,
    LabeledPost,
    Post,
    SplitBundle,
)
from patientvoice.rng import SeededRng

JSONL = "jsonl"
CSV = "csv"
FORMATS = (JSONL, CSV)

PathLike = Union[str, Path]


class IngestError(ValueError):
    """Malformed input file; the message carries the file and line number."""


@dataclass(frozen=True)
class IngestConfig:
    input_paths: tuple[str, ...]
    format: str = JSONL
    seed: int = 0
    train_fraction: float = 0.8

    def __post_init__(self) -> None:
        object.__setattr__(self, "input_paths", tuple(self.input_paths))
        if not self.input_paths:
            raise ValueError("at least one input path is required")
        if self.format not in FORMATS:
            raise ValueError(f"unknown format {self.format!r}")
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train_fraction must be strictly between 0 and 1")
        if self.seed < 0:
            raise ValueError("seed must be non-negative")


def _require(record: dict, name: str, where: str) -> object:
    if name not in record or record[name] is None:
        raise IngestError(f"{where}: missing required field {name!r}")
    return record[name]


def _post_from_record(record: dict, where: str) -> Post:
    created_at = record.get("created_at")
    if created_at is not None:
        if isinstance(created_at, str) and created_at.strip() == "":
            created_at = None
        else:
            try:
                created_at = int(created_at)
            except (TypeError, ValueError):
                raise IngestError(f"{where}: created_at must be an integer") from None
    try:
        return Post(
            id=str(_require(record, "id", where)),
            source=str(_require(record, "source", where)),
            domain=str(_require(record, "domain", where)),
            text=str(_require(record, "text", where)),
            created_at=created_at,
        )
    except ValueError as exc:
        if isinstance(exc, IngestError):
            raise
        raise IngestError(f"{where}: {exc}") from None


def _iter_records(path: PathLike, fmt: str):
    """Yield (record dict, location string) per input row."""
    if fmt not in FORMATS:
        raise IngestError(f"unknown format {fmt!r}")
    name = str(path)
    if fmt == JSONL:
        with open(path, "r", encoding="utf-8") as handle:
            for line_no, line in enumerate(handle, start=1):
                if not line.strip():
                    continue
                where = f"{name}: line {line_no}"
                try:
                    record = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise IngestError(f"{where}: invalid JSON ({exc.msg})") from None
                if not isinstance(record, dict):
                    raise IngestError(f"{where}: expected a JSON object")
                yield record, where
    else:
        with open(path, "r", encoding="utf-8", newline="") as handle:
            reader = csv.DictReader(handle)
            for record in reader:
                where = f"{name}: line {reader.line_num}"
                yield {k: v for k, v in record.items() if k is not None}, where


def load_posts(path: PathLike, fmt: str = JSONL) -> list[Post]:
    """One Post per record, in file order; unknown extra fields are ignored."""
    return [_post_from_record(record, where) for record, where in _iter_records(path, fmt)]


def load_labeled_posts(path: PathLike, fmt: str = JSONL) -> list[LabeledPost]:
    """Posts with a required gold label field."""
    posts = []
    for record, where in _iter_records(path, fmt):
        post = _post_from_record(record, where)
        raw_label = _require(record, "label", where)
        try:
            label = Label.from_string(str(raw_label))
        except ValueError as exc:
            raise IngestError(f"{where}: {exc}") from None
        posts.append(LabeledPost(post, label))
    return posts


def deduplicate(posts: Sequence[Post]) -> list[Post]:
    """Keep the first occurrence when either the id or the exact text body
    (after Unicode NFC normalization) matches an earlier post."""
    seen_ids: set[str] = set()
    seen_texts: set[str] = set()
    kept = []
    for post in posts:
        text = unicodedata.normalize("NFC", post.text)
        if post.id in seen_ids or text in seen_texts:
            continue
        seen_ids.add(post.id)
        seen_texts.add(text)
        kept.append(post)
    return kept


def deduplicate_labeled(posts: Sequence[LabeledPost]) -> list[LabeledPost]:
    by_id = {lp.post.id: lp for lp in posts}
    kept_posts = deduplicate([lp.post for lp in posts])
    return [by_id[p.id] for p in kept_posts]


def _round_half_up(value: float) -> int:
    return math.floor(value + 0.5)


def stratified_split(
    posts: Sequence[LabeledPost],
    train_fraction: float = 0.8,
    seed: int = 0,
) -> tuple[list[LabeledPost], list[LabeledPost]]:
    """Seeded shuffle, then per-class assignment of round(n_c * fraction)
    posts to train and the remainder to validation.

    The same seed always produces bit-identical partitions. Both output
    lists preserve the shuffled order.
    """
    if not posts:
        raise ValueError("cannot split an empty post list")
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train_fraction must be strictly between 0 and 1")
    counts = {label: 0 for label in LABELS}
    for lp in posts:
        counts[lp.label] += 1
    for label, count in counts.items():
        if count == 0:
            raise ValueError(f"cannot stratify: class {label.value!r} has no members")
    shuffled = list(posts)
    SeededRng(seed).shuffle(shuffled)
    quotas = {label: _round_half_up(count * train_fraction) for label, count in counts.items()}
    taken = {label: 0 for label in LABELS}
    train: list[LabeledPost] = []
    validation: list[LabeledPost] = []
    for lp in shuffled:
        if taken[lp.label] < quotas[lp.label]:
            taken[lp.label] += 1
            train.append(lp)
        else:
            validation.append(lp)
    return train, validation


def combine_bundles(bundles: Sequence[SplitBundle], new_key: DatasetKey) -> SplitBundle:
    """Concatenate train with trains, validation with validations, test with
    tests. Bundles must be pairwise disjoint by post id."""
    if not bundles:
        raise ValueError("cannot combine an empty bundle list")
    seen: set[str] = set()
    for bundle in bundles:
        ids = bundle.all_ids()
        collisions = seen & ids
        if collisions:
            example = sorted(collisions)[0]
            raise ValueError(f"post id {example!r} appears in more than one bundle")
        seen |= ids
    train: list[LabeledPost] = []
    validation: list[LabeledPost] = []
    test: list[LabeledPost] = []
    for bundle in bundles:
        train.extend(bundle.train)
        validation.extend(bundle.validation)
        test.extend(bundle.test)
    return SplitBundle(new_key, tuple(train), tuple(validation), tuple(test))


def _sniff_annotation_format(path: PathLike) -> str:
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            if line.strip():
                return JSONL if line.lstrip().startswith("{") else CSV
    return JSONL


def load_annotations(path: PathLike, fmt: str | None = None) -> list[AnnotationRecord]:
    """Annotation records in file order; the format is sniffed when omitted."""
    if fmt is None:
        fmt = _sniff_annotation_format(path)
    records = []
    for record, where in _iter_records(path, fmt):
        try:
            label = Label.from_string(str(_require(record, "label", where)))
        except IngestError:
            raise
        except ValueError as exc:
            raise IngestError(f"{where}: {exc}") from None
        records.append(
            AnnotationRecord(
                post_id=str(_require(record, "post_id", where)),
                annotator_id=str(_require(record, "annotator_id", where)),
                label=label,
            )
        )
    return records


def post_to_record(post: Post, label: Label | None = None) -> dict:
    record = {
        "id": post.id,
        "source": post.source,
        "domain": post.domain,
        "text": post.text,
    }
    if post.created_at is not None:
        record["created_at"] = post.created_at
    if label is not None:
        record["label"] = label.value
    return record


def write_posts_jsonl(path: PathLike, posts: Sequence[Post]) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for post in posts:
            handle.write(json.dumps(post_to_record(post), ensure_ascii=False) + "\n")


def write_labeled_posts_jsonl(path: PathLike, posts: Sequence[LabeledPost]) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for lp in posts:
            handle.write(
                json.dumps(post_to_record(lp.post, lp.label), ensure_ascii=False) + "\n"
            )
