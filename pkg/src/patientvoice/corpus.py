"""Core domain types shared by every other module. No I/O here.

All types are immutable value objects; they can be shared freely between
threads once constructed.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

REDDIT = "reddit"
SOCIALGIST = "socialgist"
COMBINED = "combined"

CARDIOVASCULAR = "cardiovascular"
ONCOLOGY = "oncology"
IMMUNOLOGY = "immunology"
NEUROLOGY = "neurology"
DEFAULT_DOMAINS = (CARDIOVASCULAR, ONCOLOGY, IMMUNOLOGY, NEUROLOGY)
DEFAULT_SOURCES = (REDDIT, SOCIALGIST)

_SOURCE_ABBREV = {REDDIT: "r", SOCIALGIST: "sg"}


class Label(enum.Enum):
    """Binary post label. PATIENT_VOICE sorts before NOT_RELEVANT."""

    PATIENT_VOICE = "patient_voice"
    NOT_RELEVANT = "not_relevant"

    def __lt__(self, other: object) -> bool:
        if not isinstance(other, Label):
            return NotImplemented
        return LABELS.index(self) < LABELS.index(other)

    @classmethod
    def from_string(cls, raw: str) -> "Label":
        try:
            return cls(raw)
        except ValueError:
            valid = ", ".join(label.value for label in cls)
            raise ValueError(f"unknown label {raw!r} (expected one of: {valid})") from None


LABELS: tuple[Label, Label] = (Label.PATIENT_VOICE, Label.NOT_RELEVANT)


@dataclass(frozen=True)
class Post:
    """One social-media or message-board document."""

    id: str
    source: str
    domain: str
    text: str
    created_at: Optional[int] = None

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("post id must be non-empty")


@dataclass(frozen=True)
class LabeledPost:
    post: Post
    label: Label

    def __post_init__(self) -> None:
        if not isinstance(self.label, Label):
            raise ValueError(f"label must be a Label, got {self.label!r}")


@dataclass(frozen=True, order=True)
class DatasetKey:
    """Identity of a dataset: data source crossed with therapeutic domain.

    Either axis may be COMBINED; (COMBINED, COMBINED) is the all-data set.
    """

    source: str
    domain: str

    @classmethod
    def all_data(cls) -> "DatasetKey":
        return cls(COMBINED, COMBINED)

    @property
    def is_combined(self) -> bool:
        return self.source == COMBINED or self.domain == COMBINED

    def name(self) -> str:
        """Compact human-readable name used in file names and reports."""
        if self.source == COMBINED and self.domain == COMBINED:
            return "all"
        if self.source == COMBINED:
            return self.domain
        if self.domain == COMBINED:
            return f"{self.source}_combined"
        return f"{self.domain}_{_SOURCE_ABBREV.get(self.source, self.source)}"


@dataclass(frozen=True)
class SplitBundle:
    """Train/validation/test partitions of one dataset."""

    key: DatasetKey
    train: tuple[LabeledPost, ...] = field(default=())
    validation: tuple[LabeledPost, ...] = field(default=())
    test: tuple[LabeledPost, ...] = field(default=())

    def __post_init__(self) -> None:
        object.__setattr__(self, "train", tuple(self.train))
        object.__setattr__(self, "validation", tuple(self.validation))
        object.__setattr__(self, "test", tuple(self.test))

    def partitions(self) -> Iterator[tuple[str, tuple[LabeledPost, ...]]]:
        yield "train", self.train
        yield "validation", self.validation
        yield "test", self.test

    def all_ids(self) -> set[str]:
        return {lp.post.id for _, part in self.partitions() for lp in part}


def validate_bundle(bundle: SplitBundle) -> list[str]:
    """Check bundle invariants; returns one description per violation.

    An empty list means the bundle is valid. Violations are data, not
    errors: callers decide whether to raise.
    """
    violations: list[str] = []
    if not bundle.train:
        violations.append("empty train partition")
    parts = list(bundle.partitions())
    for (name_a, posts_a), (name_b, posts_b) in itertools.combinations(parts, 2):
        ids_a = {lp.post.id for lp in posts_a}
        ids_b = {lp.post.id for lp in posts_b}
        for post_id in sorted(ids_a & ids_b):
            violations.append(f"duplicate id {post_id} in {name_a}/{name_b}")
    return violations


def label_counts(posts: Sequence[LabeledPost]) -> dict[Label, int]:
    counts = {label: 0 for label in LABELS}
    for lp in posts:
        counts[lp.label] += 1
    return counts
