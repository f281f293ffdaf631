"""Synthetic dataset generator with controlled vocabulary overlap.

Builds a grid of (domain x source) datasets whose posts mix four term
blocks: label-signal terms shared by every dataset (different blocks for
the two classes), domain terms shared by all sources within a domain,
common filler terms, and a few dataset-only terms. Because shared terms
carry zero TF-IDF weight in the dataset-as-document model, the domain
blocks drive within-domain similarity while the dataset-only blocks keep
cross-domain similarity near zero.

The generator is fully deterministic for a given seed and is what the
acceptance suite and the "synth" CLI subcommand use in place of real data.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from patientvoice.corpus import (
    DEFAULT_DOMAINS,
    DEFAULT_SOURCES,
    DatasetKey,
    Label,
    LabeledPost,
    Post,
    SplitBundle,
)
from patientvoice.rng import SeededRng
from patientvoice.textprep import tokenize

PV_SIGNAL = (
    "taking", "started", "feel", "felt", "today", "morning", "dose",
    "switched", "noticed", "tried",
)
NR_SIGNAL = (
    "study", "approved", "patients", "research", "announced", "article",
    "press", "regulator", "enrolled", "published",
)
COMMON_FILLER = (
    "time", "week", "doctor", "help", "know", "good", "years", "still",
    "really", "thing",
)

DOMAIN_TERMS_PER_DOMAIN = 12
DATASET_ONLY_TERMS = 4


@dataclass(frozen=True)
class SynthConfig:
    domains: tuple[str, ...] = DEFAULT_DOMAINS
    sources: tuple[str, ...] = DEFAULT_SOURCES
    seed: int = 0
    train_size: int = 40
    validation_size: int = 10
    test_size: int = 10
    patient_voice_fraction: float = 0.6
    signal_noise: float = 0.0

    def __post_init__(self) -> None:
        if not self.domains or not self.sources:
            raise ValueError("need at least one domain and one source")
        if min(self.train_size, self.validation_size, self.test_size) < 0:
            raise ValueError("split sizes must be non-negative")
        if self.train_size == 0:
            raise ValueError("train_size must be positive")
        if not 0.0 < self.patient_voice_fraction < 1.0:
            raise ValueError("patient_voice_fraction must be in (0, 1)")
        if not 0.0 <= self.signal_noise <= 1.0:
            raise ValueError("signal_noise must be in [0, 1]")


def domain_terms(domain: str) -> list[str]:
    return [f"{domain}term{i:02d}" for i in range(DOMAIN_TERMS_PER_DOMAIN)]


def dataset_only_terms(domain: str, source: str) -> list[str]:
    return [f"{domain}{source}only{i}" for i in range(DATASET_ONLY_TERMS)]


def _pick(rng: SeededRng, pool: Sequence[str], count: int) -> list[str]:
    return [pool[rng.below(len(pool))] for _ in range(count)]


def _post_text(rng: SeededRng, label: Label, domain: str, source: str, noise: float) -> str:
    signal_pool = PV_SIGNAL if label is Label.PATIENT_VOICE else NR_SIGNAL
    if noise > 0.0 and rng.random() < noise:
        signal_pool = NR_SIGNAL if label is Label.PATIENT_VOICE else PV_SIGNAL
    words = _pick(rng, signal_pool, 3 + rng.below(3))
    words += _pick(rng, domain_terms(domain), 4 + rng.below(3))
    words += _pick(rng, COMMON_FILLER, 2 + rng.below(2))
    if rng.random() < 0.5:
        words += _pick(rng, dataset_only_terms(domain, source), 1)
    rng.shuffle(words)
    return " ".join(words)


def _make_posts(
    rng: SeededRng,
    key: DatasetKey,
    split: str,
    count: int,
    config: SynthConfig,
) -> list[LabeledPost]:
    posts = []
    pv_quota = round(count * config.patient_voice_fraction)
    for i in range(count):
        label = Label.PATIENT_VOICE if i < pv_quota else Label.NOT_RELEVANT
        text = _post_text(rng, label, key.domain, key.source, config.signal_noise)
        post = Post(
            id=f"{key.name()}-{split}-{i:04d}",
            source=key.source,
            domain=key.domain,
            text=text,
        )
        posts.append(LabeledPost(post, label))
    order = list(range(len(posts)))
    rng.shuffle(order)
    return [posts[i] for i in order]


def synthetic_grid(config: SynthConfig) -> list[SplitBundle]:
    """One SplitBundle per (domain, source) pair, deterministic in the seed."""
    bundles = []
    for d_idx, domain in enumerate(config.domains):
        for s_idx, source in enumerate(config.sources):
            key = DatasetKey(source, domain)
            # independent stream per dataset so grids of different sizes agree
            rng = SeededRng(config.seed * 1_000_003 + d_idx * 1009 + s_idx + 1)
            bundles.append(
                SplitBundle(
                    key=key,
                    train=tuple(_make_posts(rng, key, "train", config.train_size, config)),
                    validation=tuple(
                        _make_posts(rng, key, "validation", config.validation_size, config)
                    ),
                    test=tuple(_make_posts(rng, key, "test", config.test_size, config)),
                )
            )
    return bundles


def grid_vocabulary(config: SynthConfig) -> list[str]:
    """Union of every term the generator can emit, sorted."""
    terms = set(PV_SIGNAL) | set(NR_SIGNAL) | set(COMMON_FILLER)
    for domain in config.domains:
        terms |= set(domain_terms(domain))
        for source in config.sources:
            terms |= set(dataset_only_terms(domain, source))
    return sorted(terms)


def write_embeddings_file(
    path: str | Path,
    terms: Sequence[str],
    width: int,
    seed: int,
) -> None:
    """word2vec-style text embeddings with seeded uniform values."""
    rng = SeededRng(seed)
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(f"{len(terms)} {width}\n")
        for term in terms:
            values = " ".join(f"{rng.uniform(-0.5, 0.5):.6f}" for _ in range(width))
            handle.write(f"{term} {values}\n")


def bundle_term_sequences(bundles: Sequence[SplitBundle]):
    """Train-partition token lists per dataset, for similarity checks."""
    from patientvoice.textprep import TermSequence, prepare

    sequences = {}
    for bundle in bundles:
        terms: list[str] = []
        for lp in bundle.train:
            terms.extend(prepare(lp.post.text).terms)
        sequences[bundle.key] = TermSequence(tuple(terms))
    return sequences
