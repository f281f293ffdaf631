"""TF-IDF dataset vectors, pairwise cosine similarity, banding and merge plans.

The default model treats each dataset's concatenated term sequence as one
document and the collection of datasets as the corpus. Weights use raw term
frequency (count / document length) times the natural-log inverse document
frequency ln(N / df), with no smoothing: a term present in every dataset
gets weight 0 but stays in the vocabulary.
"""

from __future__ import annotations

import enum
import math
from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from patientvoice.corpus import DatasetKey
from patientvoice.textprep import TermSequence


class SimilarityBand(enum.Enum):
    """Similarity strength bands: below 0.60 low, 0.60-0.75 medium,
    above 0.75 considerable."""

    LOW = "low"
    MEDIUM = "medium"
    CONSIDERABLE = "considerable"

    def __lt__(self, other: object) -> bool:
        if not isinstance(other, SimilarityBand):
            return NotImplemented
        order = (SimilarityBand.LOW, SimilarityBand.MEDIUM, SimilarityBand.CONSIDERABLE)
        return order.index(self) < order.index(other)


@dataclass(frozen=True)
class TermVector:
    """Sparse TF-IDF weights of one dataset, embedded in the union vocabulary
    of the corpus it was computed against (dimension = union size)."""

    key: DatasetKey
    weights: Mapping[str, float]
    dimension: int

    def __post_init__(self) -> None:
        if self.dimension < sum(1 for w in self.weights.values() if w != 0.0):
            raise ValueError("dimension smaller than the non-zero support")
        if any(w < 0.0 for w in self.weights.values()):
            raise ValueError("TF-IDF weights must be non-negative")


@dataclass(frozen=True)
class SimilarityMatrix:
    keys: tuple[DatasetKey, ...]
    values: np.ndarray

    def value(self, a: DatasetKey, b: DatasetKey) -> float:
        return float(self.values[self.keys.index(a), self.keys.index(b)])


@dataclass(frozen=True)
class CombinationPlan:
    """Sets of datasets recommended for merging before training."""

    merges: tuple[frozenset[DatasetKey], ...]
    threshold: float


def term_frequency(term: str, doc: TermSequence) -> float:
    """Occurrences of term divided by document length."""
    if len(doc) == 0:
        raise ValueError("term frequency is undefined for an empty document")
    return doc.terms.count(term) / len(doc)


def inverse_document_frequency(term: str, corpus: Sequence[TermSequence]) -> float:
    """ln(N / df) over the given corpus of documents."""
    if not corpus:
        raise ValueError("IDF is undefined for an empty corpus")
    df = sum(1 for doc in corpus if term in set(doc.terms))
    if df == 0:
        raise ValueError(f"term {term!r} does not occur in the corpus")
    return math.log(len(corpus) / df)


def dataset_vectors(
    datasets: Mapping[DatasetKey, TermSequence],
) -> dict[DatasetKey, TermVector]:
    """TF-IDF vector per dataset under the dataset-as-document model."""
    if len(datasets) < 2:
        raise ValueError("need at least 2 datasets (IDF is undefined otherwise)")
    for key, doc in datasets.items():
        if len(doc) == 0:
            raise ValueError(f"dataset {key.name()} is empty after preprocessing")
    n = len(datasets)
    df: Counter[str] = Counter()
    for doc in datasets.values():
        df.update(set(doc.terms))
    dimension = len(df)
    vectors = {}
    for key, doc in datasets.items():
        counts = Counter(doc.terms)
        length = len(doc)
        weights = {
            term: (count / length) * math.log(n / df[term])
            for term, count in counts.items()
        }
        vectors[key] = TermVector(key, weights, dimension)
    return vectors


def dataset_vectors_post_idf(
    datasets: Mapping[DatasetKey, Sequence[TermSequence]],
) -> dict[DatasetKey, TermVector]:
    """Variant computing IDF over individual posts instead of datasets.

    Term frequency is still taken over the dataset's concatenated terms;
    only the document-frequency denominator changes granularity.
    """
    if len(datasets) < 2:
        raise ValueError("need at least 2 datasets (IDF is undefined otherwise)")
    all_posts = [post for posts in datasets.values() for post in posts]
    n_posts = len(all_posts)
    if n_posts == 0:
        raise ValueError("no posts in any dataset")
    df: Counter[str] = Counter()
    for post in all_posts:
        df.update(set(post.terms))
    dimension = len(df)
    vectors = {}
    for key, posts in datasets.items():
        terms = [t for post in posts for t in post.terms]
        if not terms:
            raise ValueError(f"dataset {key.name()} is empty after preprocessing")
        counts = Counter(terms)
        length = len(terms)
        weights = {
            term: (count / length) * math.log(n_posts / df[term])
            for term, count in counts.items()
        }
        vectors[key] = TermVector(key, weights, dimension)
    return vectors


def cosine_similarity(a: TermVector, b: TermVector) -> float:
    """Dot product over the norms; 0 when either vector has zero norm."""
    if a.dimension != b.dimension:
        raise ValueError(
            f"dimension mismatch: {a.dimension} vs {b.dimension} "
            "(vectors must share one union-vocabulary embedding)"
        )
    norm_a = math.sqrt(sum(w * w for w in a.weights.values()))
    norm_b = math.sqrt(sum(w * w for w in b.weights.values()))
    if norm_a == 0.0 or norm_b == 0.0:
        return 0.0
    small, large = (a.weights, b.weights) if len(a.weights) <= len(b.weights) else (b.weights, a.weights)
    dot = sum(w * large.get(term, 0.0) for term, w in small.items())
    return dot / (norm_a * norm_b)


def sort_keys(keys) -> tuple[DatasetKey, ...]:
    return tuple(sorted(keys, key=lambda k: (k.source, k.domain)))


def pairwise_matrix(vectors: Mapping[DatasetKey, TermVector]) -> SimilarityMatrix:
    """Symmetric cosine matrix over a deterministic (source, domain) key
    ordering, clamped to [0, 1]."""
    if len(vectors) < 2:
        raise ValueError("need at least 2 vectors for a pairwise matrix")
    keys = sort_keys(vectors)
    n = len(keys)
    values = np.zeros((n, n), dtype=np.float64)
    for i in range(n):
        for j in range(i, n):
            sim = cosine_similarity(vectors[keys[i]], vectors[keys[j]])
            sim = min(max(sim, 0.0), 1.0)
            values[i, j] = sim
            values[j, i] = sim
    return SimilarityMatrix(keys, values)


def band(similarity: float) -> SimilarityBand:
    if not 0.0 <= similarity <= 1.0:
        raise ValueError(f"similarity {similarity!r} outside [0, 1]")
    if similarity < 0.60:
        return SimilarityBand.LOW
    if similarity <= 0.75:
        return SimilarityBand.MEDIUM
    return SimilarityBand.CONSIDERABLE


def top_k_terms(vector: TermVector, k: int) -> list[tuple[str, float]]:
    """k highest-weight terms, weight descending, ties broken by term.

    Zero-weight terms never appear; asking for more than the non-zero
    support returns the whole support.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    items = [(term, w) for term, w in vector.weights.items() if w > 0.0]
    items.sort(key=lambda tw: (-tw[1], tw[0]))
    return items[:k]


def uniqueness_count(
    vectors: Mapping[DatasetKey, TermVector], k: int
) -> dict[DatasetKey, int]:
    """Per dataset, how many of its top-k terms appear in no other dataset's
    top-k list."""
    if len(vectors) < 2:
        raise ValueError("need at least 2 vectors")
    tops = {key: {t for t, _ in top_k_terms(vec, k)} for key, vec in vectors.items()}
    counts = {}
    for key, terms in tops.items():
        others: set[str] = set()
        for other_key, other_terms in tops.items():
            if other_key != key:
                others |= other_terms
        counts[key] = len(terms - others)
    return counts


def combination_plan(matrix: SimilarityMatrix, threshold: float = 0.75) -> CombinationPlan:
    """Single-link merge plan: connected components of the graph whose edges
    are pairs with similarity >= threshold; singletons are dropped."""
    if not 0.0 <= threshold <= 1.0:
        raise ValueError("threshold must be in [0, 1]")
    n = len(matrix.keys)
    adjacency = [
        [j for j in range(n) if j != i and matrix.values[i, j] >= threshold]
        for i in range(n)
    ]
    seen: set[int] = set()
    merges = []
    for start in range(n):
        if start in seen:
            continue
        component = {start}
        frontier = [start]
        while frontier:
            node = frontier.pop()
            for neighbor in adjacency[node]:
                if neighbor not in component:
                    component.add(neighbor)
                    frontier.append(neighbor)
        seen |= component
        if len(component) >= 2:
            merges.append(frozenset(matrix.keys[i] for i in component))
    merges.sort(key=lambda group: sorted(k.name() for k in group)[0])
    return CombinationPlan(tuple(merges), threshold)


def matrix_csv(matrix: SimilarityMatrix) -> str:
    """Square matrix CSV with key names on both the header row and column."""
    names = [key.name() for key in matrix.keys]
    lines = ["dataset," + ",".join(names)]
    for i, name in enumerate(names):
        row = ",".join(f"{matrix.values[i, j]:.6f}" for j in range(len(names)))
        lines.append(f"{name},{row}")
    return "\n".join(lines) + "\n"


def long_form_csv(matrix: SimilarityMatrix) -> str:
    """Heat-map-ready rows: key_a, key_b, similarity, band for every cell."""
    lines = ["key_a,key_b,similarity,band"]
    for i, key_a in enumerate(matrix.keys):
        for j, key_b in enumerate(matrix.keys):
            sim = float(matrix.values[i, j])
            lines.append(f"{key_a.name()},{key_b.name()},{sim:.6f},{band(sim).value}")
    return "\n".join(lines) + "\n"


def top_terms_csv(vectors: Mapping[DatasetKey, TermVector], k: int) -> str:
    """Ranked top-k report: dataset, rank, term, weight."""
    lines = ["dataset,rank,term,weight"]
    for key in sort_keys(vectors):
        for rank, (term, weight) in enumerate(top_k_terms(vectors[key], k), start=1):
            lines.append(f"{key.name()},{rank},{term},{weight:.6f}")
    return "\n".join(lines) + "\n"
