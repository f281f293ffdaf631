"""Trainable bag-of-words text classifier.

Per-token embedding vectors are combined into a text matrix, passed through
a stack of window-convolution layers (one neighbor each side by default,
residual add, tanh), reduced to a single text vector by attention pooling
(softmax over learned query scores) and classified by an affine head.

Everything is plain float64 numpy with hand-written gradients; training is
mini-batch SGD with a fixed learning rate, seeded shuffling and optional
early stopping on validation macro F1. A fixed seed reproduces training
bit-for-bit.
"""

from __future__ import annotations

import base64
import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from patientvoice.corpus import LABELS, DatasetKey, Label, LabeledPost, Post
from patientvoice.rng import SeededRng
from patientvoice.textprep import tokenize

PADDING_TOKEN = "<pad>"
UNKNOWN_TOKEN = "<unk>"

RANDOM_INIT = "random"
PRETRAINED = "pretrained"

MODEL_FORMAT = "patientvoice-model"
MODEL_FORMAT_VERSION = 1

PathLike = Union[str, Path]


class ModelFormatError(ValueError):
    """Corrupt, truncated or version-mismatched model file."""


class TrainingDivergedError(RuntimeError):
    """Loss became non-finite; the message names the epoch."""


@dataclass(frozen=True)
class EmbeddingsMode:
    """Provenance of the embedding table: trained from random init, or
    preloaded from a word2vec-style text file and then fine-tuned."""

    kind: str = RANDOM_INIT
    path: Optional[str] = None

    def __post_init__(self) -> None:
        if self.kind not in (RANDOM_INIT, PRETRAINED):
            raise ValueError(f"unknown embeddings mode {self.kind!r}")
        if self.kind == PRETRAINED and not self.path:
            raise ValueError("pretrained mode requires an embeddings file path")


@dataclass(frozen=True)
class TrainingConfig:
    epochs: int = 50
    learning_rate: float = 0.05
    batch_size: int = 16
    early_stop_patience: int = 5
    seed: int = 0
    encoder_depth: int = 2
    embedding_width: int = 96
    window_size: int = 1
    pooling: str = "attention"
    min_frequency: int = 1

    def __post_init__(self) -> None:
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.learning_rate < 0.0:
            raise ValueError("learning_rate must be non-negative")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.early_stop_patience < 0:
            raise ValueError("early_stop_patience must be >= 0")
        if self.embedding_width < 2:
            raise ValueError("embedding_width must be >= 2")
        if self.encoder_depth < 0:
            raise ValueError("encoder_depth must be >= 0")
        if self.window_size < 1:
            raise ValueError("window_size must be >= 1")
        if self.pooling not in ("attention", "mean"):
            raise ValueError("pooling must be 'attention' or 'mean'")
        if self.min_frequency < 1:
            raise ValueError("min_frequency must be >= 1")


@dataclass(frozen=True)
class Vocabulary:
    """Dense term -> index map with PADDING at 0 and UNKNOWN at 1."""

    index: dict[str, int]
    min_frequency: int = 1

    @property
    def size(self) -> int:
        return len(self.index)

    @property
    def unknown_id(self) -> int:
        return self.index[UNKNOWN_TOKEN]

    def id_for(self, term: str) -> int:
        return self.index.get(term, self.index[UNKNOWN_TOKEN])

    def ids_for(self, tokens: Sequence[str]) -> list[int]:
        unknown = self.index[UNKNOWN_TOKEN]
        return [self.index.get(t, unknown) for t in tokens]

    def terms_by_index(self) -> list[str]:
        ordered = sorted(self.index.items(), key=lambda kv: kv[1])
        return [term for term, _ in ordered]


@dataclass(frozen=True, eq=False)
class EmbeddingTable:
    matrix: np.ndarray
    provenance: str = RANDOM_INIT
    source_path: Optional[str] = None

    def __post_init__(self) -> None:
        if not np.all(np.isfinite(self.matrix)):
            raise ValueError("embedding table contains non-finite entries")


@dataclass(frozen=True, eq=False)
class ClassifierModel:
    vocabulary: Vocabulary
    embeddings: EmbeddingTable
    conv_weights: tuple[np.ndarray, ...]
    conv_biases: tuple[np.ndarray, ...]
    attention_query: np.ndarray
    head_weights: np.ndarray
    head_bias: np.ndarray
    config: TrainingConfig
    seed: int
    trained_on: Optional[DatasetKey] = None


@dataclass(frozen=True, eq=False)
class EncodedText:
    vector: np.ndarray
    attention: np.ndarray
    degenerate: bool


@dataclass(frozen=True)
class Prediction:
    label: Label
    probabilities: dict[Label, float]


def build_vocab(train: Sequence[LabeledPost], min_frequency: int = 1) -> Vocabulary:
    """Every lowercase token with corpus frequency >= min_frequency, indexed
    by (frequency descending, term ascending) after the two special slots."""
    if not train:
        raise ValueError("cannot build a vocabulary from an empty train set")
    if min_frequency < 1:
        raise ValueError("min_frequency must be >= 1")
    counts: dict[str, int] = {}
    for lp in train:
        for token in tokenize(lp.post.text):
            counts[token] = counts.get(token, 0) + 1
    ordered = sorted(
        (term for term, count in counts.items() if count >= min_frequency),
        key=lambda term: (-counts[term], term),
    )
    index = {PADDING_TOKEN: 0, UNKNOWN_TOKEN: 1}
    for term in ordered:
        index[term] = len(index)
    return Vocabulary(index=index, min_frequency=min_frequency)


# ---------------------------------------------------------------------------
# Parameters and initialization
# ---------------------------------------------------------------------------

@dataclass
class ParamSet:
    """Mutable parameter container used during training and grad checks."""

    embeddings: np.ndarray
    conv_weights: list[np.ndarray]
    conv_biases: list[np.ndarray]
    attention_query: np.ndarray
    head_weights: np.ndarray
    head_bias: np.ndarray

    def named_arrays(self) -> list[tuple[str, np.ndarray]]:
        named = [("embeddings", self.embeddings)]
        for i, (w, b) in enumerate(zip(self.conv_weights, self.conv_biases)):
            named.append((f"conv_weights_{i}", w))
            named.append((f"conv_biases_{i}", b))
        named.append(("attention_query", self.attention_query))
        named.append(("head_weights", self.head_weights))
        named.append(("head_bias", self.head_bias))
        return named

    def copy(self) -> "ParamSet":
        return ParamSet(
            embeddings=self.embeddings.copy(),
            conv_weights=[w.copy() for w in self.conv_weights],
            conv_biases=[b.copy() for b in self.conv_biases],
            attention_query=self.attention_query.copy(),
            head_weights=self.head_weights.copy(),
            head_bias=self.head_bias.copy(),
        )

    def zeros_like(self) -> "ParamSet":
        return ParamSet(
            embeddings=np.zeros_like(self.embeddings),
            conv_weights=[np.zeros_like(w) for w in self.conv_weights],
            conv_biases=[np.zeros_like(b) for b in self.conv_biases],
            attention_query=np.zeros_like(self.attention_query),
            head_weights=np.zeros_like(self.head_weights),
            head_bias=np.zeros_like(self.head_bias),
        )


def _fill_uniform(rng: SeededRng, shape: tuple[int, ...]) -> np.ndarray:
    """Row-major fill with uniform draws in [-0.1, 0.1]; the draw order is
    part of the reproducibility contract."""
    out = np.empty(shape, dtype=np.float64)
    flat = out.reshape(-1)
    for i in range(flat.size):
        flat[i] = rng.uniform(-0.1, 0.1)
    return out


def init_params(vocab_size: int, config: TrainingConfig, rng: SeededRng) -> ParamSet:
    """Seeded initialization in a pinned order: embeddings, then each conv
    layer's weights and bias, then the attention query, then the head."""
    d = config.embedding_width
    span = (2 * config.window_size + 1) * d
    embeddings = _fill_uniform(rng, (vocab_size, d))
    conv_weights = []
    conv_biases = []
    for _ in range(config.encoder_depth):
        conv_weights.append(_fill_uniform(rng, (d, span)))
        conv_biases.append(_fill_uniform(rng, (d,)))
    attention_query = _fill_uniform(rng, (d,))
    head_weights = _fill_uniform(rng, (2, d))
    head_bias = _fill_uniform(rng, (2,))
    return ParamSet(embeddings, conv_weights, conv_biases, attention_query, head_weights, head_bias)


# ---------------------------------------------------------------------------
# Forward / backward
# ---------------------------------------------------------------------------

def _window_stack(x: np.ndarray, w: int) -> np.ndarray:
    n, d = x.shape
    padded = np.zeros((n + 2 * w, d), dtype=np.float64)
    padded[w : w + n] = x
    return np.hstack([padded[off : off + n] for off in range(2 * w + 1)])


def _fold_window_grad(d_windows: np.ndarray, n: int, d: int, w: int) -> np.ndarray:
    d_padded = np.zeros((n + 2 * w, d), dtype=np.float64)
    for off in range(2 * w + 1):
        d_padded[off : off + n] += d_windows[:, off * d : (off + 1) * d]
    return d_padded[w : w + n]


def _softmax(scores: np.ndarray) -> np.ndarray:
    shifted = scores - scores.max()
    exp = np.exp(shifted)
    return exp / exp.sum()


def _doc_forward(params: ParamSet, ids: Sequence[int], config: TrainingConfig):
    """Returns (text vector, attention weights, logits, caches)."""
    d = config.embedding_width
    if not ids:
        vector = np.zeros(d, dtype=np.float64)
        logits = params.head_weights @ vector + params.head_bias
        return vector, np.zeros(0, dtype=np.float64), logits, None
    w = config.window_size
    x = params.embeddings[list(ids)]
    layer_caches = []
    for weights, bias in zip(params.conv_weights, params.conv_biases):
        windows = _window_stack(x, w)
        activated = np.tanh(windows @ weights.T + bias)
        layer_caches.append((x, windows, activated))
        x = x + activated
    hidden = x
    if config.pooling == "attention":
        alpha = _softmax(hidden @ params.attention_query)
    else:
        alpha = np.full(len(ids), 1.0 / len(ids), dtype=np.float64)
    vector = hidden.T @ alpha
    logits = params.head_weights @ vector + params.head_bias
    return vector, alpha, logits, (x, layer_caches, hidden)


def _doc_backward(
    params: ParamSet,
    grads: ParamSet,
    ids: Sequence[int],
    alpha: np.ndarray,
    vector: np.ndarray,
    caches,
    d_logits: np.ndarray,
    config: TrainingConfig,
) -> None:
    """Accumulate gradients for one document into ``grads``."""
    grads.head_weights += np.outer(d_logits, vector)
    grads.head_bias += d_logits
    if not ids:
        return
    w = config.window_size
    d = config.embedding_width
    _, layer_caches, hidden = caches
    d_vector = params.head_weights.T @ d_logits
    if config.pooling == "attention":
        d_alpha = hidden @ d_vector
        d_hidden = alpha[:, None] * d_vector[None, :]
        d_scores = alpha * (d_alpha - float(alpha @ d_alpha))
        grads.attention_query += hidden.T @ d_scores
        d_hidden += d_scores[:, None] * params.attention_query[None, :]
    else:
        d_hidden = np.full((len(ids), d), 1.0 / len(ids)) * d_vector[None, :]
    d_x = d_hidden
    for layer in range(len(params.conv_weights) - 1, -1, -1):
        x_in, windows, activated = layer_caches[layer]
        d_act = d_x * (1.0 - activated * activated)
        grads.conv_weights[layer] += d_act.T @ windows
        grads.conv_biases[layer] += d_act.sum(axis=0)
        d_windows = d_act @ params.conv_weights[layer]
        d_x = d_x + _fold_window_grad(d_windows, len(ids), d, w)
    np.add.at(grads.embeddings, list(ids), d_x)


def batch_loss_and_grads(
    params: ParamSet,
    docs: Sequence[tuple[Sequence[int], int]],
    config: TrainingConfig,
):
    """Mean cross-entropy and its gradients over (token ids, class) docs."""
    if not docs:
        raise ValueError("empty batch")
    grads = params.zeros_like()
    total_loss = 0.0
    scale = 1.0 / len(docs)
    for ids, target in docs:
        vector, alpha, logits, caches = _doc_forward(params, ids, config)
        probs = _softmax(logits)
        total_loss += -np.log(max(probs[target], 1e-300))
        d_logits = probs.copy()
        d_logits[target] -= 1.0
        _doc_backward(params, grads, ids, alpha, vector, caches, d_logits * scale, config)
    return total_loss * scale, grads


# ---------------------------------------------------------------------------
# Public inference API
# ---------------------------------------------------------------------------

def _params_from_model(model: ClassifierModel) -> ParamSet:
    return ParamSet(
        embeddings=model.embeddings.matrix,
        conv_weights=list(model.conv_weights),
        conv_biases=list(model.conv_biases),
        attention_query=model.attention_query,
        head_weights=model.head_weights,
        head_bias=model.head_bias,
    )


def encode(model: ClassifierModel, tokens: Sequence[str]) -> EncodedText:
    """Reduce a token list to one text vector; an empty list yields the zero
    vector flagged as degenerate."""
    ids = model.vocabulary.ids_for(tokens)
    vector, alpha, _, _ = _doc_forward(_params_from_model(model), ids, model.config)
    return EncodedText(vector=vector, attention=alpha, degenerate=len(ids) == 0)


def predict_tokens(model: ClassifierModel, tokens: Sequence[str]) -> Prediction:
    ids = model.vocabulary.ids_for(tokens)
    _, _, logits, _ = _doc_forward(_params_from_model(model), ids, model.config)
    probs = _softmax(logits)
    label = LABELS[int(np.argmax(probs))]
    return Prediction(label=label, probabilities={l: float(p) for l, p in zip(LABELS, probs)})


def predict(model: ClassifierModel, post: Post) -> Prediction:
    return predict_tokens(model, tokenize(post.text))


# ---------------------------------------------------------------------------
# Training
# ---------------------------------------------------------------------------

def _class_index(label: Label) -> int:
    return LABELS.index(label)


def _to_docs(posts: Sequence[LabeledPost], vocab: Vocabulary) -> list[tuple[list[int], int]]:
    return [(vocab.ids_for(tokenize(lp.post.text)), _class_index(lp.label)) for lp in posts]


def _macro_f1(golds: Sequence[int], preds: Sequence[int]) -> float:
    f1s = []
    for c in range(2):
        tp = sum(1 for g, p in zip(golds, preds) if g == c and p == c)
        fp = sum(1 for g, p in zip(golds, preds) if g != c and p == c)
        fn = sum(1 for g, p in zip(golds, preds) if g == c and p != c)
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1s.append(2 * precision * recall / (precision + recall) if precision + recall else 0.0)
    return sum(f1s) / len(f1s)


def _predict_ids(params: ParamSet, ids: Sequence[int], config: TrainingConfig) -> int:
    _, _, logits, _ = _doc_forward(params, ids, config)
    return int(np.argmax(_softmax(logits)))


def load_pretrained_embeddings(
    path: PathLike,
    vocabulary: Vocabulary,
    width: int,
    seed: int = 0,
) -> EmbeddingTable:
    """Load word2vec-style text embeddings for the vocabulary.

    The file starts with a "count width" header line followed by one
    "term v1 ... vd" line per term. Vocabulary terms absent from the file
    keep their seeded random initialization; the file width must equal the
    configured embedding width.
    """
    matrix = _fill_uniform(SeededRng(seed), (vocabulary.size, width))
    with open(path, "r", encoding="utf-8") as handle:
        header = handle.readline().split()
        if len(header) != 2:
            raise ModelFormatError(f"{path}: malformed embeddings header")
        try:
            _, file_width = int(header[0]), int(header[1])
        except ValueError:
            raise ModelFormatError(f"{path}: malformed embeddings header") from None
        if file_width != width:
            raise ModelFormatError(
                f"{path}: embedding width {file_width} does not match configured width {width}"
            )
        for line_no, line in enumerate(handle, start=2):
            if not line.strip():
                continue
            parts = line.rstrip("\n").split(" ")
            if len(parts) != width + 1:
                raise ModelFormatError(f"{path}: line {line_no}: expected {width + 1} fields")
            term = parts[0]
            if term not in vocabulary.index:
                continue
            try:
                values = [float(v) for v in parts[1:]]
            except ValueError:
                raise ModelFormatError(f"{path}: line {line_no}: non-numeric value") from None
            matrix[vocabulary.index[term]] = values
    return EmbeddingTable(matrix=matrix, provenance=PRETRAINED, source_path=str(path))


def train(
    train_posts: Sequence[LabeledPost],
    validation_posts: Sequence[LabeledPost],
    config: TrainingConfig,
    mode: EmbeddingsMode = EmbeddingsMode(RANDOM_INIT),
    trained_on: Optional[DatasetKey] = None,
) -> ClassifierModel:
    """Mini-batch SGD on mean cross-entropy with the pinned update rule.

    Batches are shuffled with the config seed each epoch; when a validation
    set is given, the parameters of the epoch with the best validation macro
    F1 are kept and training stops after ``early_stop_patience`` epochs
    without improvement. Same seed, data and config give identical models.
    """
    if not train_posts:
        raise ValueError("cannot train on an empty train set")
    vocab = build_vocab(train_posts, config.min_frequency)
    rng = SeededRng(config.seed)
    params = init_params(vocab.size, config, rng)
    provenance = RANDOM_INIT
    source_path = None
    if mode.kind == PRETRAINED:
        table = load_pretrained_embeddings(mode.path, vocab, config.embedding_width, config.seed)
        params.embeddings = table.matrix.copy()
        provenance, source_path = PRETRAINED, table.source_path
    docs = _to_docs(train_posts, vocab)
    val_docs = _to_docs(validation_posts, vocab) if validation_posts else []

    best_params = None
    best_f1 = -1.0
    epochs_since_best = 0
    order = list(range(len(docs)))
    for epoch in range(1, config.epochs + 1):
        rng.shuffle(order)
        for start in range(0, len(order), config.batch_size):
            batch = [docs[i] for i in order[start : start + config.batch_size]]
            loss, grads = batch_loss_and_grads(params, batch, config)
            if not np.isfinite(loss):
                raise TrainingDivergedError(f"non-finite loss at epoch {epoch}")
            for (_, arr), (_, grad) in zip(params.named_arrays(), grads.named_arrays()):
                arr -= config.learning_rate * grad
        if val_docs:
            preds = [_predict_ids(params, ids, config) for ids, _ in val_docs]
            f1 = _macro_f1([target for _, target in val_docs], preds)
            if f1 > best_f1:
                best_f1 = f1
                best_params = params.copy()
                epochs_since_best = 0
            else:
                epochs_since_best += 1
                if epochs_since_best > config.early_stop_patience:
                    break
    final = best_params if best_params is not None else params
    return _assemble_model(vocab, final, config, provenance, source_path, trained_on)


def _assemble_model(
    vocab: Vocabulary,
    params: ParamSet,
    config: TrainingConfig,
    provenance: str,
    source_path: Optional[str],
    trained_on: Optional[DatasetKey],
) -> ClassifierModel:
    def frozen(arr: np.ndarray) -> np.ndarray:
        out = arr.copy()
        out.flags.writeable = False
        return out

    return ClassifierModel(
        vocabulary=vocab,
        embeddings=EmbeddingTable(
            matrix=frozen(params.embeddings),
            provenance=provenance,
            source_path=source_path,
        ),
        conv_weights=tuple(frozen(w) for w in params.conv_weights),
        conv_biases=tuple(frozen(b) for b in params.conv_biases),
        attention_query=frozen(params.attention_query),
        head_weights=frozen(params.head_weights),
        head_bias=frozen(params.head_bias),
        config=config,
        seed=config.seed,
        trained_on=trained_on,
    )


# ---------------------------------------------------------------------------
# Model persistence
# ---------------------------------------------------------------------------

def _encode_array(arr: np.ndarray) -> dict:
    return {
        "shape": list(arr.shape),
        "data": base64.b64encode(np.ascontiguousarray(arr, dtype="<f8").tobytes()).decode("ascii"),
    }


def _decode_array(entry: dict) -> np.ndarray:
    data = base64.b64decode(entry["data"])
    arr = np.frombuffer(data, dtype="<f8").astype(np.float64)
    return arr.reshape(entry["shape"])


def _model_payload(model: ClassifierModel) -> dict:
    arrays = {
        "embeddings": _encode_array(model.embeddings.matrix),
        "attention_query": _encode_array(model.attention_query),
        "head_weights": _encode_array(model.head_weights),
        "head_bias": _encode_array(model.head_bias),
    }
    for i, (w, b) in enumerate(zip(model.conv_weights, model.conv_biases)):
        arrays[f"conv_weights_{i}"] = _encode_array(w)
        arrays[f"conv_biases_{i}"] = _encode_array(b)
    trained_on = None
    if model.trained_on is not None:
        trained_on = {"source": model.trained_on.source, "domain": model.trained_on.domain}
    return {
        "config": {
            "epochs": model.config.epochs,
            "learning_rate": model.config.learning_rate,
            "batch_size": model.config.batch_size,
            "early_stop_patience": model.config.early_stop_patience,
            "seed": model.config.seed,
            "encoder_depth": model.config.encoder_depth,
            "embedding_width": model.config.embedding_width,
            "window_size": model.config.window_size,
            "pooling": model.config.pooling,
            "min_frequency": model.config.min_frequency,
        },
        "seed": model.seed,
        "trained_on": trained_on,
        "provenance": {
            "kind": model.embeddings.provenance,
            "path": model.embeddings.source_path,
        },
        "vocabulary": {
            "terms": model.vocabulary.terms_by_index(),
            "min_frequency": model.vocabulary.min_frequency,
        },
        "arrays": arrays,
    }


def _payload_checksum(payload: dict) -> str:
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def save_model(model: ClassifierModel, path: PathLike) -> str:
    """Write the model as a versioned, checksummed JSON container.

    Returns the content checksum. Identical models produce byte-identical
    files.
    """
    payload = _model_payload(model)
    checksum = _payload_checksum(payload)
    document = {
        "format": MODEL_FORMAT,
        "format_version": MODEL_FORMAT_VERSION,
        "checksum": checksum,
        "model": payload,
    }
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(document, handle, sort_keys=True, separators=(",", ":"))
        handle.write("\n")
    return checksum


def load_model(path: PathLike) -> ClassifierModel:
    """Read a model container, verifying the format version and checksum."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            document = json.load(handle)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{path}: corrupt model file ({exc.msg})") from None
    if not isinstance(document, dict) or document.get("format") != MODEL_FORMAT:
        raise ModelFormatError(f"{path}: not a {MODEL_FORMAT} file")
    version = document.get("format_version")
    if version != MODEL_FORMAT_VERSION:
        raise ModelFormatError(
            f"{path}: unsupported format version {version!r} "
            f"(expected {MODEL_FORMAT_VERSION})"
        )
    payload = document.get("model")
    if not isinstance(payload, dict):
        raise ModelFormatError(f"{path}: missing model payload")
    if _payload_checksum(payload) != document.get("checksum"):
        raise ModelFormatError(f"{path}: checksum mismatch")
    config = TrainingConfig(**payload["config"])
    terms = payload["vocabulary"]["terms"]
    vocab = Vocabulary(
        index={term: i for i, term in enumerate(terms)},
        min_frequency=payload["vocabulary"]["min_frequency"],
    )
    arrays = payload["arrays"]
    params = ParamSet(
        embeddings=_decode_array(arrays["embeddings"]),
        conv_weights=[
            _decode_array(arrays[f"conv_weights_{i}"]) for i in range(config.encoder_depth)
        ],
        conv_biases=[
            _decode_array(arrays[f"conv_biases_{i}"]) for i in range(config.encoder_depth)
        ],
        attention_query=_decode_array(arrays["attention_query"]),
        head_weights=_decode_array(arrays["head_weights"]),
        head_bias=_decode_array(arrays["head_bias"]),
    )
    trained_on = None
    if payload.get("trained_on"):
        trained_on = DatasetKey(**payload["trained_on"])
    provenance = payload.get("provenance", {})
    return _assemble_model(
        vocab,
        params,
        config,
        provenance.get("kind", RANDOM_INIT),
        provenance.get("path"),
        trained_on,
    )
