"""Vocabulary, encoding, training, persistence and model properties."""

import hashlib

import numpy as np
import pytest

from patientvoice import classifier as clf
from patientvoice.corpus import DatasetKey, Label, LabeledPost, Post
from patientvoice.rng import SeededRng

PV, NR = Label.PATIENT_VOICE, Label.NOT_RELEVANT


def _lp(post_id, text, label=PV):
    return LabeledPost(Post(post_id, "reddit", "oncology", text), label)


def toy_corpus():
    """40 posts over two disjoint vocabularies, linearly separable."""
    posts = []
    for i in range(20):
        posts.append(_lp(f"pv{i}", f"alpha beta gamma delta tok{i % 5}", PV))
        posts.append(_lp(f"nr{i}", f"omega sigma lambda kappa tok{i % 5 + 5}", NR))
    return posts


def tiny_config(**overrides):
    base = dict(
        epochs=3, learning_rate=0.1, batch_size=4, embedding_width=8,
        encoder_depth=1, seed=11,
    )
    base.update(overrides)
    return clf.TrainingConfig(**base)


class TestBuildVocab:
    def test_frequency_then_term_ordering(self):
        train = [_lp("1", "a b"), _lp("2", "b c")]
        vocab = clf.build_vocab(train, min_frequency=1)
        assert vocab.index[clf.PADDING_TOKEN] == 0
        assert vocab.index[clf.UNKNOWN_TOKEN] == 1
        assert vocab.index["b"] == 2
        assert vocab.index["a"] == 3
        assert vocab.index["c"] == 4

    def test_min_frequency_filter(self):
        train = [_lp("1", "a b"), _lp("2", "b c")]
        vocab = clf.build_vocab(train, min_frequency=2)
        assert set(vocab.index) == {clf.PADDING_TOKEN, clf.UNKNOWN_TOKEN, "b"}

    def test_deterministic(self):
        train = [_lp("1", "z y x w"), _lp("2", "x w v")]
        assert clf.build_vocab(train).index == clf.build_vocab(train).index

    def test_empty_train_rejected(self):
        with pytest.raises(ValueError):
            clf.build_vocab([])

    def test_unknown_maps_oov(self):
        vocab = clf.build_vocab([_lp("1", "a b")])
        assert vocab.id_for("never-seen") == vocab.unknown_id


class TestEncode:
    def _model(self, **overrides):
        return clf.train(toy_corpus(), [], tiny_config(epochs=1, **overrides))

    def test_single_token_attention_is_one(self):
        model = self._model()
        encoded = clf.encode(model, ["alpha"])
        assert encoded.attention.shape == (1,)
        assert encoded.attention[0] == pytest.approx(1.0)
        assert not encoded.degenerate

    def test_empty_text_zero_vector_flagged(self):
        model = self._model()
        encoded = clf.encode(model, [])
        assert encoded.degenerate
        np.testing.assert_array_equal(encoded.vector, 0.0)

    def test_two_identical_tokens_match_single_at_depth_zero(self):
        model = self._model(encoder_depth=0)
        one = clf.encode(model, ["alpha"])
        two = clf.encode(model, ["alpha", "alpha"])
        np.testing.assert_allclose(two.vector, one.vector, atol=1e-12)
        np.testing.assert_allclose(two.attention, 0.5, atol=1e-12)

    def test_attention_weights_sum_to_one(self):
        model = self._model()
        rng = SeededRng(3)
        words = ["alpha", "beta", "gamma", "omega", "zzz"]
        for _ in range(20):
            tokens = [words[rng.below(len(words))] for _ in range(1 + rng.below(8))]
            encoded = clf.encode(model, tokens)
            assert np.all(encoded.attention >= 0.0)
            assert encoded.attention.sum() == pytest.approx(1.0, abs=1e-9)

    def test_order_invariance_at_depth_zero_only(self):
        model = self._model(encoder_depth=0)
        forward = clf.encode(model, ["alpha", "beta", "gamma"]).vector
        backward = clf.encode(model, ["gamma", "beta", "alpha"]).vector
        np.testing.assert_allclose(forward, backward, atol=1e-12)

    def test_order_sensitivity_with_convolution(self):
        model = self._model(encoder_depth=2)
        forward = clf.encode(model, ["alpha", "beta", "gamma"]).vector
        backward = clf.encode(model, ["gamma", "beta", "alpha"]).vector
        assert not np.allclose(forward, backward)

    def test_mean_pooling_uniform_weights(self):
        model = self._model(pooling="mean")
        encoded = clf.encode(model, ["alpha", "beta", "gamma"])
        np.testing.assert_allclose(encoded.attention, 1 / 3, atol=1e-12)


class TestPredict:
    def test_probabilities_sum_to_one(self):
        model = clf.train(toy_corpus(), [], tiny_config(epochs=1))
        for text in ("alpha beta", "", "omega omega omega", "unseen words here"):
            prediction = clf.predict(model, Post("x", "reddit", "oncology", text))
            total = sum(prediction.probabilities.values())
            assert total == pytest.approx(1.0, abs=1e-9)
            best = max(prediction.probabilities, key=prediction.probabilities.get)
            assert prediction.label is best

    def test_empty_text_uses_head_bias(self):
        model = clf.train(toy_corpus(), [], tiny_config(epochs=1))
        prediction = clf.predict(model, Post("x", "reddit", "oncology", ""))
        bias = model.head_bias
        expected = np.exp(bias - bias.max())
        expected = expected / expected.sum()
        assert prediction.probabilities[PV] == pytest.approx(expected[0], abs=1e-12)

    def test_constant_score_shift_keeps_argmax(self):
        model = clf.train(toy_corpus(), [], tiny_config())
        posts = [lp.post for lp in toy_corpus()]
        base = [clf.predict(model, p).label for p in posts]
        shifted_bias = model.head_bias + 5.0
        shifted = clf.ClassifierModel(
            vocabulary=model.vocabulary,
            embeddings=model.embeddings,
            conv_weights=model.conv_weights,
            conv_biases=model.conv_biases,
            attention_query=model.attention_query,
            head_weights=model.head_weights,
            head_bias=shifted_bias,
            config=model.config,
            seed=model.seed,
        )
        assert [clf.predict(shifted, p).label for p in posts] == base

    def test_overfit_toy_corpus(self):
        posts = toy_corpus()
        model = clf.train(posts, [], clf.TrainingConfig(epochs=200, seed=7))
        assert all(clf.predict(model, lp.post).label is lp.label for lp in posts)


class TestTraining:
    def test_zero_learning_rate_keeps_parameters(self):
        posts = toy_corpus()
        config = tiny_config(learning_rate=0.0, epochs=2)
        model = clf.train(posts, [], config)
        vocab = clf.build_vocab(posts, config.min_frequency)
        fresh = clf.init_params(vocab.size, config, SeededRng(config.seed))
        np.testing.assert_array_equal(model.embeddings.matrix, fresh.embeddings)
        np.testing.assert_array_equal(model.head_weights, fresh.head_weights)

    def test_same_seed_identical_models(self, tmp_path):
        posts = toy_corpus()
        config = tiny_config(epochs=4, seed=7)
        checksums = []
        for name in ("m1.json", "m2.json"):
            model = clf.train(posts, [], config)
            checksums.append(clf.save_model(model, tmp_path / name))
        assert checksums[0] == checksums[1]
        assert (tmp_path / "m1.json").read_bytes() == (tmp_path / "m2.json").read_bytes()

    def test_different_seed_differs(self):
        posts = toy_corpus()
        a = clf.train(posts, [], tiny_config(seed=1))
        b = clf.train(posts, [], tiny_config(seed=2))
        assert not np.array_equal(a.embeddings.matrix, b.embeddings.matrix)

    def test_early_stopping_keeps_best_epoch(self):
        posts = toy_corpus()
        validation = posts[:10]
        config = tiny_config(epochs=50, early_stop_patience=2)
        model = clf.train(posts, validation, config)
        assert all(clf.predict(model, lp.post).label is lp.label for lp in validation)

    def test_empty_train_rejected(self):
        with pytest.raises(ValueError):
            clf.train([], [], tiny_config())

    def test_config_validation(self):
        with pytest.raises(ValueError):
            clf.TrainingConfig(epochs=0)
        with pytest.raises(ValueError):
            clf.TrainingConfig(embedding_width=1)
        with pytest.raises(ValueError):
            clf.TrainingConfig(pooling="max")
        with pytest.raises(ValueError):
            clf.TrainingConfig(learning_rate=-0.1)


class TestGradients:
    def _check(self, config, n_vocab=12, h=1e-5, limit=1e-4):
        params = clf.init_params(n_vocab, config, SeededRng(5))
        docs = [(list(range(1, n_vocab)), 0), ([3, 5, 2], 1), ([n_vocab - 1, 1], 0)]
        _, grads = clf.batch_loss_and_grads(params, docs, config)
        worst = 0.0
        for (name, arr), (_, grad) in zip(params.named_arrays(), grads.named_arrays()):
            flat, gflat = arr.reshape(-1), grad.reshape(-1)
            for i in range(flat.size):
                original = flat[i]
                flat[i] = original + h
                loss_plus, _ = clf.batch_loss_and_grads(params, docs, config)
                flat[i] = original - h
                loss_minus, _ = clf.batch_loss_and_grads(params, docs, config)
                flat[i] = original
                numeric = (loss_plus - loss_minus) / (2 * h)
                if gflat[i] == 0.0 and abs(numeric) < 1e-10:
                    continue
                relative = abs(gflat[i] - numeric) / max(abs(gflat[i]), abs(numeric), 1e-8)
                worst = max(worst, relative)
        assert worst < limit, f"max relative gradient error {worst}"

    def test_attention_one_layer(self):
        self._check(clf.TrainingConfig(embedding_width=8, encoder_depth=1, seed=3))

    def test_no_convolution(self):
        self._check(clf.TrainingConfig(embedding_width=6, encoder_depth=0, seed=4))

    def test_mean_pooling(self):
        self._check(clf.TrainingConfig(embedding_width=6, encoder_depth=1, pooling="mean", seed=6))


class TestPretrainedEmbeddings:
    def _vocab(self):
        return clf.build_vocab([_lp("1", "alpha beta gamma")])

    def _write_vec(self, path, rows, width):
        lines = [f"{len(rows)} {width}"]
        for term, values in rows:
            lines.append(term + " " + " ".join(f"{v:.4f}" for v in values))
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    def test_full_coverage_no_random_rows(self, tmp_path):
        vocab = self._vocab()
        width = 4
        rows = [(term, [float(i)] * width) for i, term in enumerate(["alpha", "beta", "gamma"])]
        path = tmp_path / "emb.vec"
        self._write_vec(path, rows, width)
        table = clf.load_pretrained_embeddings(path, vocab, width, seed=1)
        np.testing.assert_array_equal(table.matrix[vocab.index["alpha"]], 0.0)
        np.testing.assert_array_equal(table.matrix[vocab.index["gamma"]], 2.0)
        assert table.provenance == clf.PRETRAINED

    def test_empty_overlap_equals_random_init(self, tmp_path):
        vocab = self._vocab()
        width = 4
        path = tmp_path / "emb.vec"
        self._write_vec(path, [("nothing", [1.0] * width)], width)
        table = clf.load_pretrained_embeddings(path, vocab, width, seed=9)
        expected = clf._fill_uniform(SeededRng(9), (vocab.size, width))
        np.testing.assert_array_equal(table.matrix, expected)

    def test_width_mismatch_rejected(self, tmp_path):
        vocab = self._vocab()
        path = tmp_path / "emb.vec"
        self._write_vec(path, [("alpha", [1.0] * 50)], 50)
        with pytest.raises(clf.ModelFormatError, match="width"):
            clf.load_pretrained_embeddings(path, vocab, 96, seed=1)

    def test_malformed_line_rejected(self, tmp_path):
        vocab = self._vocab()
        path = tmp_path / "emb.vec"
        path.write_text("1 3\nalpha 0.5 oops 0.1\n", encoding="utf-8")
        with pytest.raises(clf.ModelFormatError, match="line 2"):
            clf.load_pretrained_embeddings(path, vocab, 3, seed=1)

    def test_training_with_pretrained_mode(self, tmp_path):
        posts = toy_corpus()
        vocab = clf.build_vocab(posts, 1)
        width = 8
        terms = [t for t in vocab.terms_by_index() if not t.startswith("<")]
        rng = SeededRng(33)
        rows = [(t, [rng.uniform(-0.5, 0.5) for _ in range(width)]) for t in terms]
        path = tmp_path / "emb.vec"
        self._write_vec(path, rows, width)
        mode = clf.EmbeddingsMode(clf.PRETRAINED, str(path))
        model = clf.train(posts, [], tiny_config(epochs=1), mode)
        assert model.embeddings.provenance == clf.PRETRAINED
        assert model.embeddings.source_path == str(path)


class TestPersistence:
    def test_round_trip_identical_predictions(self, tmp_path):
        posts = toy_corpus()
        model = clf.train(posts, [], tiny_config(), trained_on=DatasetKey("reddit", "oncology"))
        path = tmp_path / "model.json"
        clf.save_model(model, path)
        loaded = clf.load_model(path)
        assert loaded.trained_on == DatasetKey("reddit", "oncology")
        for lp in posts[:10]:
            a = clf.predict(model, lp.post)
            b = clf.predict(loaded, lp.post)
            assert a.label is b.label
            for label in (PV, NR):
                assert a.probabilities[label] == b.probabilities[label]

    def test_truncated_file_rejected(self, tmp_path):
        model = clf.train(toy_corpus(), [], tiny_config(epochs=1))
        path = tmp_path / "model.json"
        clf.save_model(model, path)
        data = path.read_bytes()
        path.write_bytes(data[: len(data) // 2])
        with pytest.raises(clf.ModelFormatError, match="corrupt"):
            clf.load_model(path)

    def test_tampered_payload_checksum_mismatch(self, tmp_path):
        import json

        model = clf.train(toy_corpus(), [], tiny_config(epochs=1))
        path = tmp_path / "model.json"
        clf.save_model(model, path)
        document = json.loads(path.read_text())
        document["model"]["seed"] = 999
        path.write_text(json.dumps(document))
        with pytest.raises(clf.ModelFormatError, match="checksum"):
            clf.load_model(path)

    def test_version_mismatch_rejected(self, tmp_path):
        import json

        model = clf.train(toy_corpus(), [], tiny_config(epochs=1))
        path = tmp_path / "model.json"
        clf.save_model(model, path)
        document = json.loads(path.read_text())
        document["format_version"] = 99
        path.write_text(json.dumps(document))
        with pytest.raises(clf.ModelFormatError, match="version"):
            clf.load_model(path)

    def test_checksum_is_content_hash(self, tmp_path):
        model = clf.train(toy_corpus(), [], tiny_config(epochs=1))
        path = tmp_path / "model.json"
        checksum = clf.save_model(model, path)
        assert len(checksum) == 64
        int(checksum, 16)
