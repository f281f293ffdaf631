"""File loading, deduplication, seeded stratified splits, bundle combination."""

import json

import pytest

from patientvoice.corpus import DatasetKey, Label, LabeledPost, Post, SplitBundle
from patientvoice.ingestion import (
    CSV,
    IngestConfig,
    IngestError,
    combine_bundles,
    deduplicate,
    load_annotations,
    load_labeled_posts,
    load_posts,
    stratified_split,
)


def _write_jsonl(path, records):
    path.write_text("\n".join(json.dumps(r) for r in records) + "\n", encoding="utf-8")


def _post(post_id, text="hello world", source="reddit", domain="oncology"):
    return Post(post_id, source, domain, text)


def _lp(post_id, label, text=None):
    return LabeledPost(_post(post_id, text or f"text {post_id}"), label)


class TestLoadPosts:
    def test_empty_file(self, tmp_path):
        path = tmp_path / "posts.jsonl"
        path.write_text("", encoding="utf-8")
        assert load_posts(path) == []

    def test_three_records_in_order(self, tmp_path):
        path = tmp_path / "posts.jsonl"
        records = [
            {"id": "a", "source": "reddit", "domain": "oncology", "text": "one"},
            {"id": "b", "source": "reddit", "domain": "oncology", "text": "two", "extra": 1},
            {"id": "c", "source": "socialgist", "domain": "neurology", "text": "three",
             "created_at": 1700000000},
        ]
        _write_jsonl(path, records)
        posts = load_posts(path)
        assert [p.id for p in posts] == ["a", "b", "c"]
        assert posts[2].created_at == 1700000000
        assert posts[0].created_at is None

    def test_missing_text_names_line(self, tmp_path):
        path = tmp_path / "posts.jsonl"
        _write_jsonl(path, [
            {"id": "a", "source": "reddit", "domain": "oncology", "text": "ok"},
            {"id": "b", "source": "reddit", "domain": "oncology"},
        ])
        with pytest.raises(IngestError, match="line 2"):
            load_posts(path)

    def test_invalid_json_names_line(self, tmp_path):
        path = tmp_path / "posts.jsonl"
        path.write_text('{"id": "a", "source": "r", "domain": "d", "text": "x"}\nnot json\n')
        with pytest.raises(IngestError, match="line 2"):
            load_posts(path)

    def test_csv_round_trip(self, tmp_path):
        path = tmp_path / "posts.csv"
        path.write_text(
            "id,source,domain,text,created_at\n"
            "a,reddit,oncology,hello,\n"
            "b,socialgist,neurology,bye,1700000001\n",
            encoding="utf-8",
        )
        posts = load_posts(path, CSV)
        assert [p.id for p in posts] == ["a", "b"]
        assert posts[0].created_at is None
        assert posts[1].created_at == 1700000001

    def test_crlf_accepted(self, tmp_path):
        path = tmp_path / "posts.jsonl"
        record = json.dumps({"id": "a", "source": "r", "domain": "d", "text": "x"})
        path.write_bytes((record + "\r\n").encode("utf-8"))
        assert load_posts(path)[0].id == "a"

    def test_labeled_posts(self, tmp_path):
        path = tmp_path / "posts.jsonl"
        _write_jsonl(path, [
            {"id": "a", "source": "r", "domain": "d", "text": "x", "label": "patient_voice"},
            {"id": "b", "source": "r", "domain": "d", "text": "y", "label": "not_relevant"},
        ])
        labeled = load_labeled_posts(path)
        assert [lp.label for lp in labeled] == [Label.PATIENT_VOICE, Label.NOT_RELEVANT]

    def test_labeled_posts_bad_label(self, tmp_path):
        path = tmp_path / "posts.jsonl"
        _write_jsonl(path, [{"id": "a", "source": "r", "domain": "d", "text": "x", "label": "patient"}])
        with pytest.raises(IngestError, match="unknown label"):
            load_labeled_posts(path)


class TestDeduplicate:
    def test_empty(self):
        assert deduplicate([]) == []

    def test_matching_text_keeps_first(self):
        posts = [_post("a", "same body"), _post("b", "same body")]
        assert [p.id for p in deduplicate(posts)] == ["a"]

    def test_matching_id_keeps_first(self):
        posts = [_post("a", "one"), _post("a", "two")]
        assert [p.text for p in deduplicate(posts)] == ["one"]

    def test_all_unique_unchanged(self):
        posts = [_post(f"p{i}", f"text {i}") for i in range(5)]
        assert deduplicate(posts) == posts

    def test_nfc_normalized_text_match(self):
        composed = "café"            # precomposed e-acute
        decomposed = "café"         # e + combining accent
        posts = [_post("a", composed), _post("b", decomposed)]
        assert [p.id for p in deduplicate(posts)] == ["a"]

    def test_idempotent(self):
        posts = [_post("a", "x"), _post("b", "x"), _post("c", "y")]
        once = deduplicate(posts)
        assert deduplicate(once) == once


class TestStratifiedSplit:
    def test_documented_counts(self):
        posts = [_lp(f"pv{i}", Label.PATIENT_VOICE) for i in range(6)]
        posts += [_lp(f"nr{i}", Label.NOT_RELEVANT) for i in range(4)]
        train, validation = stratified_split(posts, 0.8, seed=1)
        train_pv = sum(1 for lp in train if lp.label is Label.PATIENT_VOICE)
        train_nr = len(train) - train_pv
        assert (train_pv, train_nr) == (5, 3)
        assert len(validation) == 2

    def test_two_posts_all_to_train(self):
        posts = [_lp("a", Label.PATIENT_VOICE), _lp("b", Label.NOT_RELEVANT)]
        train, validation = stratified_split(posts, 0.8, seed=5)
        assert len(train) == 2 and validation == []

    def test_same_seed_bit_identical(self):
        posts = [_lp(f"p{i}", Label.PATIENT_VOICE if i % 3 else Label.NOT_RELEVANT)
                 for i in range(30)]
        first = stratified_split(posts, 0.8, seed=99)
        second = stratified_split(posts, 0.8, seed=99)
        assert first == second

    def test_different_seeds_differ(self):
        posts = [_lp(f"p{i}", Label.PATIENT_VOICE if i % 3 else Label.NOT_RELEVANT)
                 for i in range(30)]
        assert stratified_split(posts, 0.8, 1) != stratified_split(posts, 0.8, 2)

    def test_union_preserved(self):
        posts = [_lp(f"p{i}", Label.PATIENT_VOICE if i % 2 else Label.NOT_RELEVANT)
                 for i in range(17)]
        train, validation = stratified_split(posts, 0.7, seed=4)
        assert sorted(lp.post.id for lp in train + validation) == sorted(
            lp.post.id for lp in posts
        )

    def test_missing_class_rejected(self):
        posts = [_lp(f"p{i}", Label.PATIENT_VOICE) for i in range(5)]
        with pytest.raises(ValueError, match="cannot stratify"):
            stratified_split(posts, 0.8, seed=0)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            stratified_split([], 0.8, seed=0)

    def test_bad_fraction_rejected(self):
        posts = [_lp("a", Label.PATIENT_VOICE), _lp("b", Label.NOT_RELEVANT)]
        for fraction in (0.0, 1.0, -0.1, 1.5):
            with pytest.raises(ValueError):
                stratified_split(posts, fraction, seed=0)


class TestCombineBundles:
    def _bundle(self, key, n_train, prefix):
        train = tuple(_lp(f"{prefix}{i}", Label.PATIENT_VOICE) for i in range(n_train))
        return SplitBundle(key, train)

    def test_sizes_add_exactly(self):
        a = self._bundle(DatasetKey("reddit", "cardiovascular"), 884, "r")
        b = self._bundle(DatasetKey("socialgist", "cardiovascular"), 876, "sg")
        combined = combine_bundles([a, b], DatasetKey("combined", "cardiovascular"))
        assert len(combined.train) == 1760

    def test_identity_with_empty_bundle(self):
        a = self._bundle(DatasetKey("reddit", "oncology"), 3, "r")
        empty = SplitBundle(DatasetKey("socialgist", "oncology"))
        combined = combine_bundles([a, empty], DatasetKey("combined", "oncology"))
        assert combined.train == a.train
        assert combined.validation == () and combined.test == ()

    def test_id_collision_rejected(self):
        a = SplitBundle(DatasetKey("reddit", "oncology"), (_lp("p9", Label.PATIENT_VOICE),))
        b = SplitBundle(DatasetKey("socialgist", "oncology"), (), (), (_lp("p9", Label.NOT_RELEVANT),))
        with pytest.raises(ValueError, match="p9"):
            combine_bundles([a, b], DatasetKey.all_data())


class TestLoadAnnotations:
    def test_empty(self, tmp_path):
        path = tmp_path / "ann.jsonl"
        path.write_text("", encoding="utf-8")
        assert load_annotations(path) == []

    def test_jsonl_records(self, tmp_path):
        path = tmp_path / "ann.jsonl"
        _write_jsonl(path, [
            {"post_id": "p1", "annotator_id": "a", "label": "patient_voice"},
            {"post_id": "p2", "annotator_id": "a", "label": "not_relevant"},
            {"post_id": "p1", "annotator_id": "b", "label": "patient_voice"},
            {"post_id": "p2", "annotator_id": "b", "label": "patient_voice"},
        ])
        records = load_annotations(path)
        assert len(records) == 4
        assert records[0].annotator_id == "a"
        assert records[3].label is Label.PATIENT_VOICE

    def test_csv_sniffed(self, tmp_path):
        path = tmp_path / "ann.csv"
        path.write_text(
            "post_id,annotator_id,label\np1,a,patient_voice\np1,b,not_relevant\n",
            encoding="utf-8",
        )
        records = load_annotations(path)
        assert len(records) == 2
        assert records[1].label is Label.NOT_RELEVANT

    def test_unknown_label_rejected(self, tmp_path):
        path = tmp_path / "ann.jsonl"
        _write_jsonl(path, [{"post_id": "p1", "annotator_id": "a", "label": "patient"}])
        with pytest.raises(IngestError, match="unknown label"):
            load_annotations(path)


class TestIngestConfig:
    def test_valid(self):
        config = IngestConfig(("a.jsonl",), seed=3)
        assert config.train_fraction == 0.8

    def test_fraction_bounds(self):
        with pytest.raises(ValueError):
            IngestConfig(("a.jsonl",), train_fraction=1.0)

    def test_requires_paths(self):
        with pytest.raises(ValueError):
            IngestConfig(())
