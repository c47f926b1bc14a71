import numpy as np
import pytest

from graphplan.corpus import Story
from graphplan.topics import (
    TopicModelError,
    assign_story_topics,
    fit_lda,
    infer_topic,
    load_topic_model,
    make_lda_documents,
    save_topic_model,
)

from conftest import cluster_purity, make_chain, planted_topic_documents


class TestFitLda:
    def test_single_topic_counts(self):
        docs = [["apple", "pear"], ["apple", "apple", "plum"]]
        model = fit_lda(docs, k=1, iterations=5, seed=0)
        assert np.array_equal(model.doc_topic[:, 0], [2, 3])
        assert model.topic_totals[0] == 5
        assert model.topic_word.sum() == 5

    def test_determinism(self):
        docs, _ = planted_topic_documents(n_topics=2, docs_per_topic=10, seed=1)
        a = fit_lda(docs, k=2, iterations=20, seed=9)
        b = fit_lda(docs, k=2, iterations=20, seed=9)
        np.testing.assert_array_equal(a.topic_word, b.topic_word)
        np.testing.assert_array_equal(a.doc_topic, b.doc_topic)

    def test_conservation_invariants(self):
        docs, _ = planted_topic_documents(n_topics=2, docs_per_topic=15, seed=2)
        model = fit_lda(docs, k=3, iterations=10, seed=2)
        total_tokens = sum(len(d) for d in docs)
        assert model.topic_totals.sum() == total_tokens
        np.testing.assert_array_equal(model.topic_word.sum(axis=1), model.topic_totals)
        np.testing.assert_array_equal(
            model.doc_topic.sum(axis=1), [len(d) for d in docs]
        )
        assert np.all(model.topic_word >= 0)

    def test_planted_two_topic_recovery(self):
        docs, labels = planted_topic_documents(n_topics=2, docs_per_topic=100, seed=3)
        model = fit_lda(docs, k=2, iterations=120, seed=3)
        assignments = np.argmax(model.doc_topic, axis=1)
        assert cluster_purity(assignments, labels, k=2) >= 0.9

    def test_empty_vocabulary_errors(self):
        with pytest.raises(TopicModelError, match="vocabulary"):
            fit_lda([[], []], k=2, iterations=5)

    def test_no_docs_errors(self):
        with pytest.raises(TopicModelError):
            fit_lda([], k=2, iterations=5)

    def test_bad_hyperparameters(self):
        with pytest.raises(TopicModelError):
            fit_lda([["a"]], k=0, iterations=5)
        with pytest.raises(TopicModelError):
            fit_lda([["a"]], k=1, alpha=-1.0, iterations=5)
        with pytest.raises(TopicModelError):
            fit_lda([["a"]], k=1, beta=0.0, iterations=5)


@pytest.fixture(scope="module")
def planted_model():
    docs, labels = planted_topic_documents(n_topics=2, docs_per_topic=80, seed=4)
    model = fit_lda(docs, k=2, iterations=120, seed=4)
    assignments = np.argmax(model.doc_topic, axis=1)
    # map planted label -> model topic via majority vote
    label_to_topic = {}
    for lbl in (0, 1):
        votes = [a for a, l in zip(assignments, labels) if l == lbl]
        label_to_topic[lbl] = int(np.bincount(votes).argmax())
    return model, label_to_topic


class TestInferTopic:

    def test_output_is_probability_simplex_point(self, planted_model):
        model, _ = planted_model
        theta = infer_topic(model, ["t0w0", "t0w1"])
        assert theta.shape == (2,)
        assert abs(theta.sum() - 1.0) < 1e-9
        assert np.all(theta > 0)

    def test_all_unseen_tokens_uniform(self, planted_model):
        model, _ = planted_model
        np.testing.assert_allclose(infer_topic(model, ["zzz", "qqq"]), [0.5, 0.5])

    def test_empty_tokens_uniform(self, planted_model):
        model, _ = planted_model
        np.testing.assert_allclose(infer_topic(model, []), [0.5, 0.5])

    def test_routes_planted_titles(self, planted_model):
        model, label_to_topic = planted_model
        hits = 0
        for lbl in (0, 1):
            for j in range(10):
                title = [f"t{lbl}w{j}", f"t{lbl}w{j + 1}", f"t{lbl}w{j + 2}"]
                theta = infer_topic(model, title)
                hits += int(np.argmax(theta)) == label_to_topic[lbl]
        assert hits / 20 >= 0.9

    def test_inference_deterministic(self, planted_model):
        model, _ = planted_model
        a = infer_topic(model, ["t0w0", "t1w3", "t0w5"])
        b = infer_topic(model, ["t0w0", "t1w3", "t0w5"])
        np.testing.assert_array_equal(a, b)


class TestAssignStoryTopics:
    def test_single_doc_single_topic(self):
        model = fit_lda([["word", "another"]], k=1, iterations=5, doc_ids=["s1"])
        chains = [make_chain("s1", ["a"])]
        assert assign_story_topics(model, chains) == {"s1": 0}

    def test_unknown_story_errors(self):
        model = fit_lda([["word"]], k=1, iterations=5, doc_ids=["s1"])
        with pytest.raises(TopicModelError, match="s9"):
            assign_story_topics(model, [make_chain("s9", ["a"])])

    def test_tie_breaks_to_lower_topic(self):
        model = fit_lda([["word"]], k=3, iterations=3, doc_ids=["s1"])
        model.doc_topic[0] = [2, 2, 2]
        assert assign_story_topics(model, [make_chain("s1", ["a"])]) == {"s1": 0}

    def test_matches_planted_labels(self):
        docs, labels = planted_topic_documents(n_topics=2, docs_per_topic=60, seed=6)
        ids = [f"s{i}" for i in range(len(docs))]
        model = fit_lda(docs, k=2, iterations=120, seed=6, doc_ids=ids)
        chains = [make_chain(sid, ["a"]) for sid in ids]
        assigned = assign_story_topics(model, chains)
        purity = cluster_purity([assigned[sid] for sid in ids], labels, k=2)
        assert purity >= 0.9


class TestLdaDocuments:
    def test_stopwords_and_min_df(self):
        stories = [
            Story(id="s1", title_tokens=["the", "glasses"], sentences=["Sam wore the glasses."]),
            Story(id="s2", title_tokens=["new", "glasses"], sentences=["Glasses broke again."]),
            Story(id="s3", title_tokens=["rare"], sentences=["Unique words only here."]),
        ]
        docs, ids = make_lda_documents(stories, min_df=2)
        assert ids == ["s1", "s2", "s3"]
        # "the" is a stopword; "sam"/"wore" fail min_df=2
        assert docs[0] == ["glasses", "glasses"]
        flat = {w for doc in docs for w in doc}
        assert "the" not in flat
        assert "sam" not in flat
        assert "glasses" in flat

    def test_min_df_filters_rare_words(self):
        stories = [
            Story(id="a", title_tokens=["shared"], sentences=["shared rareword."]),
            Story(id="b", title_tokens=["shared"], sentences=["shared again."]),
        ]
        docs, _ = make_lda_documents(stories, min_df=2)
        flat = {w for doc in docs for w in doc}
        assert "rareword" not in flat and "shared" in flat


class TestCheckpoint:
    def test_round_trip(self, tmp_path):
        docs, _ = planted_topic_documents(n_topics=2, docs_per_topic=8, seed=7)
        ids = [f"s{i}" for i in range(len(docs))]
        model = fit_lda(docs, k=2, iterations=10, seed=7, doc_ids=ids)
        path = tmp_path / "model.lda"
        save_topic_model(model, path)
        loaded = load_topic_model(path)
        assert loaded.k == model.k
        assert loaded.alpha == model.alpha and loaded.beta == model.beta
        assert loaded.seed == model.seed
        assert loaded.vocab == model.vocab
        assert loaded.doc_ids == model.doc_ids
        np.testing.assert_array_equal(loaded.topic_word, model.topic_word)
        np.testing.assert_array_equal(loaded.topic_totals, model.topic_totals)
        np.testing.assert_array_equal(loaded.doc_topic, model.doc_topic)

    def test_inference_survives_round_trip(self, tmp_path):
        docs, _ = planted_topic_documents(n_topics=2, docs_per_topic=8, seed=8)
        model = fit_lda(docs, k=2, iterations=10, seed=8)
        path = tmp_path / "model.lda"
        save_topic_model(model, path)
        loaded = load_topic_model(path)
        np.testing.assert_array_equal(
            infer_topic(model, ["t0w0"]), infer_topic(loaded, ["t0w0"])
        )

    def test_bad_header(self, tmp_path):
        path = tmp_path / "junk.lda"
        path.write_text("nonsense\n")
        with pytest.raises(TopicModelError):
            load_topic_model(path)
