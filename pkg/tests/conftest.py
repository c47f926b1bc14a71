"""Shared synthetic-data builders for the test suite."""

import numpy as np
import pytest

from graphplan.corpus import EventChain, parse_event


def make_chain(story_id, surfaces):
    return EventChain(story_id=story_id, events=[parse_event(s) for s in surfaces])


def clustered_event_corpus(
    n_events=40,
    n_clusters=4,
    n_stories=200,
    events_per_story=4,
    seed=0,
):
    """Stories that only ever combine events from one cluster.

    Within-story pairs are therefore always same-cluster; cross-cluster
    pairs never co-occur. Returns (chains, story_topics, cluster_of).
    """
    rng = np.random.default_rng(seed)
    cluster_size = n_events // n_clusters
    cluster_of = {f"e{i}": i // cluster_size for i in range(n_events)}
    chains = []
    for s in range(n_stories):
        cluster = int(rng.integers(n_clusters))
        members = [
            f"e{i}"
            for i in range(cluster * cluster_size, (cluster + 1) * cluster_size)
        ]
        picks = rng.choice(len(members), size=events_per_story, replace=False)
        chains.append(make_chain(f"s{s}", [members[i] for i in sorted(picks)]))
    story_topics = {c.story_id: 0 for c in chains}
    return chains, story_topics, cluster_of


def planted_topic_documents(n_topics=3, docs_per_topic=100, doc_len=12, vocab_per_topic=20, seed=0):
    """Documents drawn from disjoint per-topic vocabularies."""
    rng = np.random.default_rng(seed)
    docs, labels = [], []
    for t in range(n_topics):
        words = [f"t{t}w{j}" for j in range(vocab_per_topic)]
        for _ in range(docs_per_topic):
            idx = rng.integers(0, vocab_per_topic, size=doc_len)
            docs.append([words[i] for i in idx])
            labels.append(t)
    order = rng.permutation(len(docs))
    return [docs[i] for i in order], [labels[i] for i in order]


def cluster_purity(assignments, labels, k):
    """Fraction of items whose cluster's majority label matches theirs."""
    from collections import Counter

    correct = 0
    for cluster in range(k):
        members = [labels[i] for i, a in enumerate(assignments) if a == cluster]
        if members:
            correct += Counter(members).most_common(1)[0][1]
    return correct / len(assignments)


def random_toy_graph(rng, n_nodes=None, n_chains=None, max_out=3, exclusive_pairs=0):
    """Small random event graph built from random chains."""
    from graphplan.graph import build_graph

    n_nodes = n_nodes or int(rng.integers(4, 9))
    n_chains = n_chains or int(rng.integers(3, 7))
    chains = []
    for s in range(n_chains):
        length = int(rng.integers(2, 5))
        names = [f"e{int(rng.integers(n_nodes))}" for _ in range(length)]
        chains.append(make_chain(f"s{s}", names))
    graph = build_graph(0, chains)
    # trim out-degree to max_out (keep the smallest-id targets)
    for src, adj in enumerate(graph.adjacency):
        if len(adj) > max_out:
            keep = sorted(adj)[:max_out]
            graph.adjacency[src] = {dst: adj[dst] for dst in keep}
    ids = list(range(len(graph.events)))
    added = 0
    while added < exclusive_pairs and len(ids) >= 2:
        a, b = (int(x) for x in rng.choice(ids, size=2, replace=False))
        pair = (min(a, b), max(a, b))
        if pair not in graph.exclusive:
            graph.exclusive.add(pair)
            added += 1
    return graph


def tiny_models(graph, seed, dim=4, hidden=4, title_vocab=("new", "glasses")):
    """Small random coherence models covering a toy graph's events."""
    from graphplan.coherence import EVENT_EVENT, INPUT_EVENT, init_model

    surfaces = [e.surface for e in graph.events]
    ee = init_model(EVENT_EVENT, surfaces, dim=dim, hidden=hidden, seed=seed)
    ie = init_model(
        INPUT_EVENT, surfaces, word_vocab=list(title_vocab),
        dim=dim, hidden=hidden, seed=seed + 1,
    )
    return ee, ie


def enumerate_paths(graph, length):
    """All start-anchored feasible walks (edges + exclusivity) of `length`."""
    paths = []

    def extend(path):
        if len(path) == length:
            paths.append(list(path))
            return
        for nxt in sorted(graph.adjacency[path[-1]]):
            if all(not graph.is_exclusive(nxt, p) for p in path):
                path.append(nxt)
                extend(path)
                path.pop()

    for start in graph.start_ids():
        extend([start])
    return paths


def brute_force_best_plan(graph, ee, ie, title_tokens, length, lam):
    """Exhaustive argmax of the planner's total score over all feasible
    paths, applying the planner's tie rule (lexicographic ids)."""
    import math

    from graphplan.coherence import score_event_pair, score_input_event

    surfaces = [e.surface for e in graph.events]
    best_key, best = None, None
    for path in enumerate_paths(graph, length):
        scores = [math.log(score_input_event(ie, title_tokens, surfaces[path[0]]))]
        for t in range(1, len(path)):
            from graphplan.planner import step_score_core

            event_scores = [
                score_event_pair(ee, surfaces[p], surfaces[path[t]]) for p in path[:t]
            ]
            scores.append(
                step_score_core(
                    event_scores,
                    score_input_event(ie, title_tokens, surfaces[path[t]]),
                    lam,
                )
            )
        total = sum(scores)
        key = (-total, tuple(path))
        if best_key is None or key < best_key:
            best_key, best = key, (path, total)
    return best


def numeric_grads(model, pairs, eps=1e-5):
    """Central finite differences of the batch hinge loss."""
    from graphplan.coherence import batch_loss

    grads = {}
    for name in ["event_emb", "word_emb", "hidden_w", "hidden_b", "out_w"]:
        arr = getattr(model, name)
        grad = np.zeros_like(arr)
        flat, gflat = arr.ravel(), grad.ravel()
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + eps
            up = batch_loss(model, pairs)
            flat[i] = orig - eps
            down = batch_loss(model, pairs)
            flat[i] = orig
            gflat[i] = (up - down) / (2 * eps)
        grads[name] = grad
    orig = model.out_b
    model.out_b = orig + eps
    up = batch_loss(model, pairs)
    model.out_b = orig - eps
    down = batch_loss(model, pairs)
    model.out_b = orig
    grads["out_b"] = np.array([(up - down) / (2 * eps)])
    return grads


def max_rel_error(analytic, numeric):
    worst = 0.0
    for name, a in analytic.items():
        n = numeric[name]
        if a.size == 0:
            continue
        denom = np.maximum(np.maximum(np.abs(a), np.abs(n)), 1.0)
        worst = max(worst, float(np.max(np.abs(a - n) / denom)))
    return worst


def random_small_coherence_model(kind, seed):
    """Tiny random model plus a handful of training pairs."""
    from graphplan.coherence import EVENT_EVENT, INPUT_EVENT, TrainingPair, init_model

    rng = np.random.default_rng(seed)
    events = [f"e{i}" for i in range(6)]
    words = [f"w{i}" for i in range(4)]
    model = init_model(
        kind,
        events,
        word_vocab=words if kind == INPUT_EVENT else (),
        dim=3,
        hidden=4,
        margin=0.5,
        seed=seed,
    )
    model.hidden_b[:] = rng.normal(scale=0.1, size=model.hidden_b.shape)
    model.out_b = float(rng.normal(scale=0.1))
    if kind == EVENT_EVENT:
        pairs = [
            TrainingPair("e0", "e1", "e2"),
            TrainingPair("e1", "e3", "e4"),
            TrainingPair("e5", "e0", "e3"),
            TrainingPair("e2", "e2", "e5"),
        ]
    else:
        pairs = [
            TrainingPair(("w0", "w1"), "e1", "e2"),
            TrainingPair(("w2",), "e3", "e4"),
            TrainingPair(("w1", "w3", "w0"), "e0", "e5"),
        ]
    return model, pairs


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
