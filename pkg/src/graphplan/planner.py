"""Storyline planning: score-guided beam search over an event graph,
plus the unscored random-walk baseline.

Each extension of a partial sequence is scored by a recency-weighted
average of log event-event coherence against the whole prefix plus the
log input-event coherence of the candidate:

    (1 / sum_k lam^k) * sum_i lam^(distance_i) * ln f_event(e_i, cand)
        + ln f_input(title, cand)

where distance is counted back from the most recent prefix event, so
that event carries weight lam^0 = 1. The opposite reading (weights
largest for the earliest events) stays available behind
``literal_decay``. A candidate's total is the sum of its per-step
scores; the first event is scored by its input coherence alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .coherence import CoherenceModel, score_event_pair, score_input_event
from .graph import EventGraph, GraphError
from .topics import TopicModel, infer_topic


class PlannerError(ValueError):
    """Raised for infeasible planning requests or invalid scores."""


def decay_weights(prefix_len: int, lam: float, literal: bool = False) -> np.ndarray:
    """Normalized decay weights over a prefix, oldest event first.

    By default the most recent event gets the largest weight; with
    ``literal`` the exponent grows from the first event instead. The
    weights sum to 1.
    """
    if prefix_len < 1:
        raise PlannerError("prefix must be non-empty")
    if not 0.0 < lam <= 1.0:
        raise PlannerError("decay rate must lie in (0, 1]")
    exponents = np.arange(prefix_len) if literal else np.arange(prefix_len - 1, -1, -1)
    weights = lam ** exponents.astype(np.float64)
    return weights / weights.sum()


def _log_score(value: float) -> float:
    if value <= 0.0:
        raise PlannerError(f"coherence score must be positive, got {value}")
    return math.log(value)


def step_score_core(
    event_scores, input_score: float, lam: float, literal: bool = False
) -> float:
    """Score one candidate from raw coherence values.

    ``event_scores`` are f_event(e_i, cand) for the prefix in story
    order (oldest first); ``input_score`` is f_input(title, cand).
    """
    weights = decay_weights(len(event_scores), lam, literal)
    logs = np.array([_log_score(s) for s in event_scores])
    return float(weights @ logs) + _log_score(input_score)


def step_score(
    ee_model: CoherenceModel,
    ie_model: CoherenceModel,
    title_tokens,
    prefix: list[str],
    cand: str,
    lam: float,
    literal: bool = False,
) -> float:
    """Score extending ``prefix`` (event surfaces, story order) by ``cand``."""
    event_scores = [score_event_pair(ee_model, p, cand) for p in prefix]
    return step_score_core(
        event_scores, score_input_event(ie_model, title_tokens, cand), lam, literal
    )


def candidates(graph: EventGraph, prefix: list[int]) -> set[int]:
    """Successors of the last prefix event, minus anything mutually
    exclusive with any prefix event."""
    if not prefix:
        raise PlannerError("prefix must be non-empty")
    return {
        nxt
        for nxt in graph.successors(prefix[-1])
        if all(not graph.is_exclusive(nxt, p) for p in prefix)
    }


def select_graph(
    lda: TopicModel, graphs: Mapping[int, EventGraph], title_tokens
) -> EventGraph:
    """Route the title to its topic's event graph."""
    topic = int(np.argmax(infer_topic(lda, title_tokens)))
    if topic not in graphs:
        raise GraphError(f"no event graph available for topic {topic}")
    return graphs[topic]


@dataclass
class BeamCandidate:
    events: list[int]
    step_scores: list[float]
    total: float

    def sort_key(self):
        return (-self.total, tuple(self.events))


@dataclass
class Plan:
    title_tokens: list[str]
    topic_id: int
    events: list[str]
    step_scores: list[float]
    total_score: float
    seed: int
    config: dict
    method: str = "beam"
    early_termination: bool = False

    def to_record(self) -> dict:
        return {
            "title": list(self.title_tokens),
            "topic_id": self.topic_id,
            "events": list(self.events),
            "step_scores": list(self.step_scores),
            "total_score": self.total_score,
            "seed": self.seed,
            "config": dict(self.config),
            "method": self.method,
            "early_termination": self.early_termination,
        }


def plan_from_record(record: dict) -> Plan:
    return Plan(
        title_tokens=list(record["title"]),
        topic_id=int(record["topic_id"]),
        events=list(record["events"]),
        step_scores=[float(s) for s in record.get("step_scores", [])],
        total_score=float(record["total_score"]),
        seed=int(record.get("seed", 0)),
        config=dict(record.get("config", {})),
        method=record.get("method", "beam"),
        early_termination=bool(record.get("early_termination", False)),
    )


def _weighted_sample_without_replacement(rng, ids, weights, size):
    p = np.asarray(weights, dtype=np.float64)
    picked = rng.choice(len(ids), size=size, replace=False, p=p / p.sum())
    return [ids[i] for i in picked]


def _seed_candidates(
    graph, ie_model, title_tokens, n_starts, rng, starts_by_input, input_cache
):
    starts = graph.start_ids()
    if not starts:
        raise PlannerError(f"topic {graph.topic_id} graph has no start events")
    size = min(n_starts, len(starts))
    if starts_by_input:
        ranked = sorted(starts, key=lambda e: (-input_cache(e), e))
        chosen = ranked[:size]
    else:
        weights = [graph.start_counts[e] for e in starts]
        chosen = _weighted_sample_without_replacement(rng, starts, weights, size)
    seeds = []
    for eid in chosen:
        first = _log_score(input_cache(eid))
        seeds.append(BeamCandidate(events=[eid], step_scores=[first], total=first))
    return seeds


def plan_beam(
    graph: EventGraph,
    ee_model: CoherenceModel,
    ie_model: CoherenceModel,
    title_tokens,
    length: int = 5,
    beam: int = 10,
    n_starts: int | None = None,
    lam: float = 0.5,
    seed: int = 0,
    no_repeat: bool = False,
    literal_decay: bool = False,
    starts_by_input: bool = False,
    prefix: list[str] | None = None,
) -> Plan:
    """Plan an event sequence of ``length`` events by beam search.

    Beams are seeded with ``n_starts`` (default: beam width) start
    events sampled without replacement by story-initial frequency, each
    scored by its input coherence. Extensions come from the graph minus
    mutually exclusive events, each scored by the decayed log-coherence
    rule; candidates are ranked by total score with ties broken by the
    lexicographically smallest event-id sequence. ``prefix`` pins the
    leading event surfaces instead of sampling starts. If every beam
    dies before reaching ``length`` the best shorter candidate is
    returned, flagged ``early_termination``.
    """
    if length < 1:
        raise PlannerError("length must be >= 1")
    if beam < 1:
        raise PlannerError("beam must be >= 1")
    if len(graph) == 0:
        raise PlannerError(f"topic {graph.topic_id} graph is empty")
    if n_starts is None:
        n_starts = beam
    if n_starts < 1:
        raise PlannerError("n_starts must be >= 1")

    surfaces = [e.surface for e in graph.events]
    input_scores: dict[int, float] = {}
    pair_scores: dict[tuple[int, int], float] = {}

    def input_cache(eid: int) -> float:
        if eid not in input_scores:
            input_scores[eid] = score_input_event(ie_model, title_tokens, surfaces[eid])
        return input_scores[eid]

    def pair_cache(a: int, b: int) -> float:
        key = (a, b)
        if key not in pair_scores:
            pair_scores[key] = score_event_pair(ee_model, surfaces[a], surfaces[b])
        return pair_scores[key]

    def extension_score(prefix_ids: list[int], nxt: int) -> float:
        event_scores = [pair_cache(p, nxt) for p in prefix_ids]
        return step_score_core(event_scores, input_cache(nxt), lam, literal_decay)

    rng = np.random.default_rng(seed)
    if prefix:
        ids = [graph.event_id(s) for s in prefix]
        for pos, (a, b) in enumerate(zip(ids, ids[1:])):
            if not graph.has_edge(a, b):
                raise PlannerError(f"pinned prefix breaks at {prefix[pos]} -> {prefix[pos + 1]}")
        for i in range(len(ids)):
            for j in range(i + 1, len(ids)):
                if graph.is_exclusive(ids[i], ids[j]):
                    raise PlannerError(
                        f"pinned prefix contains exclusive pair {prefix[i]}, {prefix[j]}"
                    )
        scores = [_log_score(input_cache(ids[0]))]
        for t in range(1, len(ids)):
            scores.append(extension_score(ids[:t], ids[t]))
        beam_list = [BeamCandidate(events=ids, step_scores=scores, total=sum(scores))]
    else:
        beam_list = _seed_candidates(
            graph, ie_model, title_tokens, n_starts, rng, starts_by_input, input_cache
        )
    beam_list.sort(key=BeamCandidate.sort_key)
    beam_list = beam_list[:beam]

    early = False
    while len(beam_list[0].events) < length:
        extensions = []
        for cand in beam_list:
            nexts = candidates(graph, cand.events)
            if no_repeat:
                nexts -= set(cand.events)
            for nxt in sorted(nexts):
                sc = extension_score(cand.events, nxt)
                extensions.append(
                    BeamCandidate(
                        events=cand.events + [nxt],
                        step_scores=cand.step_scores + [sc],
                        total=cand.total + sc,
                    )
                )
        if not extensions:
            early = True
            break
        extensions.sort(key=BeamCandidate.sort_key)
        beam_list = extensions[:beam]

    best = beam_list[0]
    config = {
        "beam": beam,
        "length": length,
        "lambda": lam,
        "n_starts": n_starts,
        "no_repeat": no_repeat,
        "literal_decay": literal_decay,
        "starts_by_input": starts_by_input,
    }
    if prefix:
        config["prefix"] = list(prefix)
    return Plan(
        title_tokens=list(title_tokens),
        topic_id=graph.topic_id,
        events=[surfaces[e] for e in best.events],
        step_scores=list(best.step_scores),
        total_score=best.total,
        seed=seed,
        config=config,
        method="beam",
        early_termination=early,
    )


def random_walk(
    graph: EventGraph, length: int, seed: int = 0, max_restarts: int = 10
) -> Plan:
    """Unscored baseline: start by story-initial frequency, then step
    uniformly among non-exclusive successors. Dead ends restart up to
    ``max_restarts`` times; the longest walk found is returned."""
    if length < 1:
        raise PlannerError("length must be >= 1")
    starts = graph.start_ids()
    if not starts:
        raise PlannerError(f"topic {graph.topic_id} graph has no start events")
    weights = np.array([graph.start_counts[e] for e in starts], dtype=np.float64)
    weights /= weights.sum()
    rng = np.random.default_rng(seed)

    best: list[int] = []
    for _ in range(max_restarts + 1):
        walk = [starts[int(rng.choice(len(starts), p=weights))]]
        while len(walk) < length:
            options = sorted(candidates(graph, walk))
            if not options:
                break
            walk.append(options[int(rng.integers(len(options)))])
        if len(walk) > len(best):
            best = walk
        if len(best) == length:
            break

    return Plan(
        title_tokens=[],
        topic_id=graph.topic_id,
        events=[graph.surface(e) for e in best],
        step_scores=[],
        total_score=0.0,
        seed=seed,
        config={"length": length, "max_restarts": max_restarts},
        method="random_walk",
        early_termination=len(best) < length,
    )
