"""Per-topic directed event graphs: construction, queries, stats, files.

Nodes are events interned to dense integer ids. An edge ``a -> b``
records that event ``b`` immediately followed ``a`` in some training
story; edge counts accumulate repetitions. ``start_counts`` tracks how
often each event opened a chain, and ``exclusive`` holds unordered id
pairs that may never co-occur in a planned sequence (filled in by the
coherence stage).
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

from .corpus import Event, EventChain, parse_event

GRAPH_FORMAT_HEADER = "graphplan-eventgraph v1"


class GraphError(ValueError):
    """Raised for invalid graph queries or unreadable graph files."""


@dataclass
class EventGraph:
    topic_id: int
    events: list[Event] = field(default_factory=list)
    adjacency: list[dict[int, int]] = field(default_factory=list)
    start_counts: dict[int, int] = field(default_factory=dict)
    exclusive: set[tuple[int, int]] = field(default_factory=set)
    _index: dict[str, int] = field(default_factory=dict, repr=False)

    def __len__(self) -> int:
        return len(self.events)

    def intern(self, event: Event) -> int:
        eid = self._index.get(event.surface)
        if eid is None:
            eid = len(self.events)
            self.events.append(event)
            self.adjacency.append({})
            self._index[event.surface] = eid
        return eid

    def event_id(self, surface: str) -> int:
        try:
            return self._index[surface]
        except KeyError:
            raise GraphError(f"unknown event {surface!r} in topic {self.topic_id}") from None

    def surface(self, eid: int) -> str:
        return self.events[eid].surface

    def _check_id(self, eid: int) -> None:
        if not 0 <= eid < len(self.events):
            raise GraphError(f"invalid event id {eid} for topic {self.topic_id}")

    def successors(self, eid: int) -> set[int]:
        """Events reachable from ``eid`` by one edge."""
        self._check_id(eid)
        return set(self.adjacency[eid])

    def has_edge(self, src: int, dst: int) -> bool:
        self._check_id(src)
        return dst in self.adjacency[src]

    def is_exclusive(self, a: int, b: int) -> bool:
        return (min(a, b), max(a, b)) in self.exclusive

    def start_ids(self) -> list[int]:
        return sorted(i for i, c in self.start_counts.items() if c > 0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, EventGraph):
            return NotImplemented
        return (
            self.topic_id == other.topic_id
            and self.events == other.events
            and self.adjacency == other.adjacency
            and self.start_counts == other.start_counts
            and self.exclusive == other.exclusive
        )


def build_graph(topic_id: int, chains: list[EventChain]) -> EventGraph:
    """Build the topic graph from event chains: nodes, adjacency edges
    with counts, and start counts. The exclusive set starts empty."""
    graph = EventGraph(topic_id=topic_id)
    for chain in chains:
        if not chain.events:
            continue
        ids = [graph.intern(e) for e in chain.events]
        graph.start_counts[ids[0]] = graph.start_counts.get(ids[0], 0) + 1
        for src, dst in zip(ids, ids[1:]):
            graph.adjacency[src][dst] = graph.adjacency[src].get(dst, 0) + 1
    return graph


@dataclass(frozen=True)
class GraphStats:
    n_events: int
    n_edges: int
    mean_out_degree: float
    n_start_events: int
    n_exclusive: int


def graph_stats(graph: EventGraph) -> GraphStats:
    """Summary counts; mean out-degree is over non-sink nodes only."""
    out_degrees = [len(adj) for adj in graph.adjacency if adj]
    return GraphStats(
        n_events=len(graph.events),
        n_edges=sum(len(adj) for adj in graph.adjacency),
        mean_out_degree=sum(out_degrees) / len(out_degrees) if out_degrees else 0.0,
        n_start_events=len(graph.start_ids()),
        n_exclusive=len(graph.exclusive),
    )


def count_sequences(graph: EventGraph, length: int, limit: int) -> int:
    """Count walks of ``length`` events that begin at a start event,
    follow edges, and contain no exclusive pair. Saturates at ``limit``.
    """
    if length < 1 or limit < 1:
        raise ValueError("length and limit must be >= 1")
    count = 0

    def compatible(path: list[int], nxt: int) -> bool:
        return all(not graph.is_exclusive(p, nxt) for p in path)

    def dfs(path: list[int]) -> bool:
        nonlocal count
        if len(path) == length:
            count += 1
            return count >= limit
        for nxt in sorted(graph.adjacency[path[-1]]):
            if compatible(path, nxt):
                path.append(nxt)
                if dfs(path):
                    return True
                path.pop()
        return False

    for start in graph.start_ids():
        if dfs([start]):
            return limit
    return count


# ---------------------------------------------------------------------------
# Graph files: a versioned line-oriented text format, one file per topic,
# plus a JSON manifest mapping topic ids to file names.
# ---------------------------------------------------------------------------

def save_graph(graph: EventGraph, path) -> None:
    lines = [GRAPH_FORMAT_HEADER, f"topic {graph.topic_id}"]
    lines.append(f"events {len(graph.events)}")
    lines.extend(e.surface for e in graph.events)
    edges = [
        (src, dst, count)
        for src, adj in enumerate(graph.adjacency)
        for dst, count in sorted(adj.items())
    ]
    lines.append(f"edges {len(edges)}")
    lines.extend(f"{s} {d} {c}" for s, d, c in edges)
    starts = sorted(graph.start_counts.items())
    lines.append(f"starts {len(starts)}")
    lines.extend(f"{i} {c}" for i, c in starts)
    pairs = sorted(graph.exclusive)
    lines.append(f"exclusive {len(pairs)}")
    lines.extend(f"{a} {b}" for a, b in pairs)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_graph(path) -> EventGraph:
    with open(path, encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    try:
        return _parse_graph_lines(lines)
    except (IndexError, ValueError) as exc:
        raise GraphError(f"{path}: {exc}") from exc


def _expect_section(line: str, name: str) -> int:
    parts = line.split()
    if len(parts) != 2 or parts[0] != name:
        raise GraphError(f"expected '{name} <count>', got {line!r}")
    return int(parts[1])


def _parse_graph_lines(lines: list[str]) -> EventGraph:
    if not lines or lines[0] != GRAPH_FORMAT_HEADER:
        raise GraphError(f"unsupported graph file header: {lines[:1]}")
    pos = 1
    topic_id = int(lines[pos].split()[1])
    pos += 1
    n_events = _expect_section(lines[pos], "events")
    pos += 1
    graph = EventGraph(topic_id=topic_id)
    for i in range(n_events):
        graph.intern(parse_event(lines[pos + i]))
    if len(graph.events) != n_events:
        raise GraphError("duplicate event surfaces in event table")
    pos += n_events
    n_edges = _expect_section(lines[pos], "edges")
    pos += 1
    for i in range(n_edges):
        src, dst, count = (int(x) for x in lines[pos + i].split())
        graph._check_id(src)
        graph._check_id(dst)
        graph.adjacency[src][dst] = count
    pos += n_edges
    n_starts = _expect_section(lines[pos], "starts")
    pos += 1
    for i in range(n_starts):
        eid, count = (int(x) for x in lines[pos + i].split())
        graph._check_id(eid)
        graph.start_counts[eid] = count
    pos += n_starts
    n_excl = _expect_section(lines[pos], "exclusive")
    pos += 1
    for i in range(n_excl):
        a, b = (int(x) for x in lines[pos + i].split())
        graph._check_id(a)
        graph._check_id(b)
        if a == b:
            raise GraphError(f"exclusive pair {a},{b} pairs an event with itself")
        graph.exclusive.add((min(a, b), max(a, b)))
    return graph


def save_graph_dir(graphs: dict[int, EventGraph], out_dir) -> dict[int, str]:
    """Write one graph file per topic plus a manifest; returns the mapping."""
    os.makedirs(out_dir, exist_ok=True)
    mapping = {}
    for topic_id in sorted(graphs):
        name = f"topic_{topic_id}.graph"
        save_graph(graphs[topic_id], os.path.join(out_dir, name))
        mapping[topic_id] = name
    manifest = {"format": GRAPH_FORMAT_HEADER, "topics": {str(t): n for t, n in mapping.items()}}
    with open(os.path.join(out_dir, "manifest.json"), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return mapping


def load_manifest(graph_dir) -> dict[int, str]:
    path = os.path.join(graph_dir, "manifest.json")
    if not os.path.exists(path):
        raise GraphError(f"no graph manifest at {path}")
    with open(path, encoding="utf-8") as fh:
        manifest = json.load(fh)
    return {int(t): name for t, name in manifest.get("topics", {}).items()}


def load_graph_for_topic(graph_dir, topic_id: int) -> EventGraph:
    mapping = load_manifest(graph_dir)
    if topic_id not in mapping:
        raise GraphError(f"manifest in {graph_dir} has no graph for topic {topic_id}")
    path = os.path.join(graph_dir, mapping[topic_id])
    if not os.path.exists(path):
        raise GraphError(f"graph file missing: {path}")
    return load_graph(path)
