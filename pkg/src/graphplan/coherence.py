"""Coherence scorers over event pairs and (input, event) pairs.

Both scorers share one shape: the two sides are embedded, concatenated,
passed through a tanh hidden layer and a single output unit, and
squashed with a sigmoid, so scores always land strictly inside (0, 1).
The event-event model embeds two events; the input-event model embeds
the input as the mean of its known word embeddings.

Training minimizes a margin hinge over (positive, negative) score
pairs with plain SGD and exact analytic gradients through the sigmoid,
tanh and embedding lookups. Events scoring below a threshold tau
(by default the 5th percentile of sampled pair scores) against another
event form the graph's mutually exclusive set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

EVENT_EVENT = "event_event"
INPUT_EVENT = "input_event"

CHECKPOINT_VERSION = 1


class ModelError(ValueError):
    """Raised for model misuse: unknown events, bad dims, bad files."""


def _sigmoid(u: np.ndarray) -> np.ndarray:
    out = np.empty_like(u, dtype=np.float64)
    pos = u >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-u[pos]))
    eu = np.exp(u[~pos])
    out[~pos] = eu / (1.0 + eu)
    return out


@dataclass
class CoherenceModel:
    kind: str
    event_index: dict[str, int]
    word_index: dict[str, int]
    event_emb: np.ndarray
    word_emb: np.ndarray
    hidden_w: np.ndarray
    hidden_b: np.ndarray
    out_w: np.ndarray
    out_b: float
    margin: float
    seed: int

    @property
    def dim(self) -> int:
        return self.event_emb.shape[1]

    @property
    def hidden(self) -> int:
        return self.hidden_w.shape[1]

    def event_row(self, surface: str) -> int:
        row = self.event_index.get(surface)
        if row is None:
            raise ModelError(f"event {surface!r} not in {self.kind} model")
        return row


def init_model(
    kind: str,
    event_surfaces: list[str],
    word_vocab: list[str] = (),
    dim: int = 64,
    hidden: int = 128,
    margin: float = 0.5,
    seed: int = 0,
) -> CoherenceModel:
    """Fresh model: uniform(-0.1, 0.1) embeddings, Xavier-scaled layer
    weights, zero biases."""
    if kind not in (EVENT_EVENT, INPUT_EVENT):
        raise ModelError(f"unknown model kind {kind!r}")
    if kind == INPUT_EVENT and not word_vocab:
        raise ModelError("input_event model needs a word vocabulary")
    if not event_surfaces:
        raise ModelError("model needs at least one event")
    rng = np.random.default_rng(seed)
    n_events = len(event_surfaces)
    n_words = len(word_vocab)
    event_emb = rng.uniform(-0.1, 0.1, size=(n_events, dim))
    word_emb = rng.uniform(-0.1, 0.1, size=(n_words, dim))
    lim1 = math.sqrt(6.0 / (2 * dim + hidden))
    lim2 = math.sqrt(6.0 / (hidden + 1))
    return CoherenceModel(
        kind=kind,
        event_index={s: i for i, s in enumerate(event_surfaces)},
        word_index={w: i for i, w in enumerate(word_vocab)},
        event_emb=event_emb,
        word_emb=word_emb,
        hidden_w=rng.uniform(-lim1, lim1, size=(2 * dim, hidden)),
        hidden_b=np.zeros(hidden),
        out_w=rng.uniform(-lim2, lim2, size=hidden),
        out_b=0.0,
        margin=margin,
        seed=seed,
    )


def _forward(model: CoherenceModel, left: np.ndarray, right_rows: np.ndarray):
    x = np.concatenate([left, model.event_emb[right_rows]], axis=1)
    z = x @ model.hidden_w + model.hidden_b
    h = np.tanh(z)
    u = h @ model.out_w + model.out_b
    return x, h, _sigmoid(u)


def score_event_pair(model: CoherenceModel, e_i: str, e_j: str) -> float:
    """Directed coherence score f(e_i, e_j) in (0, 1)."""
    if model.kind != EVENT_EVENT:
        raise ModelError(f"score_event_pair needs an {EVENT_EVENT} model")
    left = model.event_emb[model.event_row(e_i)][None, :]
    rows = np.array([model.event_row(e_j)])
    _, _, f = _forward(model, left, rows)
    return float(f[0])


def _title_rows(model: CoherenceModel, title_tokens) -> np.ndarray:
    return np.array(
        [model.word_index[w] for w in title_tokens if w in model.word_index],
        dtype=np.intp,
    )


def score_input_event(model: CoherenceModel, title_tokens, e: str) -> float:
    """Coherence of event ``e`` with the input title in (0, 1).

    Unknown title words are skipped; with no known word the score is a
    neutral 0.5.
    """
    if model.kind != INPUT_EVENT:
        raise ModelError(f"score_input_event needs an {INPUT_EVENT} model")
    rows = _title_rows(model, title_tokens)
    if rows.size == 0:
        return 0.5
    left = model.word_emb[rows].mean(axis=0)[None, :]
    _, _, f = _forward(model, left, np.array([model.event_row(e)]))
    return float(f[0])


def contrastive_loss(pos: float, neg: float, margin: float) -> float:
    """Margin hinge: max(0, -pos + neg + margin)."""
    return max(0.0, -pos + neg + margin)


@dataclass(frozen=True)
class TrainingPair:
    """Anchor with a same-story positive and an other-story negative."""

    anchor: str | tuple[str, ...]
    positive: str
    negative: str

    def __post_init__(self):
        if self.positive == self.negative:
            raise ModelError("positive and negative must differ")


@dataclass
class _Resolved:
    anchor_rows: np.ndarray | None      # event_event anchors
    anchor_words: list[np.ndarray] | None  # input_event anchors
    pos_rows: np.ndarray
    neg_rows: np.ndarray

    def __len__(self) -> int:
        return len(self.pos_rows)


def _resolve(model: CoherenceModel, pairs: list[TrainingPair]) -> _Resolved:
    pos_rows = np.array([model.event_row(p.positive) for p in pairs], dtype=np.intp)
    neg_rows = np.array([model.event_row(p.negative) for p in pairs], dtype=np.intp)
    if model.kind == EVENT_EVENT:
        anchor_rows = np.array([model.event_row(p.anchor) for p in pairs], dtype=np.intp)
        return _Resolved(anchor_rows, None, pos_rows, neg_rows)
    anchor_words = []
    for p in pairs:
        rows = _title_rows(model, p.anchor)
        if rows.size == 0:
            raise ModelError(f"anchor {p.anchor!r} has no word in the model vocabulary")
        anchor_words.append(rows)
    return _Resolved(None, anchor_words, pos_rows, neg_rows)


def _left_matrix(model: CoherenceModel, resolved: _Resolved, idx: np.ndarray) -> np.ndarray:
    if model.kind == EVENT_EVENT:
        return model.event_emb[resolved.anchor_rows[idx]]
    return np.stack(
        [model.word_emb[resolved.anchor_words[i]].mean(axis=0) for i in idx]
    )


def _zero_grads(model: CoherenceModel) -> dict[str, np.ndarray]:
    return {
        "event_emb": np.zeros_like(model.event_emb),
        "word_emb": np.zeros_like(model.word_emb),
        "hidden_w": np.zeros_like(model.hidden_w),
        "hidden_b": np.zeros_like(model.hidden_b),
        "out_w": np.zeros_like(model.out_w),
        "out_b": np.zeros(1),
    }


def _branch_backward(model, grads, x, h, du, right_rows, left_grad_sink):
    """Backpropagate d(loss)/d(pre-sigmoid) into the parameter grads."""
    d = model.dim
    grads["out_w"] += h.T @ du
    grads["out_b"][0] += du.sum()
    dh = du[:, None] * model.out_w[None, :]
    dz = dh * (1.0 - h * h)
    grads["hidden_w"] += x.T @ dz
    grads["hidden_b"] += dz.sum(axis=0)
    dx = dz @ model.hidden_w.T
    np.add.at(grads["event_emb"], right_rows, dx[:, d:])
    left_grad_sink(dx[:, :d])


def batch_loss_and_grads(
    model: CoherenceModel, pairs: list[TrainingPair]
) -> tuple[float, dict[str, np.ndarray]]:
    """Total hinge loss of the batch and its exact parameter gradients."""
    resolved = _resolve(model, pairs)
    idx = np.arange(len(resolved))
    losses, grads = _loss_and_grads(model, resolved, idx)
    return float(losses.sum()), grads


def batch_loss(model: CoherenceModel, pairs: list[TrainingPair]) -> float:
    resolved = _resolve(model, pairs)
    idx = np.arange(len(resolved))
    return float(_losses_only(model, resolved, idx).sum())


def _losses_only(model, resolved, idx):
    left = _left_matrix(model, resolved, idx)
    _, _, f_pos = _forward(model, left, resolved.pos_rows[idx])
    _, _, f_neg = _forward(model, left, resolved.neg_rows[idx])
    return np.maximum(0.0, -f_pos + f_neg + model.margin)


def _loss_and_grads(model, resolved, idx):
    left = _left_matrix(model, resolved, idx)
    x_pos, h_pos, f_pos = _forward(model, left, resolved.pos_rows[idx])
    x_neg, h_neg, f_neg = _forward(model, left, resolved.neg_rows[idx])
    losses = np.maximum(0.0, -f_pos + f_neg + model.margin)
    active = losses > 0.0

    grads = _zero_grads(model)
    d_left = np.zeros_like(left)

    def sink(dl):
        nonlocal d_left
        d_left += dl

    du_pos = np.where(active, -f_pos * (1.0 - f_pos), 0.0)
    du_neg = np.where(active, f_neg * (1.0 - f_neg), 0.0)
    _branch_backward(model, grads, x_pos, h_pos, du_pos, resolved.pos_rows[idx], sink)
    _branch_backward(model, grads, x_neg, h_neg, du_neg, resolved.neg_rows[idx], sink)

    if model.kind == EVENT_EVENT:
        np.add.at(grads["event_emb"], resolved.anchor_rows[idx], d_left)
    else:
        for b, i in enumerate(idx):
            rows = resolved.anchor_words[i]
            grads["word_emb"][rows] += d_left[b] / rows.size
    return losses, grads


def train(
    model: CoherenceModel,
    pairs: list[TrainingPair],
    epochs: int,
    lr: float,
    seed: int = 0,
    batch_size: int = 32,
) -> list[float]:
    """SGD over the hinge objective; returns per-epoch mean loss.

    Deterministic for a fixed seed (the shuffle order is the only
    randomness). Loss is reported on the weights as seen during the
    epoch, before each batch's update.
    """
    if lr < 0:
        raise ModelError("learning rate must be >= 0")
    if not pairs:
        raise ModelError("no training pairs")
    resolved = _resolve(model, pairs)
    rng = np.random.default_rng(seed)
    trace = []
    n = len(resolved)
    for _ in range(epochs):
        order = rng.permutation(n)
        epoch_loss = 0.0
        for lo in range(0, n, batch_size):
            idx = order[lo: lo + batch_size]
            losses, grads = _loss_and_grads(model, resolved, idx)
            epoch_loss += float(losses.sum())
            model.event_emb -= lr * grads["event_emb"]
            if model.word_emb.size:
                model.word_emb -= lr * grads["word_emb"]
            model.hidden_w -= lr * grads["hidden_w"]
            model.hidden_b -= lr * grads["hidden_b"]
            model.out_w -= lr * grads["out_w"]
            model.out_b = model.out_b - lr * float(grads["out_b"][0])
        trace.append(epoch_loss / n)
    return trace


# ---------------------------------------------------------------------------
# Training-pair construction
# ---------------------------------------------------------------------------

def _negative_pool(chains, story_topics):
    pools: dict[int, list[tuple[str, str]]] = {}
    for chain in chains:
        topic = story_topics[chain.story_id]
        pool = pools.setdefault(topic, [])
        pool.extend((chain.story_id, s) for s in chain.surfaces)
    return pools


def _sample_negative(rng, pool, story_id, positive):
    for _ in range(50):
        sid, surface = pool[int(rng.integers(len(pool)))]
        if sid != story_id and surface != positive:
            return surface
    return None


def build_event_pairs(
    chains, story_topics: dict[str, int], neg_per_pos: int = 1, seed: int = 0
) -> list[TrainingPair]:
    """Positives are all unordered in-story event pairs (in textual
    order); negatives corrupt the second element with an event sampled
    uniformly from other stories of the same topic."""
    rng = np.random.default_rng(seed)
    pools = _negative_pool(chains, story_topics)
    pairs = []
    for chain in chains:
        pool = pools[story_topics[chain.story_id]]
        surfaces = chain.surfaces
        for i in range(len(surfaces)):
            for j in range(i + 1, len(surfaces)):
                for _ in range(neg_per_pos):
                    neg = _sample_negative(rng, pool, chain.story_id, surfaces[j])
                    if neg is not None:
                        pairs.append(
                            TrainingPair(anchor=surfaces[i], positive=surfaces[j], negative=neg)
                        )
    return pairs


def build_input_pairs(
    titles: dict[str, list[str]],
    chains,
    story_topics: dict[str, int],
    neg_per_pos: int = 1,
    seed: int = 0,
) -> list[TrainingPair]:
    """Positives pair a story's title with each of its events."""
    rng = np.random.default_rng(seed)
    pools = _negative_pool(chains, story_topics)
    pairs = []
    for chain in chains:
        title = tuple(titles.get(chain.story_id, ()))
        if not title:
            continue
        pool = pools[story_topics[chain.story_id]]
        for surface in chain.surfaces:
            for _ in range(neg_per_pos):
                neg = _sample_negative(rng, pool, chain.story_id, surface)
                if neg is not None:
                    pairs.append(TrainingPair(anchor=title, positive=surface, negative=neg))
    return pairs


# ---------------------------------------------------------------------------
# Mutually exclusive set
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExclusiveResult:
    pairs: set[tuple[int, int]]
    tau: float
    n_scored: int


def pair_scores(model: CoherenceModel, rows_a, rows_b, chunk: int = 8192) -> np.ndarray:
    """Symmetric scores (f(a,b) + f(b,a)) / 2, computed in chunks."""
    scores = np.empty(len(rows_a))
    for lo in range(0, len(rows_a), chunk):
        a = rows_a[lo: lo + chunk]
        b = rows_b[lo: lo + chunk]
        _, _, f_ab = _forward(model, model.event_emb[a], b)
        _, _, f_ba = _forward(model, model.event_emb[b], a)
        scores[lo: lo + chunk] = 0.5 * (f_ab + f_ba)
    return scores


def derive_exclusive(
    model: CoherenceModel,
    graph,
    tau: float | None = None,
    tau_percentile: float = 5.0,
    max_pairs: int = 500_000,
    seed: int = 0,
) -> ExclusiveResult:
    """Unordered graph node pairs whose symmetric score falls below tau.

    With ``tau`` unset, tau is the ``tau_percentile``-th percentile of
    the scored pairs. All unordered pairs are scored unless there are
    more than ``max_pairs``, in which case a seeded uniform subsample
    of that size is scored instead.
    """
    if tau is not None and not 0.0 < tau < 1.0:
        raise ModelError("tau must lie strictly between 0 and 1")
    n = len(graph.events)
    if n < 2:
        return ExclusiveResult(pairs=set(), tau=tau if tau is not None else 0.0, n_scored=0)
    rows = np.array([model.event_row(e.surface) for e in graph.events], dtype=np.intp)
    ii, jj = np.triu_indices(n, k=1)
    if len(ii) > max_pairs:
        keep = np.random.default_rng(seed).choice(len(ii), size=max_pairs, replace=False)
        keep.sort()
        ii, jj = ii[keep], jj[keep]
    scores = pair_scores(model, rows[ii], rows[jj])
    if tau is None:
        tau = float(np.percentile(scores, tau_percentile))
    below = scores < tau
    pairs = {(int(a), int(b)) for a, b in zip(ii[below], jj[below])}
    return ExclusiveResult(pairs=pairs, tau=tau, n_scored=len(scores))


# ---------------------------------------------------------------------------
# Checkpoints
# ---------------------------------------------------------------------------

def save_model(model: CoherenceModel, path) -> None:
    surfaces = sorted(model.event_index, key=model.event_index.get)
    words = sorted(model.word_index, key=model.word_index.get)
    with open(path, "wb") as fh:
        np.savez(
            fh,
            version=np.array(CHECKPOINT_VERSION),
            kind=np.array(model.kind),
            margin=np.array(model.margin),
            seed=np.array(model.seed),
            event_surfaces=np.array(surfaces, dtype=np.str_),
            word_vocab=np.array(words, dtype=np.str_),
            event_emb=model.event_emb,
            word_emb=model.word_emb,
            hidden_w=model.hidden_w,
            hidden_b=model.hidden_b,
            out_w=model.out_w,
            out_b=np.array(model.out_b),
        )


def load_model(path) -> CoherenceModel:
    try:
        data = np.load(path, allow_pickle=False)
    except (OSError, ValueError) as exc:
        raise ModelError(f"cannot read model checkpoint {path}: {exc}") from exc
    if int(data["version"]) != CHECKPOINT_VERSION:
        raise ModelError(f"unsupported checkpoint version in {path}")
    surfaces = [str(s) for s in data["event_surfaces"]]
    words = [str(w) for w in data["word_vocab"]]
    return CoherenceModel(
        kind=str(data["kind"]),
        event_index={s: i for i, s in enumerate(surfaces)},
        word_index={w: i for i, w in enumerate(words)},
        event_emb=data["event_emb"],
        word_emb=data["word_emb"],
        hidden_w=data["hidden_w"],
        hidden_b=data["hidden_b"],
        out_w=data["out_w"],
        out_b=float(data["out_b"]),
        margin=float(data["margin"]),
        seed=int(data["seed"]),
    )
