"""Topic clustering with LDA (collapsed Gibbs sampling) and title routing.

Stories are clustered once at build time; at plan time a title is
folded into the trained model (topic-word counts held fixed) to pick
the event graph. Sampling is sequential and seeded, so fits and
inference are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import tokenize

LDA_FORMAT_HEADER = "graphplan-lda v1"

STOPWORDS = frozenset(
    """a an the and or but to of in on at for with from into by as so then
    when after before very too really his her their my our your its he she
    it they i we you was were is are be been am had has have did does do
    will would could should this that these those there here not no up out
    all some one two new next last day days every about over again""".split()
)


class TopicModelError(ValueError):
    """Raised for invalid LDA inputs or unreadable checkpoints."""


@dataclass
class TopicModel:
    k: int
    alpha: float
    beta: float
    seed: int
    vocab: dict[str, int]
    topic_word: np.ndarray     # (K, V) counts
    topic_totals: np.ndarray   # (K,)
    doc_topic: np.ndarray      # (D, K)
    doc_ids: list[str]

    @property
    def n_words(self) -> int:
        return len(self.vocab)


def make_lda_documents(
    stories, stopwords=STOPWORDS, min_df: int = 2
) -> tuple[list[list[str]], list[str]]:
    """Title+sentence token documents with stopwords and rare words
    (document frequency < min_df) removed."""
    raw_docs = []
    doc_ids = []
    for story in stories:
        tokens = list(story.title_tokens)
        for sent in story.sentences:
            tokens.extend(tokenize(sent))
        raw_docs.append([t for t in tokens if t not in stopwords])
        doc_ids.append(story.id)
    df: dict[str, int] = {}
    for doc in raw_docs:
        for w in set(doc):
            df[w] = df.get(w, 0) + 1
    docs = [[w for w in doc if df[w] >= min_df] for doc in raw_docs]
    return docs, doc_ids


def _sample_index(rng: np.random.Generator, weights: np.ndarray) -> int:
    cdf = np.cumsum(weights)
    return int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))


def fit_lda(
    docs: list[list[str]],
    k: int,
    alpha: float | None = None,
    beta: float = 0.01,
    iterations: int = 500,
    seed: int = 0,
    doc_ids: list[str] | None = None,
) -> TopicModel:
    """Collapsed Gibbs sampling over the documents.

    ``alpha`` defaults to 50/k. Count matrices reflect the final sweep's
    assignments and satisfy the usual conservation invariants.
    """
    if k < 1:
        raise TopicModelError("k must be >= 1")
    if alpha is None:
        alpha = 50.0 / k
    if alpha <= 0 or beta <= 0:
        raise TopicModelError("alpha and beta must be positive")
    if iterations < 1:
        raise TopicModelError("iterations must be >= 1")
    if not docs:
        raise TopicModelError("no documents")
    if doc_ids is None:
        doc_ids = [str(i) for i in range(len(docs))]
    if len(doc_ids) != len(docs):
        raise TopicModelError("doc_ids length does not match docs")

    vocab: dict[str, int] = {}
    for doc in docs:
        for w in doc:
            if w not in vocab:
                vocab[w] = len(vocab)
    n_words = len(vocab)
    if n_words == 0:
        raise TopicModelError("empty vocabulary")

    rng = np.random.default_rng(seed)
    word_ids = [np.array([vocab[w] for w in doc], dtype=np.intp) for doc in docs]
    assignments = [rng.integers(0, k, size=len(ids)) for ids in word_ids]

    topic_word = np.zeros((k, n_words), dtype=np.int64)
    topic_totals = np.zeros(k, dtype=np.int64)
    doc_topic = np.zeros((len(docs), k), dtype=np.int64)
    for d, (ids, zs) in enumerate(zip(word_ids, assignments)):
        for w, z in zip(ids, zs):
            topic_word[z, w] += 1
            topic_totals[z] += 1
            doc_topic[d, z] += 1

    v_beta = n_words * beta
    for _ in range(iterations):
        for d, (ids, zs) in enumerate(zip(word_ids, assignments)):
            for n in range(len(ids)):
                w, z = ids[n], zs[n]
                topic_word[z, w] -= 1
                topic_totals[z] -= 1
                doc_topic[d, z] -= 1
                p = (
                    (topic_word[:, w] + beta)
                    / (topic_totals + v_beta)
                    * (doc_topic[d] + alpha)
                )
                z = _sample_index(rng, p)
                zs[n] = z
                topic_word[z, w] += 1
                topic_totals[z] += 1
                doc_topic[d, z] += 1

    return TopicModel(
        k=k,
        alpha=alpha,
        beta=beta,
        seed=seed,
        vocab=vocab,
        topic_word=topic_word,
        topic_totals=topic_totals,
        doc_topic=doc_topic,
        doc_ids=list(doc_ids),
    )


def infer_topic(
    model: TopicModel, tokens: list[str], iterations: int = 64
) -> np.ndarray:
    """Topic distribution for a held-out token list (fold-in Gibbs).

    Topic-word counts stay fixed; unseen tokens are skipped. With no
    known token the prior (uniform) distribution is returned. The
    returned vector sums to 1.
    """
    word_ids = np.array(
        [model.vocab[w] for w in tokens if w in model.vocab], dtype=np.intp
    )
    if word_ids.size == 0:
        return np.full(model.k, 1.0 / model.k)

    rng = np.random.default_rng(model.seed)
    v_beta = model.n_words * model.beta
    zs = rng.integers(0, model.k, size=word_ids.size)
    local = np.zeros(model.k, dtype=np.int64)
    for z in zs:
        local[z] += 1

    acc = np.zeros(model.k, dtype=np.float64)
    n_acc = 0
    burn_in = iterations // 2
    for sweep in range(iterations):
        for n in range(word_ids.size):
            w, z = word_ids[n], zs[n]
            local[z] -= 1
            p = (
                (model.topic_word[:, w] + model.beta)
                / (model.topic_totals + v_beta)
                * (local + model.alpha)
            )
            z = _sample_index(rng, p)
            zs[n] = z
            local[z] += 1
        if sweep >= burn_in:
            acc += local
            n_acc += 1
    theta = acc / n_acc + model.alpha
    return theta / theta.sum()


def assign_story_topics(model: TopicModel, chains) -> dict[str, int]:
    """Hard topic per story: argmax of its smoothed doc-topic counts,
    ties going to the lowest topic index."""
    index = {sid: i for i, sid in enumerate(model.doc_ids)}
    out = {}
    for chain in chains:
        d = index.get(chain.story_id)
        if d is None:
            raise TopicModelError(f"story {chain.story_id!r} was not in the fitted corpus")
        out[chain.story_id] = int(np.argmax(model.doc_topic[d] + model.alpha))
    return out


def save_topic_model(model: TopicModel, path) -> None:
    words = sorted(model.vocab, key=model.vocab.get)
    lines = [
        LDA_FORMAT_HEADER,
        f"k {model.k}",
        f"alpha {model.alpha!r}",
        f"beta {model.beta!r}",
        f"seed {model.seed}",
        f"vocab {len(words)}",
        *words,
        f"docs {len(model.doc_ids)}",
        *model.doc_ids,
        "topic_word",
        *(" ".join(str(c) for c in row) for row in model.topic_word),
        "topic_totals",
        " ".join(str(c) for c in model.topic_totals),
        "doc_topic",
        *(" ".join(str(c) for c in row) for row in model.doc_topic),
    ]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_topic_model(path) -> TopicModel:
    with open(path, encoding="utf-8") as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    try:
        if lines[0] != LDA_FORMAT_HEADER:
            raise TopicModelError(f"unsupported model header: {lines[0]!r}")
        k = int(lines[1].split()[1])
        alpha = float(lines[2].split()[1])
        beta = float(lines[3].split()[1])
        seed = int(lines[4].split()[1])
        pos = 5
        n_words = int(lines[pos].split()[1])
        pos += 1
        words = lines[pos: pos + n_words]
        pos += n_words
        n_docs = int(lines[pos].split()[1])
        pos += 1
        doc_ids = lines[pos: pos + n_docs]
        pos += n_docs
        if lines[pos] != "topic_word":
            raise TopicModelError("missing topic_word section")
        pos += 1
        topic_word = np.array(
            [[int(c) for c in lines[pos + i].split()] for i in range(k)], dtype=np.int64
        ).reshape(k, n_words)
        pos += k
        if lines[pos] != "topic_totals":
            raise TopicModelError("missing topic_totals section")
        pos += 1
        topic_totals = np.array([int(c) for c in lines[pos].split()], dtype=np.int64)
        pos += 1
        if lines[pos] != "doc_topic":
            raise TopicModelError("missing doc_topic section")
        pos += 1
        doc_topic = np.array(
            [[int(c) for c in lines[pos + i].split()] for i in range(n_docs)],
            dtype=np.int64,
        ).reshape(n_docs, k)
    except (IndexError, ValueError) as exc:
        raise TopicModelError(f"{path}: {exc}") from exc
    return TopicModel(
        k=k,
        alpha=alpha,
        beta=beta,
        seed=seed,
        vocab={w: i for i, w in enumerate(words)},
        topic_word=topic_word,
        topic_totals=topic_totals,
        doc_topic=doc_topic,
        doc_ids=doc_ids,
    )
