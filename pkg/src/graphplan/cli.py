"""graphplan command line: one subcommand per pipeline stage plus an
end-to-end ``pipeline`` runner.

Exit codes: 0 success, 1 usage error, 2 data error (unreadable or
malformed inputs), 3 model/numeric error (bad hyperparameters, unknown
events, infeasible planning requests).

Every artifact-producing run writes ``<out>.manifest.json`` with the
sha256 of its inputs and the parameters used, so artifacts can be
traced back to what produced them.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from dataclasses import dataclass, field, fields
from importlib import resources

from . import coherence, corpus, graph as graphmod, metrics, planner, realizer, topics

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_MODEL = 3

BUILTIN_TOY = "builtin:toy"


class UsageError(Exception):
    """Bad flag combinations that argparse alone cannot express."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _sha256(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(65536), b""):
            digest.update(block)
    return digest.hexdigest()


def _write_manifest(out_path, inputs: dict, params: dict) -> None:
    manifest = {
        "inputs": {
            name: {"path": str(p), "sha256": _sha256(p)}
            for name, p in inputs.items()
            if p is not None
        },
        "params": params,
    }
    with open(f"{out_path}.manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _resolve_corpus(path, workdir=None):
    """Materialize builtin:toy into the working directory if requested."""
    if path != BUILTIN_TOY:
        return path
    data = resources.files("graphplan").joinpath("data/toy_corpus.jsonl").read_text()
    target_dir = workdir or "."
    os.makedirs(target_dir, exist_ok=True)
    target = os.path.join(target_dir, "toy_corpus.jsonl")
    with open(target, "w", encoding="utf-8") as fh:
        fh.write(data)
    return target


def _load_chains(path):
    chains = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
                events = [corpus.parse_event(s) for s in record["events"]]
                chains.append(corpus.EventChain(story_id=record["story_id"], events=events))
            except (json.JSONDecodeError, KeyError, corpus.CorpusError) as exc:
                raise corpus.CorpusError(f"{path} line {lineno}: {exc}") from exc
    return chains


def _write_chains(chains, path):
    with open(path, "w", encoding="utf-8") as fh:
        for chain in chains:
            record = {"story_id": chain.story_id, "events": chain.surfaces}
            fh.write(json.dumps(record, sort_keys=True) + "\n")


def _append_plans(plans, path):
    with open(path, "a", encoding="utf-8") as fh:
        for plan in plans:
            fh.write(json.dumps(plan.to_record(), sort_keys=True) + "\n")


def _load_plans(path):
    plans = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                plans.append(planner.plan_from_record(json.loads(line)))
    return plans


# ---------------------------------------------------------------------------
# Pipeline stages (shared by the subcommands and `pipeline`)
# ---------------------------------------------------------------------------

def stage_extract(corpus_path, out_path, fallback=False, strict=True):
    load = corpus.load_corpus(corpus_path, strict=strict)
    for warning in load.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    chains = [corpus.extract_events(s, fallback=fallback) for s in load.stories]
    _write_chains(chains, out_path)
    _write_manifest(out_path, {"corpus": corpus_path},
                    {"fallback": fallback, "strict": strict})
    return load.stories, chains


def stage_topics(corpus_path, out_path, k, alpha, beta, iterations, seed, min_df, strict=True):
    stories = corpus.load_corpus(corpus_path, strict=strict).stories
    docs, doc_ids = topics.make_lda_documents(stories, min_df=min_df)
    model = topics.fit_lda(
        docs, k=k, alpha=alpha, beta=beta, iterations=iterations, seed=seed,
        doc_ids=doc_ids,
    )
    topics.save_topic_model(model, out_path)
    _write_manifest(out_path, {"corpus": corpus_path},
                    {"k": k, "alpha": alpha, "beta": beta,
                     "iterations": iterations, "seed": seed, "min_df": min_df})
    return model


def stage_build_graphs(chains_path, lda_path, out_dir):
    chains = _load_chains(chains_path)
    model = topics.load_topic_model(lda_path)
    assignment = topics.assign_story_topics(model, chains)
    by_topic: dict[int, list] = {}
    for chain in chains:
        by_topic.setdefault(assignment[chain.story_id], []).append(chain)
    graphs = {t: graphmod.build_graph(t, topic_chains) for t, topic_chains in by_topic.items()}
    graphmod.save_graph_dir(graphs, out_dir)
    _write_manifest(os.path.join(out_dir, "graphs"),
                    {"chains": chains_path, "lda": lda_path}, {})
    return graphs


def stage_train_coherence(
    kind, chains_path, lda_path, out_path, corpus_path=None,
    dim=64, hidden=128, margin=0.5, epochs=10, lr=0.1,
    neg_per_pos=1, batch_size=32, seed=0, strict=True,
):
    chains = _load_chains(chains_path)
    lda = topics.load_topic_model(lda_path)
    story_topics = topics.assign_story_topics(lda, chains)
    surfaces = sorted({s for c in chains for s in c.surfaces})
    if kind == "event":
        pairs = coherence.build_event_pairs(chains, story_topics, neg_per_pos, seed)
        model = coherence.init_model(
            coherence.EVENT_EVENT, surfaces, dim=dim, hidden=hidden,
            margin=margin, seed=seed,
        )
    else:
        if corpus_path is None:
            raise coherence.ModelError("input-event training needs --corpus for the titles")
        stories = corpus.load_corpus(corpus_path, strict=strict).stories
        titles = {s.id: s.title_tokens for s in stories}
        pairs = coherence.build_input_pairs(titles, chains, story_topics, neg_per_pos, seed)
        vocab = sorted({w for t in titles.values() for w in t})
        model = coherence.init_model(
            coherence.INPUT_EVENT, surfaces, word_vocab=vocab,
            dim=dim, hidden=hidden, margin=margin, seed=seed,
        )
    trace = coherence.train(model, pairs, epochs=epochs, lr=lr, seed=seed,
                            batch_size=batch_size)
    coherence.save_model(model, out_path)
    _write_manifest(out_path, {"chains": chains_path, "lda": lda_path,
                               "corpus": corpus_path},
                    {"kind": kind, "dim": dim, "hidden": hidden, "margin": margin,
                     "epochs": epochs, "lr": lr, "neg_per_pos": neg_per_pos,
                     "batch_size": batch_size, "seed": seed})
    print(f"{kind} coherence: {len(pairs)} pairs, "
          f"loss {trace[0]:.4f} -> {trace[-1]:.4f}")
    return model, trace


def stage_derive_exclusive(model_path, graph_dir, tau=None, tau_percentile=5.0,
                           max_pairs=500_000, seed=0):
    model = coherence.load_model(model_path)
    mapping = graphmod.load_manifest(graph_dir)
    results = {}
    for topic_id, name in sorted(mapping.items()):
        path = os.path.join(graph_dir, name)
        graph = graphmod.load_graph(path)
        result = coherence.derive_exclusive(
            model, graph, tau=tau, tau_percentile=tau_percentile,
            max_pairs=max_pairs, seed=seed,
        )
        graph.exclusive = result.pairs
        graphmod.save_graph(graph, path)
        results[topic_id] = result
        print(f"topic {topic_id}: tau={result.tau:.6f} "
              f"exclusive={len(result.pairs)} of {result.n_scored} pairs")
    return results


def _load_graph_for_title(graph_dir, lda, title_tokens):
    import numpy as np

    theta = topics.infer_topic(lda, title_tokens)
    topic_id = int(np.argmax(theta))
    return graphmod.load_graph_for_topic(graph_dir, topic_id)


def stage_plan(graph_dir, lda_path, ee_path, ie_path, titles, out_path,
               length=5, beam=10, lam=0.5, n_starts=None, seed=0,
               no_repeat=False, literal_decay=False, starts_by_input=False,
               prefix=None):
    lda = topics.load_topic_model(lda_path)
    ee = coherence.load_model(ee_path)
    ie = coherence.load_model(ie_path)
    plans = []
    for title in titles:
        tokens = corpus.tokenize(title) if isinstance(title, str) else list(title)
        graph = _load_graph_for_title(graph_dir, lda, tokens)
        plan = planner.plan_beam(
            graph, ee, ie, tokens, length=length, beam=beam, n_starts=n_starts,
            lam=lam, seed=seed, no_repeat=no_repeat, literal_decay=literal_decay,
            starts_by_input=starts_by_input, prefix=prefix,
        )
        plans.append(plan)
    if out_path:
        _append_plans(plans, out_path)
        _write_manifest(out_path, {"lda": lda_path, "ee": ee_path, "ie": ie_path},
                        {"length": length, "beam": beam, "lambda": lam,
                         "n_starts": n_starts, "seed": seed,
                         "no_repeat": no_repeat, "literal_decay": literal_decay})
    return plans


# ---------------------------------------------------------------------------
# Pipeline configuration
# ---------------------------------------------------------------------------

@dataclass
class PipelineConfig:
    corpus: str = BUILTIN_TOY
    workdir: str = "graphplan-out"
    fallback_extractor: bool = True
    strict: bool = True
    k: int = 3
    alpha: float | None = None          # None -> 50/k
    beta: float = 0.01
    lda_iters: int = 150
    lda_seed: int = 1
    min_df: int = 2
    dim: int = 32
    hidden: int = 32
    margin: float = 0.5
    lr: float = 0.1
    epochs: int = 12
    neg_per_pos: int = 1
    batch_size: int = 32
    ee_seed: int = 2
    ie_seed: int = 3
    tau: float | None = None            # None -> percentile rule
    tau_percentile: float = 5.0
    exclusive_max_pairs: int = 500_000
    exclusive_seed: int = 4
    length: int = 5
    beam: int = 10
    lam: float = 0.5
    n_starts: int | None = None         # None -> beam
    plan_seed: int = 5
    no_repeat: bool = False
    literal_decay: bool = False
    titles: list[str] = field(default_factory=lambda: [
        "New glasses", "Grilled cheese", "Fire next door",
    ])

    def validate(self):
        checks = [
            ("k", self.k >= 1),
            ("alpha", self.alpha is None or self.alpha > 0),
            ("beta", self.beta > 0),
            ("lda_iters", self.lda_iters >= 1),
            ("min_df", self.min_df >= 1),
            ("dim", self.dim >= 1),
            ("hidden", self.hidden >= 1),
            ("margin", self.margin >= 0),
            ("lr", self.lr > 0),
            ("epochs", self.epochs >= 1),
            ("neg_per_pos", self.neg_per_pos >= 1),
            ("batch_size", self.batch_size >= 1),
            ("tau", self.tau is None or 0 < self.tau < 1),
            ("tau_percentile", 0 < self.tau_percentile < 100),
            ("exclusive_max_pairs", self.exclusive_max_pairs >= 1),
            ("length", self.length >= 1),
            ("beam", self.beam >= 1),
            ("lam", 0 < self.lam <= 1),
            ("n_starts", self.n_starts is None or self.n_starts >= 1),
            ("titles", len(self.titles) >= 1),
        ]
        for name, ok in checks:
            if not ok:
                raise ValueError(f"config field {name!r} violates its precondition")
        return self


_BOOL_VALUES = {"true": True, "false": False, "1": True, "0": False,
                "yes": True, "no": False}


def _apply_config_value(config: PipelineConfig, key: str, value: str) -> None:
    key = key.replace("-", "_")
    if key == "lambda":
        key = "lam"
    if key not in {f.name for f in fields(PipelineConfig)}:
        raise ValueError(f"unknown config key {key!r}")
    current = getattr(config, key)
    if key == "titles":
        setattr(config, key, [t.strip() for t in value.split(";") if t.strip()])
    elif key in ("alpha", "tau", "n_starts"):
        setattr(config, key, None if value.lower() in ("auto", "none") else
                (int(value) if key == "n_starts" else float(value)))
    elif isinstance(current, bool):
        if value.lower() not in _BOOL_VALUES:
            raise ValueError(f"config field {key!r} expects a boolean")
        setattr(config, key, _BOOL_VALUES[value.lower()])
    elif isinstance(current, int):
        setattr(config, key, int(value))
    elif isinstance(current, float):
        setattr(config, key, float(value))
    else:
        setattr(config, key, value)


def load_config(path, overrides=()) -> PipelineConfig:
    """Flat key = value file; '#' starts a comment; unknown keys
    rejected. ``overrides`` ("key=value" strings) win over the file."""
    config = PipelineConfig()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path} line {lineno}: expected 'key = value'")
            key, value = (part.strip() for part in line.split("=", 1))
            _apply_config_value(config, key, value)
    for item in overrides:
        if "=" not in item:
            raise ValueError(f"override {item!r} must look like key=value")
        key, value = (part.strip() for part in item.split("=", 1))
        _apply_config_value(config, key, value)
    return config.validate()


def run_pipeline(config: PipelineConfig) -> dict:
    """extract -> topics -> graphs -> coherence x2 -> exclusive -> plan."""
    w = config.workdir
    os.makedirs(w, exist_ok=True)
    corpus_path = _resolve_corpus(config.corpus, workdir=w)
    paths = {
        "corpus": corpus_path,
        "chains": os.path.join(w, "chains.jsonl"),
        "lda": os.path.join(w, "model.lda"),
        "graphs": os.path.join(w, "graphs"),
        "ee": os.path.join(w, "ee.coh"),
        "ie": os.path.join(w, "ie.coh"),
        "plans": os.path.join(w, "plans.jsonl"),
    }

    print("[1/6] extracting events")
    stage_extract(corpus_path, paths["chains"],
                  fallback=config.fallback_extractor, strict=config.strict)
    print("[2/6] fitting topics")
    stage_topics(corpus_path, paths["lda"], k=config.k, alpha=config.alpha,
                 beta=config.beta, iterations=config.lda_iters,
                 seed=config.lda_seed, min_df=config.min_df, strict=config.strict)
    print("[3/6] building graphs")
    stage_build_graphs(paths["chains"], paths["lda"], paths["graphs"])
    print("[4/6] training coherence models")
    stage_train_coherence(
        "event", paths["chains"], paths["lda"], paths["ee"],
        dim=config.dim, hidden=config.hidden, margin=config.margin,
        epochs=config.epochs, lr=config.lr, neg_per_pos=config.neg_per_pos,
        batch_size=config.batch_size, seed=config.ee_seed,
    )
    stage_train_coherence(
        "input", paths["chains"], paths["lda"], paths["ie"],
        corpus_path=corpus_path, dim=config.dim, hidden=config.hidden,
        margin=config.margin, epochs=config.epochs, lr=config.lr,
        neg_per_pos=config.neg_per_pos, batch_size=config.batch_size,
        seed=config.ie_seed, strict=config.strict,
    )
    print("[5/6] deriving mutually exclusive sets")
    stage_derive_exclusive(paths["ee"], paths["graphs"], tau=config.tau,
                           tau_percentile=config.tau_percentile,
                           max_pairs=config.exclusive_max_pairs,
                           seed=config.exclusive_seed)
    print("[6/6] planning")
    if os.path.exists(paths["plans"]):
        os.remove(paths["plans"])
    plans = stage_plan(
        paths["graphs"], paths["lda"], paths["ee"], paths["ie"],
        config.titles, paths["plans"], length=config.length, beam=config.beam,
        lam=config.lam, n_starts=config.n_starts, seed=config.plan_seed,
        no_repeat=config.no_repeat, literal_decay=config.literal_decay,
    )
    for plan in plans:
        title = " ".join(plan.title_tokens)
        print(f"  {title!r} (topic {plan.topic_id}): "
              f"{' -> '.join(plan.events)}  [total {plan.total_score:.4f}]")

    snapshot = {f.name: getattr(config, f.name) for f in fields(PipelineConfig)}
    manifest = {
        "config": snapshot,
        "inputs": {"corpus": {"path": corpus_path, "sha256": _sha256(corpus_path)}},
        "artifacts": {k: v for k, v in paths.items() if k != "corpus"},
    }
    with open(os.path.join(w, "run_manifest.json"), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return paths


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> _Parser:
    parser = _Parser(prog="graphplan", description=__doc__)
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("extract", help="extract event chains from a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--fallback-extractor", action="store_true")
    p.add_argument("--lenient", action="store_true",
                   help="skip malformed lines instead of failing")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("topics", help="fit the LDA topic model")
    p.add_argument("--corpus", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--alpha", type=float, default=None, help="default: 50/k")
    p.add_argument("--beta", type=float, default=0.01)
    p.add_argument("--iters", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--min-df", type=int, default=2)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_topics)

    p = sub.add_parser("build-graphs", help="build per-topic event graphs")
    p.add_argument("--chains", required=True)
    p.add_argument("--topics", required=True, help="fitted LDA checkpoint")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_build_graphs)

    p = sub.add_parser("train-coherence", help="train a coherence scorer")
    p.add_argument("--kind", choices=["event", "input"], required=True)
    p.add_argument("--chains", required=True)
    p.add_argument("--topics", required=True)
    p.add_argument("--corpus", help="needed for --kind input (titles)")
    p.add_argument("--dim", type=int, default=64)
    p.add_argument("--hidden", type=int, default=128)
    p.add_argument("--margin", type=float, default=0.5)
    p.add_argument("--epochs", type=int, default=10)
    p.add_argument("--lr", type=float, default=0.1)
    p.add_argument("--neg-per-pos", type=int, default=1)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train_coherence)

    p = sub.add_parser("derive-exclusive",
                       help="fill the graphs' mutually exclusive sets")
    p.add_argument("--model", required=True, help="event-event coherence model")
    p.add_argument("--graphs", required=True)
    p.add_argument("--tau", type=float, default=None, help="absolute threshold")
    p.add_argument("--tau-percentile", type=float, default=5.0)
    p.add_argument("--max-pairs", type=int, default=500_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_derive_exclusive)

    p = sub.add_parser("plan", help="plan a storyline for a title")
    p.add_argument("--title", required=True)
    p.add_argument("--graphs", required=True)
    p.add_argument("--lda", required=True)
    p.add_argument("--ee", required=True)
    p.add_argument("--ie", required=True)
    p.add_argument("--length", type=int, default=5)
    p.add_argument("--beam", type=int, default=10)
    p.add_argument("--lambda", dest="lam", type=float, default=0.5)
    p.add_argument("--n-starts", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-repeat", action="store_true")
    p.add_argument("--literal-decay", action="store_true")
    p.add_argument("--starts-by-input", action="store_true")
    p.add_argument("--prefix", help="comma-separated event surfaces to pin")
    p.add_argument("--out", help="append the plan record here")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("walk", help="random-walk baseline plan")
    p.add_argument("--graphs", required=True)
    p.add_argument("--lda", help="route by title (with --title)")
    p.add_argument("--title")
    p.add_argument("--topic", type=int, help="pick the topic graph directly")
    p.add_argument("--length", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_walk)

    p = sub.add_parser("stats", help="summarize the built graphs")
    p.add_argument("--graphs", required=True)
    p.add_argument("--count-length", type=int, default=None,
                   help="also count walks of this length")
    p.add_argument("--count-limit", type=int, default=1_000_000)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("eval-diversity", help="Dist-1/Dist-2 over plans")
    p.add_argument("--plans", required=True)
    p.add_argument("--per-sequence", action="store_true")
    p.add_argument("--out", help="write the report record here")
    p.set_defaults(func=cmd_eval_diversity)

    p = sub.add_parser("realize", help="render plans as template text")
    p.add_argument("--plans", required=True)
    p.add_argument("--templates", help="template JSON file")
    p.add_argument("--subject")
    p.add_argument("--out")
    p.set_defaults(func=cmd_realize)

    p = sub.add_parser("export", help="export plans in the prompt format")
    p.add_argument("--plans", required=True)
    p.add_argument("--mask-rate", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("pipeline", help="run every stage from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--workdir", help="override the config workdir")
    p.add_argument("--set", dest="overrides", action="append", default=[],
                   metavar="KEY=VALUE", help="override a config field")
    p.set_defaults(func=cmd_pipeline)

    return parser


def cmd_extract(args):
    corpus_path = _resolve_corpus(args.corpus)
    stories, chains = stage_extract(
        corpus_path, args.out, fallback=args.fallback_extractor,
        strict=not args.lenient,
    )
    n_events = sum(len(c.events) for c in chains)
    print(f"extracted {n_events} events from {len(stories)} stories -> {args.out}")


def cmd_topics(args):
    corpus_path = _resolve_corpus(args.corpus)
    model = stage_topics(corpus_path, args.out, k=args.k, alpha=args.alpha,
                         beta=args.beta, iterations=args.iters, seed=args.seed,
                         min_df=args.min_df)
    print(f"fitted LDA: k={model.k} vocabulary={model.n_words} -> {args.out}")


def cmd_build_graphs(args):
    graphs = stage_build_graphs(args.chains, args.topics, args.out)
    for topic_id in sorted(graphs):
        stats = graphmod.graph_stats(graphs[topic_id])
        print(f"topic {topic_id}: {stats.n_events} events, {stats.n_edges} edges")


def cmd_train_coherence(args):
    stage_train_coherence(
        args.kind, args.chains, args.topics, args.out, corpus_path=args.corpus,
        dim=args.dim, hidden=args.hidden, margin=args.margin,
        epochs=args.epochs, lr=args.lr, neg_per_pos=args.neg_per_pos,
        batch_size=args.batch_size, seed=args.seed,
    )


def cmd_derive_exclusive(args):
    stage_derive_exclusive(args.model, args.graphs, tau=args.tau,
                           tau_percentile=args.tau_percentile,
                           max_pairs=args.max_pairs, seed=args.seed)


def cmd_plan(args):
    prefix = [s.strip() for s in args.prefix.split(",")] if args.prefix else None
    plans = stage_plan(
        args.graphs, args.lda, args.ee, args.ie, [args.title], args.out,
        length=args.length, beam=args.beam, lam=args.lam,
        n_starts=args.n_starts, seed=args.seed, no_repeat=args.no_repeat,
        literal_decay=args.literal_decay, starts_by_input=args.starts_by_input,
        prefix=prefix,
    )
    print(json.dumps(plans[0].to_record(), sort_keys=True))


def cmd_walk(args):
    if args.topic is not None:
        graph = graphmod.load_graph_for_topic(args.graphs, args.topic)
    elif args.title and args.lda:
        lda = topics.load_topic_model(args.lda)
        graph = _load_graph_for_title(args.graphs, lda, corpus.tokenize(args.title))
    else:
        raise UsageError("walk needs either --topic or both --title and --lda")
    plan = planner.random_walk(graph, length=args.length, seed=args.seed)
    if args.out:
        _append_plans([plan], args.out)
    print(json.dumps(plan.to_record(), sort_keys=True))


def cmd_stats(args):
    mapping = graphmod.load_manifest(args.graphs)
    header = f"{'topic':>6} {'events':>7} {'edges':>7} {'out-deg':>8} {'starts':>7} {'excl':>6}"
    print(header)
    for topic_id, name in sorted(mapping.items()):
        graph = graphmod.load_graph(os.path.join(args.graphs, name))
        s = graphmod.graph_stats(graph)
        line = (f"{topic_id:>6} {s.n_events:>7} {s.n_edges:>7} "
                f"{s.mean_out_degree:>8.2f} {s.n_start_events:>7} {s.n_exclusive:>6}")
        if args.count_length:
            count = graphmod.count_sequences(graph, args.count_length, args.count_limit)
            suffix = "+" if count >= args.count_limit else ""
            line += f"  walks(len={args.count_length})={count}{suffix}"
        print(line)


def cmd_eval_diversity(args):
    plans = _load_plans(args.plans)
    report = metrics.diversity_report(plans)
    record = report.to_record()
    if args.per_sequence:
        sequences = [list(p.events) for p in plans]
        record["dist1_per_sequence"] = metrics.sequence_mean_dist_n(sequences, 1)
        record["dist2_per_sequence"] = metrics.sequence_mean_dist_n(sequences, 2)
    print(f"Dist-1 {report.dist1:.2%}  Dist-2 {report.dist2:.2%}  "
          f"({report.n_sequences} sequences)")
    line = json.dumps(record, sort_keys=True)
    print(line)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(line + "\n")


def cmd_realize(args):
    plans = _load_plans(args.plans)
    templates = (realizer.load_templates(args.templates) if args.templates
                 else realizer.default_templates())
    lines = []
    for plan in plans:
        sentences = realizer.realize(plan, templates, subject=args.subject)
        lines.append(" ".join(sentences))
    output = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(output)
    else:
        print(output, end="")


def cmd_export(args):
    plans = _load_plans(args.plans)
    prompts = realizer.export_prompts(plans, mask_rate=args.mask_rate, seed=args.seed)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write("\n".join(prompts) + "\n")
    _write_manifest(args.out, {"plans": args.plans},
                    {"mask_rate": args.mask_rate, "seed": args.seed})
    print(f"wrote {len(prompts)} prompts -> {args.out}")


def cmd_pipeline(args):
    config = load_config(args.config, overrides=args.overrides)
    if args.workdir:
        config.workdir = args.workdir
    run_pipeline(config)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not getattr(args, "func", None):
        parser.print_help()
        return EXIT_USAGE
    try:
        args.func(args)
    except UsageError as exc:
        print(f"graphplan: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (corpus.CorpusError, graphmod.GraphError, OSError,
            json.JSONDecodeError) as exc:
        print(f"graphplan: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (coherence.ModelError, planner.PlannerError,
            topics.TopicModelError, ValueError) as exc:
        print(f"graphplan: model error: {exc}", file=sys.stderr)
        return EXIT_MODEL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
