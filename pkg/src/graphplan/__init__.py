"""graphplan: event-graph storyline planning.

Builds per-topic event graphs from a story corpus, trains coherence
scorers and mutually exclusive event sets, and plans event sequences by
score-guided beam search. See the README for the pipeline walkthrough.
"""

from .corpus import (
    Event,
    EventChain,
    Story,
    CorpusError,
    extract_events,
    load_corpus,
    parse_event,
    tokenize,
)
from .stemming import inflection_stem, porter_stem
from .graph import (
    EventGraph,
    GraphError,
    GraphStats,
    build_graph,
    count_sequences,
    graph_stats,
    load_graph,
    save_graph,
)
from .topics import (
    TopicModel,
    TopicModelError,
    assign_story_topics,
    fit_lda,
    infer_topic,
    load_topic_model,
    save_topic_model,
)
from .coherence import (
    CoherenceModel,
    ModelError,
    TrainingPair,
    build_event_pairs,
    build_input_pairs,
    contrastive_loss,
    derive_exclusive,
    init_model,
    load_model,
    save_model,
    score_event_pair,
    score_input_event,
    train,
)
from .planner import (
    BeamCandidate,
    Plan,
    PlannerError,
    candidates,
    decay_weights,
    plan_beam,
    random_walk,
    select_graph,
    step_score,
    step_score_core,
)
from .metrics import DiversityReport, dist_n, diversity_report
from .realizer import TemplateSet, export_prompt, load_templates, realize

__version__ = "0.1.0"
