"""Template-based surface realization and prompt export.

The realizer turns a plan into plain sentences via a small template
table (lookup order: full event surface, then head verb, then a generic
fallback). It exists so the pipeline runs end to end; it makes no
attempt at fluent neural generation.

``export_prompt`` renders the token format consumed by downstream
language-model fine-tuning: title words, ``<EOT>``, the events joined
by ``<SEP>``, and a closing ``<|endofinput|>``. Events may optionally
be masked with ``[MASK]`` (independently per event) to reproduce the
noisy-input export.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .corpus import parse_event

EOT = "<EOT>"
SEP = "<SEP>"
END = "<|endofinput|>"
MASK = "[MASK]"

GENERIC_TEMPLATE = "{subj} did: {surface}."

DEFAULT_TEMPLATES = {
    "buy": ["{subj} bought something new."],
    "wear": ["{subj} wore it all day."],
    "break": ["It broke."],
    "shatter": ["It shattered into pieces."],
    "decide": ["{subj} made a decision."],
    "decide(buy)": ["{subj} decided to buy another one."],
    "go": ["{subj} went out."],
    "be": ["{subj} was {obj}."],
    "feel": ["{subj} felt {obj}."],
    "eat": ["{subj} ate it."],
    "cook": ["{subj} cooked dinner."],
    "melt": ["The cheese melted."],
    "burn": ["It burned."],
    "taste": ["{subj} tasted it."],
    "call": ["{subj} called for help."],
    "come": ["Help came quickly."],
    "evacuate": ["Everyone evacuated."],
    "extinguish": ["The fire was extinguished."],
}


@dataclass
class TemplateSet:
    templates: dict[str, list[str]]
    default_subject: str = "Sam"
    generic: str = GENERIC_TEMPLATE

    def __post_init__(self):
        for key, options in self.templates.items():
            for tpl in options:
                if tpl.count("{subj}") > 1:
                    raise ValueError(f"template for {key!r} has multiple subject slots")
        if self.generic.count("{subj}") != 1:
            raise ValueError("generic template must have exactly one subject slot")

    def lookup(self, surface: str) -> str:
        options = self.templates.get(surface)
        if options is None:
            options = self.templates.get(parse_event(surface).head)
        return options[0] if options else self.generic


def default_templates() -> TemplateSet:
    return TemplateSet(templates={k: list(v) for k, v in DEFAULT_TEMPLATES.items()})


def load_templates(path) -> TemplateSet:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    return TemplateSet(
        templates={k: list(v) for k, v in data.get("templates", {}).items()},
        default_subject=data.get("default_subject", "Sam"),
        generic=data.get("generic", GENERIC_TEMPLATE),
    )


def realize(plan, templates: TemplateSet, subject: str | None = None) -> list[str]:
    """One sentence per planned event; deterministic first-match templates."""
    subj = subject or templates.default_subject
    sentences = []
    for surface in plan.events:
        event = parse_event(surface)
        tpl = templates.lookup(surface)
        obj = event.modifier or "it"
        sentence = tpl.replace("{subj}", subj).replace("{obj}", obj)
        sentence = sentence.replace("{surface}", surface)
        sentences.append(sentence)
    return sentences


_SPECIAL = (EOT, SEP, END, MASK)


def _check_tokens(tokens, allow_mask: bool = False) -> None:
    for tok in tokens:
        if allow_mask and tok == MASK:
            continue
        if any(special in tok for special in _SPECIAL) or " " in tok:
            raise ValueError(f"token {tok!r} collides with the prompt format")


def export_prompt(title_tokens, events: list[str]) -> str:
    """``title <EOT> e1 <SEP> e2 ... <|endofinput|>`` with single spaces."""
    if not events:
        raise ValueError("cannot export a plan with no events")
    _check_tokens(title_tokens)
    _check_tokens(events, allow_mask=True)
    parts = list(title_tokens) + [EOT]
    for i, event in enumerate(events):
        if i:
            parts.append(SEP)
        parts.append(event)
    parts.append(END)
    return " ".join(parts)


def mask_events(events: list[str], mask_rate: float, rng: np.random.Generator) -> list[str]:
    """Replace each event independently with [MASK] at ``mask_rate``."""
    if not 0.0 <= mask_rate <= 1.0:
        raise ValueError("mask_rate must lie in [0, 1]")
    return [MASK if rng.random() < mask_rate else e for e in events]


def export_prompts(plans, mask_rate: float = 0.0, seed: int = 0) -> list[str]:
    rng = np.random.default_rng(seed)
    return [
        export_prompt(p.title_tokens, mask_events(p.events, mask_rate, rng))
        for p in plans
    ]
