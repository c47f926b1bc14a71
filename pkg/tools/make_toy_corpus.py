"""Regenerate the bundled toy corpus (src/graphplan/data/toy_corpus.jsonl).

Stories are sampled from three hand-built step graphs (one per theme) so
the extracted event graphs have real branching. Every story is checked
against the fallback extractor: the extracted chain must equal the
intended one, otherwise generation fails loudly.
"""

import json
import os
import sys

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from graphplan.corpus import Story, extract_events, tokenize  # noqa: E402

NAMES = ["Sam", "Mia", "Leo", "Ava", "Ben", "Zoe"]

# step -> (sentence template, expected event surface)
GLASSES_STEPS = {
    "wake_up": ("{name} woke up early.", "wake(up)"),
    "need": ("{name} needed new glasses.", "need"),
    "go": ("{name} went to the optician.", "go"),
    "look": ("{name} looked at the mirror.", "look"),
    "pick_out": ("{name} picked out new frames.", "pick(out)"),
    "buy": ("{name} bought a nice pair.", "buy"),
    "pay": ("{name} paid at the counter.", "pay"),
    "wear": ("{name} wore them to school.", "wear"),
    "squint": ("{name} squinted all day.", "squint"),
    "read": ("{name} read the small print.", "read"),
    "see": ("{name} saw much better.", "see"),
    "be_happy": ("{name} was happy with them.", "be(happy)"),
    "break": ("The glasses broke that afternoon.", "break"),
    "shatter": ("The lenses shattered into pieces.", "shatter"),
    "not_care": ("{name} did not care about the scratches.", "(not)care"),
    "decide_buy": ("{name} decided to buy another pair.", "decide(buy)"),
}
GLASSES_GRAPH = {
    "wake_up": ["need"],
    "need": ["go", "buy"],
    "go": ["buy", "look"],
    "look": ["buy", "pick_out"],
    "pick_out": ["pay", "buy"],
    "buy": ["wear", "pay"],
    "pay": ["wear"],
    "wear": ["break", "be_happy", "see", "squint"],
    "squint": ["read"],
    "read": ["see"],
    "see": ["be_happy"],
    "break": ["shatter", "decide_buy", "not_care"],
    "shatter": ["decide_buy"],
    "be_happy": ["wear"],
    "not_care": ["wear"],
    "decide_buy": ["buy"],
}
GLASSES_STARTS = ["wake_up", "need", "go"]
GLASSES_TITLES = [
    "New glasses", "Broken glasses", "The new pair", "Blurry eyes",
    "Glasses trouble", "At the optician",
]

CHEESE_STEPS = {
    "be_hungry": ("{name} was hungry by noon.", "be(hungry)"),
    "smell_kitchen": ("The kitchen smelled amazing.", "smell"),
    "decide_cook": ("{name} decided to cook lunch.", "decide(cook)"),
    "slice": ("{name} sliced the bread.", "slice"),
    "heat": ("{name} heated the pan.", "heat"),
    "put": ("{name} put butter everywhere.", "put"),
    "melt": ("The cheese melted slowly.", "melt"),
    "flip": ("{name} flipped the sandwich.", "flip"),
    "burn": ("The first side burned a little.", "burn"),
    "cook": ("{name} cooked both sides.", "cook"),
    "serve": ("{name} served it hot.", "serve"),
    "taste": ("{name} tasted a corner.", "taste"),
    "eat": ("{name} ate the sandwich.", "eat"),
    "be_full": ("{name} was full afterwards.", "be(full)"),
}
CHEESE_GRAPH = {
    "smell_kitchen": ["be_hungry"],
    "be_hungry": ["decide_cook"],
    "decide_cook": ["slice", "heat"],
    "slice": ["put", "heat"],
    "heat": ["melt", "put"],
    "put": ["melt", "flip"],
    "melt": ["flip", "taste"],
    "flip": ["burn", "cook"],
    "burn": ["flip", "taste"],
    "cook": ["serve"],
    "serve": ["eat"],
    "taste": ["eat"],
    "eat": ["be_full"],
    "be_full": [],
}
CHEESE_STARTS = ["be_hungry", "smell_kitchen", "decide_cook"]
CHEESE_TITLES = [
    "Grilled cheese", "Cheese sandwich", "Melted cheese",
    "Sandwich for lunch", "The hot pan", "Bread and butter",
]

FIRE_STEPS = {
    "wake_up": ("{name} woke up at midnight.", "wake(up)"),
    "smell_smoke": ("{name} smelled smoke outside.", "smell"),
    "catch_on": ("The shed caught on fire.", "catch(on)"),
    "go_off": ("The alarm went off loudly.", "go(off)"),
    "call": ("{name} called the fire department.", "call"),
    "run": ("{name} ran next door.", "run"),
    "come": ("The firemen came quickly.", "come"),
    "evacuate": ("The whole family evacuated.", "evacuate"),
    "extinguish": ("The crew extinguished the flames.", "extinguish"),
    "save": ("The firemen saved the cat.", "save"),
    "be_safe": ("Everyone was safe at last.", "be(safe)"),
    "thank": ("{name} thanked the crew.", "thank"),
}
FIRE_GRAPH = {
    "wake_up": ["smell_smoke"],
    "smell_smoke": ["catch_on", "call", "run"],
    "catch_on": ["go_off", "call"],
    "go_off": ["evacuate", "call"],
    "call": ["come", "evacuate"],
    "run": ["call"],
    "come": ["extinguish", "save"],
    "evacuate": ["come"],
    "extinguish": ["be_safe"],
    "save": ["be_safe", "thank"],
    "be_safe": ["thank"],
    "thank": [],
}
FIRE_STARTS = ["wake_up", "smell_smoke", "catch_on"]
FIRE_TITLES = [
    "Fire next door", "Smoke alarm", "House fire", "The big fire",
    "Smoke at midnight", "The brave firemen",
]

THEMES = [
    ("glasses", GLASSES_STEPS, GLASSES_GRAPH, GLASSES_STARTS, GLASSES_TITLES),
    ("cheese", CHEESE_STEPS, CHEESE_GRAPH, CHEESE_STARTS, CHEESE_TITLES),
    ("fire", FIRE_STEPS, FIRE_GRAPH, FIRE_STARTS, FIRE_TITLES),
]

STORIES_PER_THEME = 20
TARGET_LENGTH = 5


def sample_walk(rng, graph, starts):
    step = starts[int(rng.integers(len(starts)))]
    walk = [step]
    while len(walk) < TARGET_LENGTH:
        nexts = graph[walk[-1]]
        if not nexts:
            break
        walk.append(nexts[int(rng.integers(len(nexts)))])
    return walk


def main():
    rng = np.random.default_rng(20240101)
    records = []
    for theme, steps, graph, starts, titles in THEMES:
        made = 0
        while made < STORIES_PER_THEME:
            walk = sample_walk(rng, graph, starts)
            if len(walk) < 3:
                continue
            name = NAMES[int(rng.integers(len(NAMES)))]
            sentences = [steps[s][0].format(name=name) for s in walk]
            expected = [steps[s][1] for s in walk]
            story_id = f"{theme}-{made:02d}"
            title = titles[made % len(titles)]
            story = Story(
                id=story_id, title_tokens=tokenize(title), sentences=sentences
            )
            got = extract_events(story, fallback=True).surfaces
            if got != expected:
                raise SystemExit(
                    f"extraction mismatch for {story_id}: {got} != {expected}\n"
                    f"sentences: {sentences}"
                )
            records.append({"id": story_id, "title": title, "sentences": sentences})
            made += 1

    out = os.path.join(
        os.path.dirname(__file__), "..", "src", "graphplan", "data", "toy_corpus.jsonl"
    )
    os.makedirs(os.path.dirname(out), exist_ok=True)
    with open(out, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record) + "\n")
    print(f"wrote {len(records)} stories to {out}")


if __name__ == "__main__":
    main()
