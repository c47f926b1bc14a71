import json

import pytest
from hypothesis import given, strategies as st

from graphplan.corpus import (
    CorpusError,
    Event,
    Frame,
    FrameArg,
    Story,
    extract_events,
    fallback_frames,
    load_corpus,
    parse_event,
    tokenize,
)


def write_corpus(tmp_path, records):
    path = tmp_path / "corpus.jsonl"
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            if isinstance(record, str):
                fh.write(record + "\n")
            else:
                fh.write(json.dumps(record) + "\n")
    return path


def frame(verb, idx, *args):
    return Frame(verb=verb, verb_index=idx, args=tuple(args))


def story_with_frames(sentence, frames, story_id="s1", title="a title"):
    return Story(
        id=story_id,
        title_tokens=tokenize(title),
        sentences=[sentence],
        frames=[frames],
    )


class TestLoadCorpus:
    def test_single_record(self, tmp_path):
        path = write_corpus(
            tmp_path,
            [{"id": "s1", "title": "New glasses", "sentences": ["Sam bought glasses."]}],
        )
        load = load_corpus(path)
        assert len(load.stories) == 1
        assert load.stories[0].id == "s1"
        assert load.stories[0].title_tokens == ["new", "glasses"]
        assert load.warning_count == 0

    def test_empty_file(self, tmp_path):
        path = write_corpus(tmp_path, [])
        assert load_corpus(path).stories == []

    def test_malformed_line_lenient(self, tmp_path):
        path = write_corpus(
            tmp_path,
            [
                {"id": "s1", "title": "ok", "sentences": ["Fine."]},
                "{this is not json",
            ],
        )
        load = load_corpus(path, strict=False)
        assert len(load.stories) == 1
        assert load.warning_count == 1
        assert "line 2" in load.warnings[0]

    def test_malformed_line_strict_names_line(self, tmp_path):
        path = write_corpus(tmp_path, ["{broken"])
        with pytest.raises(CorpusError, match="line 1"):
            load_corpus(path)

    def test_missing_title_rejected_with_warning(self, tmp_path):
        path = write_corpus(tmp_path, [{"id": "s1", "sentences": ["Hello."]}])
        load = load_corpus(path)
        assert load.stories == []
        assert load.warning_count == 1

    def test_title_optional_when_not_required(self, tmp_path):
        path = write_corpus(tmp_path, [{"id": "s1", "sentences": ["Hello."]}])
        load = load_corpus(path, require_title=False)
        assert len(load.stories) == 1
        assert load.stories[0].title_tokens == []

    def test_frames_parsed_and_validated(self, tmp_path):
        record = {
            "id": "s1",
            "title": "t",
            "sentences": ["Sam did not take it."],
            "frames": [
                [{"verb": "take", "verb_index": 3, "args": [{"role": "AM-NEG", "first": 2, "last": 2}]}]
            ],
        }
        path = write_corpus(tmp_path, [record])
        story = load_corpus(path).stories[0]
        assert story.frames[0][0].verb == "take"
        assert story.frames[0][0].args[0].role == "AM-NEG"

    def test_frame_span_outside_sentence_is_malformed(self, tmp_path):
        record = {
            "id": "s1",
            "title": "t",
            "sentences": ["Sam left."],
            "frames": [[{"verb": "leave", "verb_index": 1, "args": [{"role": "A1", "first": 0, "last": 9}]}]],
        }
        path = write_corpus(tmp_path, [record])
        with pytest.raises(CorpusError, match="line 1"):
            load_corpus(path)


class TestEventSurface:
    def test_surfaces(self):
        assert Event("take").surface == "take"
        assert Event("take", negated=True).surface == "(not)take"
        assert Event("take", modifier="over").surface == "take(over)"
        assert Event("decide", modifier="buy", negated=True).surface == "(not)decide(buy)"

    def test_round_trip(self):
        for e in [Event("go"), Event("be", "excite"), Event("take", "over", True)]:
            assert parse_event(e.surface) == e

    @given(
        head=st.from_regex(r"[a-z]{1,8}", fullmatch=True),
        mod=st.one_of(st.none(), st.from_regex(r"[a-z]{1,8}", fullmatch=True)),
        neg=st.booleans(),
    )
    def test_round_trip_property(self, head, mod, neg):
        event = Event(head=head, modifier=mod, negated=neg)
        assert parse_event(event.surface) == event

    def test_invalid_head_rejected(self):
        with pytest.raises(ValueError):
            Event("take over")
        with pytest.raises(ValueError):
            Event("")


class TestExtractionRules:
    def test_negation(self):
        story = story_with_frames(
            "Sam did not take it.",
            [frame("take", 3, FrameArg("AM-NEG", 2, 2))],
        )
        chain = extract_events(story)
        assert chain.surfaces == ["(not)take"]

    def test_preposition_modifier(self):
        story = story_with_frames("Sam will take over today.", [frame("take", 2)])
        assert extract_events(story).surfaces == ["take(over)"]

    def test_secondary_predicate(self):
        story = story_with_frames(
            "The news did excite her.",
            [frame("be", 2, FrameArg("AM-PRD", 3, 3))],
        )
        assert extract_events(story).surfaces == ["be(excite)"]

    def test_verb_combination(self):
        story = story_with_frames(
            "Sam decided to buy glasses.",
            [frame("decide", 1), frame("buy", 3)],
        )
        assert extract_events(story).surfaces == ["decide(buy)"]

    def test_combination_beats_preposition(self):
        # "take" is followed by a preposition AND a second verb in range
        story = story_with_frames(
            "Sam took over and decided quickly.",
            [frame("take", 1), frame("decide", 4)],
        )
        assert extract_events(story).surfaces == ["take(decide)"]

    def test_combination_respects_distance(self):
        story = story_with_frames(
            "Sam looked at the menu for a while and decided.",
            [frame("look", 1), frame("decide", 9)],
        )
        assert extract_events(story).surfaces == ["look", "decide"]

    def test_negation_on_second_verb_negates_combined_event(self):
        story = story_with_frames(
            "Sam decided not to buy it.",
            [frame("decide", 1), frame("buy", 4, FrameArg("AM-NEG", 2, 2))],
        )
        assert extract_events(story).surfaces == ["(not)decide(buy)"]

    def test_prd_frame_not_consumed_by_combination(self):
        story = story_with_frames(
            "Sam went and was excited today.",
            [frame("go", 1), frame("be", 3, FrameArg("AM-PRD", 4, 4))],
        )
        assert extract_events(story).surfaces == ["go", "be(excit)"]

    def test_bare_verbs_in_textual_order(self):
        story = Story(
            id="s",
            title_tokens=["t"],
            sentences=["Sam bought glasses.", "Sam wore them and was happy later."],
            frames=[
                [frame("buy", 1)],
                [frame("wear", 1), frame("be", 4, FrameArg("AM-PRD", 5, 5))],
            ],
        )
        assert extract_events(story).surfaces == ["buy", "wear", "be(happy)"]

    def test_every_frame_consumed_exactly_once(self):
        story = Story(
            id="s",
            title_tokens=["t"],
            sentences=["One two three four five six seven verb verb verb verb."],
            frames=[[frame("go", 7), frame("run", 8), frame("see", 9), frame("call", 10)]],
        )
        chain = extract_events(story)
        # two combinations: go(run), see(call)
        assert chain.surfaces == ["go(run)", "see(call)"]

    def test_no_frames_and_no_fallback_errors(self):
        story = Story(id="s", title_tokens=["t"], sentences=["Sam left."])
        with pytest.raises(CorpusError, match="fallback"):
            extract_events(story)

    def test_extraction_is_deterministic(self):
        story = story_with_frames(
            "Sam decided to buy glasses.",
            [frame("decide", 1), frame("buy", 3)],
        )
        assert extract_events(story).surfaces == extract_events(story).surfaces


class TestFallbackExtractor:
    def test_lexicon_verbs(self):
        frames = fallback_frames(tokenize("Sam bought glasses at the store"))
        assert [(f.verb, f.verb_index) for f in frames] == [("buy", 1)]

    def test_negation_pattern(self):
        frames = fallback_frames(tokenize("Sam did not buy glasses"))
        assert frames[0].role_arg("AM-NEG") is not None

    def test_copula_predicate_pattern(self):
        frames = fallback_frames(tokenize("Sam was very happy"))
        assert frames[0].verb == "be"
        prd = frames[0].role_arg("AM-PRD")
        assert prd is not None and prd.last == 3

    def test_copula_without_predicate_ignored(self):
        assert fallback_frames(tokenize("Sam was at the park")) == []

    def test_end_to_end_fallback_extraction(self):
        story = Story(
            id="s",
            title_tokens=["new", "glasses"],
            sentences=["Sam bought new glasses.", "Sam decided to buy another pair."],
        )
        chain = extract_events(story, fallback=True)
        assert chain.surfaces == ["buy", "decide(buy)"]
