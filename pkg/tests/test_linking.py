import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xkg.amr import parse_penman
from xkg.linking import MENTION, SENSE, Segment, SegmentReport, load_segments, match_segments
from xkg.rdf import (
    FRED_NS,
    OWL_EQUIVALENT_CLASS,
    OWL_SAME_AS,
    WN30_NS,
    Iri,
    Triple,
)
from xkg.translate import translate


def scene_graph():
    return translate(parse_penman(
        '(c / celebrate-01 :ARG0 (a / athlete '
        ':mod (c2 / country :name (n / name :op1 "Saint" :op2 "Lucia"))))'))


class TestMatchSegments:
    def test_sense_segment_adds_equivalence(self):
        graph = scene_graph()
        synset = Iri(WN30_NS + "synset-athlete-noun-1")
        linked = match_segments(graph, [Segment("athlete", SENSE, synset)])
        assert Triple(Iri(FRED_NS + "Athlete"), OWL_EQUIVALENT_CLASS, synset) in linked.triples

    def test_mention_segment_adds_same_as(self):
        graph = scene_graph()
        target = Iri("http://www.wikidata.org/entity/Q760")
        linked = match_segments(graph, [Segment("Saint Lucia", MENTION, target)])
        assert Triple(Iri(FRED_NS + "country_1"), OWL_SAME_AS, target) in linked.triples

    def test_empty_segment_list_is_identity(self):
        graph = scene_graph()
        assert match_segments(graph, []).triples == graph.triples

    def test_unmatched_segment_reported(self):
        graph = scene_graph()
        reports: list[SegmentReport] = []
        linked = match_segments(
            graph, [Segment("ALFRED", MENTION, Iri("http://www.wikidata.org/entity/Q0"))],
            reports)
        assert linked.triples == graph.triples
        assert [r.reason for r in reports] == ["unmatched"]

    def test_ambiguous_segment_skipped(self):
        graph = translate(parse_penman("(a / athlete :mod (b / athlete))"))
        reports: list[SegmentReport] = []
        linked = match_segments(
            graph, [Segment("athlete", MENTION, Iri("http://www.wikidata.org/entity/Q1"))],
            reports)
        assert linked.triples == graph.triples
        assert [r.reason for r in reports] == ["ambiguous"]

    def test_monotone_idempotent_bounded(self):
        graph = scene_graph()
        segments = [
            Segment("athlete", SENSE, Iri(WN30_NS + "synset-athlete-noun-1")),
            Segment("Saint Lucia", MENTION, Iri("http://www.wikidata.org/entity/Q760")),
            Segment("nothing here", MENTION, Iri("http://www.wikidata.org/entity/Q0")),
        ]
        once = match_segments(graph, segments)
        twice = match_segments(once, segments)
        assert graph.triples <= once.triples
        assert once.triples == twice.triples
        assert len(once.triples - graph.triples) <= len(segments)

    def test_segments_load_from_json(self, tmp_path):
        path = tmp_path / "segments.json"
        path.write_text(json.dumps([
            {"text": "athlete", "kind": "sense", "target": "wn30:synset-athlete-noun-1"},
            {"text": "Saint Lucia", "kind": "mention", "target": "wd:Q760"},
        ]), encoding="utf-8")
        segments = load_segments(path)
        assert [s.kind for s in segments] == [SENSE, MENTION]
        linked = match_segments(scene_graph(), segments)
        assert len(linked.triples - scene_graph().triples) == 2

    def test_bad_segments_rejected(self):
        target = Iri("http://www.wikidata.org/entity/Q1")
        with pytest.raises(ValueError):
            Segment("  ", MENTION, target)
        with pytest.raises(ValueError):
            Segment("x", "other", target)

    @settings(max_examples=40, deadline=None)
    @given(st.sampled_from(["athlete", "ATHLETE", "Athlete", "aThLeTe"]),
           st.sampled_from(["saint lucia", "Saint_Lucia", "SAINT LUCIA", "saint_lucia"]))
    def test_matching_insensitive_to_case_and_separators(self, sense_text, mention_text):
        graph = scene_graph()
        segments = [
            Segment(sense_text, SENSE, Iri(WN30_NS + "synset-athlete-noun-1")),
            Segment(mention_text, MENTION, Iri("http://www.wikidata.org/entity/Q760")),
        ]
        linked = match_segments(graph, segments)
        assert len(linked.triples - graph.triples) == 2
