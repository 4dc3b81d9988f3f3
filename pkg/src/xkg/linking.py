"""Standalone text-to-graph matching for entity links and word senses.

Segments are the output shape of external linker/WSD tools (or hand-authored
fixtures): a surface string, a kind (``mention`` or ``sense``), and a target
IRI. Matching is heuristic and conservative: case-insensitive, index suffixes
(``_1``) stripped, underscores and spaces folded; a segment matching several
nodes is skipped and reported rather than guessed.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

from .rdf import (
    FRED_NS,
    OWL_EQUIVALENT_CLASS,
    OWL_SAME_AS,
    RDF_TYPE,
    Iri,
    RdfGraph,
    Triple,
    standard_prefixes,
)
from .translate import individual_match_keys

_INDEX_SUFFIX = re.compile(r"_\d+$")

MENTION = "mention"
SENSE = "sense"


@dataclass(frozen=True)
class Segment:
    text: str
    kind: str  # MENTION or SENSE
    target: Iri

    def __post_init__(self) -> None:
        if not self.text.strip():
            raise ValueError("segment text is empty")
        if self.kind not in (MENTION, SENSE):
            raise ValueError(f"unknown segment kind {self.kind!r}")


@dataclass(frozen=True)
class SegmentReport:
    segment: Segment
    reason: str  # "unmatched" or "ambiguous"
    candidates: tuple[Iri, ...] = ()


def load_segments(path: Union[str, Path]) -> list[Segment]:
    """Load segments from a JSON list of {text, kind, target} objects."""
    prefixes = standard_prefixes()
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    segments = []
    for item in raw:
        target = item["target"]
        iri = prefixes.expand(target) if "://" not in target else Iri(target)
        segments.append(Segment(item["text"], item["kind"], iri))
    return segments


def _fold(text: str) -> str:
    return text.replace("_", " ").strip().lower()


def _class_keys(graph: RdfGraph) -> dict[str, list[Iri]]:
    keys: dict[str, set[Iri]] = {}
    for t in graph.triples:
        if t.predicate == RDF_TYPE and isinstance(t.object, Iri):
            if t.object.value.startswith(FRED_NS):
                keys.setdefault(_fold(t.object.local_name()), set()).add(t.object)
    return {k: sorted(v, key=lambda i: i.value) for k, v in keys.items()}


def match_segments(graph: RdfGraph, segments: list[Segment],
                   diagnostics: Optional[list[SegmentReport]] = None) -> RdfGraph:
    """Link segments into the graph; monotone and idempotent.

    Sense segments matching a class local name add ``owl:equivalentClass``;
    mention segments matching an individual (by label or index-stripped local
    name) add ``owl:sameAs``. Unmatched or ambiguous segments land in
    ``diagnostics`` when a list is supplied.
    """
    class_keys = _class_keys(graph)
    ind_keys = individual_match_keys(graph)
    added: set[Triple] = set()

    for segment in segments:
        folded = _fold(segment.text)
        table = class_keys if segment.kind == SENSE else ind_keys
        candidates = table.get(folded, [])
        if not candidates:
            if diagnostics is not None:
                diagnostics.append(SegmentReport(segment, "unmatched"))
            continue
        if len(candidates) > 1:
            if diagnostics is not None:
                diagnostics.append(SegmentReport(segment, "ambiguous", tuple(candidates)))
            continue
        predicate = OWL_EQUIVALENT_CLASS if segment.kind == SENSE else OWL_SAME_AS
        added.add(Triple(candidates[0], predicate, segment.target))

    return graph.with_triples(added)
