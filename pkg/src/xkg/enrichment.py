"""Orchestration of the 11 knowledge-enrichment heuristics.

Each heuristic turns the base graph into a prompt (its template plus the
graph's Turtle text), sends it to a completion backend, extracts the Turtle
from the response, and validates the additions: anchoring to base nodes and
the pitfall lints. The per-heuristic result is an extended graph (base plus
additions) with diagnostics; ``run_all`` merges everything into one graph,
quarantining any heuristic whose result carries an ERROR diagnostic unless
``force_merge`` is set.

Templates are data, not code: plain text files with a ``{{graph}}``
placeholder, shipped under the package resources and freely editable.
"""

from __future__ import annotations

import logging
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

from . import validation
from .backends import Backend, BackendError
from .rdf import (
    PrefixTable,
    RdfGraph,
    RdfError,
    Triple,
    merge,
    parse_turtle,
    serialize_turtle,
)
from .validation import Diagnostic, check_anchoring, has_errors, lint

logger = logging.getLogger(__name__)

GRAPH_PLACEHOLDER = "{{graph}}"
SYSTEM_TEMPLATE = "system.txt"

XKG_NS_BASE = "https://w3id.org/xkg/"


class EnrichmentError(Exception):
    """Base class for enrichment failures."""


class MissingTemplateError(EnrichmentError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"prompt template not found: {name}")


class MissingPlaceholderError(EnrichmentError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"template {name} has no {GRAPH_PLACEHOLDER} placeholder")


class NoTurtleFoundError(EnrichmentError):
    def __init__(self) -> None:
        super().__init__("no Turtle content found in the response")


@dataclass(frozen=True)
class HeuristicSpec:
    """One enrichment heuristic: its name, namespace for new terms, template."""

    name: str
    prefix: str
    namespace: str
    prompt_template: str


HEURISTICS: tuple[HeuristicSpec, ...] = (
    HeuristicSpec("Presuppositions", "presup", XKG_NS_BASE + "presupposition#",
                  "presuppositions.txt"),
    HeuristicSpec("ConversationalImplicatures", "implic", XKG_NS_BASE + "implicature#",
                  "conversational-implicatures.txt"),
    HeuristicSpec("FactualImpact", "impact", XKG_NS_BASE + "impact#",
                  "factual-impact.txt"),
    HeuristicSpec("ImageSchemas", "imgschema", XKG_NS_BASE + "image-schema#",
                  "image-schemas.txt"),
    HeuristicSpec("MetonymicCoercion", "meton", XKG_NS_BASE + "metonymy#",
                  "metonymic-coercion.txt"),
    HeuristicSpec("MoralValueCoercion", "moral", XKG_NS_BASE + "moral-value#",
                  "moral-value-coercion.txt"),
    HeuristicSpec("SymbolicCoercion", "symbol", XKG_NS_BASE + "symbolism#",
                  "symbolic-coercion.txt"),
    HeuristicSpec("EventSequences", "seq", XKG_NS_BASE + "event-sequence#",
                  "event-sequences.txt"),
    HeuristicSpec("CausalRelations", "cause", XKG_NS_BASE + "causality#",
                  "causal-relations.txt"),
    HeuristicSpec("ImpliedFutureEvents", "future", XKG_NS_BASE + "future-event#",
                  "implied-future-events.txt"),
    HeuristicSpec("PotentialNonEvents", "nonevent", XKG_NS_BASE + "non-event#",
                  "potential-non-events.txt"),
)

HEURISTIC_BY_NAME = {spec.name: spec for spec in HEURISTICS}


def heuristic_prefixes() -> PrefixTable:
    table = PrefixTable()
    for spec in HEURISTICS:
        table = table.with_binding(spec.prefix, spec.namespace)
    return table


@dataclass(frozen=True)
class PromptRequest:
    system_text: str
    user_text: str
    max_tokens: int
    temperature: float
    tag: Optional[str] = None  # heuristic name, used by mock backends

    def __post_init__(self) -> None:
        if self.max_tokens <= 0:
            raise ValueError("max_tokens must be positive")
        if self.temperature < 0:
            raise ValueError("temperature must be non-negative")


@dataclass
class EnrichmentResult:
    heuristic: str
    added: frozenset[Triple]
    xkg: RdfGraph
    diagnostics: list[Diagnostic]
    raw_response: str

    @property
    def failed(self) -> bool:
        return has_errors(self.diagnostics)


def assemble_prompt(base: RdfGraph, spec: HeuristicSpec,
                    prompts_dir: Union[str, Path],
                    max_tokens: int = 2048,
                    temperature: float = 0.0) -> PromptRequest:
    """Substitute the base graph's Turtle into the heuristic's template.

    Deterministic: the same base graph and template produce a byte-identical
    request. Raises MissingTemplateError / MissingPlaceholderError.
    """
    prompts_dir = Path(prompts_dir)
    system_path = prompts_dir / SYSTEM_TEMPLATE
    template_path = prompts_dir / spec.prompt_template
    if not system_path.exists():
        raise MissingTemplateError(SYSTEM_TEMPLATE)
    if not template_path.exists():
        raise MissingTemplateError(spec.prompt_template)
    template = template_path.read_text(encoding="utf-8")
    if GRAPH_PLACEHOLDER not in template:
        raise MissingPlaceholderError(spec.prompt_template)
    system_text = system_path.read_text(encoding="utf-8")
    system_text = system_text.replace("{{namespace}}", spec.namespace)
    system_text = system_text.replace("{{prefix}}", spec.prefix)
    user_text = template.replace(GRAPH_PLACEHOLDER, serialize_turtle(base))
    return PromptRequest(system_text, user_text, max_tokens, temperature, tag=spec.name)


_FENCE = re.compile(r"```(?:turtle|ttl)?\s*\n(.*?)```", re.DOTALL)
#: A line that plausibly starts or continues a Turtle statement.
_TURTLEISH = re.compile(
    r"^\s*(@prefix\b|#|<[^>]*>|_:\w|\[|[A-Za-z][\w.\-]*:|:\S|\.\s*$)")


def _strip_prose(text: str) -> str:
    """One repair pass: drop lines that do not look like Turtle."""
    kept = []
    for line in text.splitlines():
        if not line.strip():
            kept.append(line)
            continue
        if _TURTLEISH.match(line) and not line.rstrip().endswith(":"):
            kept.append(line)
    return "\n".join(kept)


def extract_turtle(response: str, base_prefixes: PrefixTable) -> RdfGraph:
    """Parse the Turtle content of a model response.

    Fenced blocks win over bare text; one repair pass strips prose lines from
    unparseable input; prefixes used without declaration are bound under a
    placeholder namespace that lint reports as UNDECLARED_PREFIX. Raises
    NoTurtleFoundError when nothing statement-like remains, or RdfError when
    candidate Turtle still fails to parse after the repair pass.
    """
    fenced = _FENCE.findall(response)
    candidate = "\n".join(fenced) if fenced else response
    if not any(line.strip() and not line.lstrip().startswith("#")
               for line in candidate.splitlines()):
        raise NoTurtleFoundError()
    try:
        return parse_turtle(candidate, base_prefixes, bind_undeclared=True)
    except RdfError:
        repaired = _strip_prose(candidate)
        if not any(line.strip() and not line.lstrip().startswith("#")
                   for line in repaired.splitlines()):
            raise NoTurtleFoundError()
        return parse_turtle(repaired, base_prefixes, bind_undeclared=True)


def run_heuristic(base: RdfGraph, spec: HeuristicSpec, backend: Backend,
                  prompts_dir: Union[str, Path],
                  max_tokens: int = 2048,
                  temperature: float = 0.0) -> EnrichmentResult:
    """Prompt, complete, extract, and validate one heuristic.

    Failures never propagate: a backend or parse failure yields a result
    with no additions and a RESPONSE_INVALID error diagnostic.
    """
    if not base.triples:
        raise EnrichmentError("base graph is empty")
    prefixes = base.prefixes.with_binding(spec.prefix, spec.namespace)
    request = assemble_prompt(base, spec, prompts_dir, max_tokens, temperature)
    try:
        response = backend.complete(request)
    except BackendError as exc:
        logger.warning("%s: backend failure: %s", spec.name, exc)
        return EnrichmentResult(
            spec.name, frozenset(), RdfGraph(base.triples, prefixes),
            [Diagnostic(validation.ERROR, validation.RESPONSE_INVALID,
                        f"backend failure: {exc}")],
            "",
        )
    try:
        extracted = extract_turtle(response, prefixes)
    except (EnrichmentError, RdfError) as exc:
        logger.warning("%s: unusable response: %s", spec.name, exc)
        return EnrichmentResult(
            spec.name, frozenset(), RdfGraph(base.triples, prefixes),
            [Diagnostic(validation.ERROR, validation.RESPONSE_INVALID,
                        f"unusable response: {exc}")],
            response,
        )

    added = extracted.triples - base.triples
    prefixes = prefixes.merged(extracted.prefixes)
    diagnostics = list(check_anchoring(base, added))
    diagnostics.extend(lint(RdfGraph(added, prefixes)))
    xkg = RdfGraph(base.triples | added, prefixes)
    return EnrichmentResult(spec.name, added, xkg, diagnostics, response)


def run_all(base: RdfGraph, backend: Backend,
            prompts_dir: Union[str, Path],
            heuristics: Optional[Sequence[HeuristicSpec]] = None,
            max_tokens: int = 2048,
            temperature: float = 0.0,
            max_concurrent: int = 1,
            force_merge: bool = False) -> tuple[list[EnrichmentResult], RdfGraph]:
    """Run every heuristic and merge the additions onto the base.

    Results come back in registry order regardless of completion order, so
    output is deterministic even with concurrent backend calls. A result
    carrying an ERROR diagnostic contributes nothing to the merged graph
    unless ``force_merge`` reproduces the merge-everything behavior.
    """
    specs = list(heuristics) if heuristics is not None else list(HEURISTICS)

    def run_one(spec: HeuristicSpec) -> EnrichmentResult:
        return run_heuristic(base, spec, backend, prompts_dir, max_tokens, temperature)

    if max_concurrent > 1 and len(specs) > 1:
        with ThreadPoolExecutor(max_workers=max_concurrent) as pool:
            results = list(pool.map(run_one, specs))
    else:
        results = [run_one(spec) for spec in specs]

    mergeable = [r for r in results if force_merge or not r.failed]
    merged = merge([RdfGraph(base.triples, base.prefixes)]
                   + [RdfGraph(r.added, r.xkg.prefixes) for r in mergeable])
    return results, merged
