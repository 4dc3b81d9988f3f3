"""Abstract Meaning Representation graphs and their PENMAN notation.

``parse_penman`` turns a single parenthesized PENMAN expression into a rooted
graph; ``serialize_penman`` is its inverse. Re-entrant variables (mentioned
without ``/``) resolve to one node, and inverse ``-of`` roles are normalized
by flipping the edge (``:ARG0-of`` on X->Y becomes ``:ARG0`` on Y->X) unless
normalization is disabled.

Constants (quoted strings, numbers, ``-`` and ``+``) are legal edge targets
and do not create nodes. Unquoted targets are variable references and must be
declared somewhere in the expression. ISI-style alignment markers (``~e.4``)
are stripped with a logged warning; nothing downstream consumes them.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from typing import Optional, Union

logger = logging.getLogger(__name__)

FRAME_CONCEPT = re.compile(r"^(?P<lemma>.+)-(?P<sense>\d{2,3})$")
_VARIABLE = re.compile(r"^[a-zA-Z][a-zA-Z0-9]*$")
_ALIGNMENT = re.compile(r"~(?:[a-z]\.)?\d+(?:,\d+)*")
_NUMBER = re.compile(r"^[+-]?\d+(\.\d+)?$")


class AmrError(Exception):
    """Base class for AMR parsing errors."""


class PenmanSyntaxError(AmrError):
    def __init__(self, position: int, message: str):
        self.position = position
        super().__init__(f"at offset {position}: {message}")


class DuplicateVariableError(AmrError):
    def __init__(self, variable: str):
        self.variable = variable
        super().__init__(f"variable {variable!r} declared more than once")


class DanglingVariableError(AmrError):
    def __init__(self, variable: str):
        self.variable = variable
        super().__init__(f"variable {variable!r} referenced but never declared")


@dataclass(frozen=True)
class AmrConstant:
    """A constant edge target: a quoted string, a number, or '-'/'+'."""

    value: str
    quoted: bool = False

    def __repr__(self) -> str:
        return f"AmrConstant({self.value!r})" if not self.quoted else f"AmrConstant({self.value!r}, quoted)"


@dataclass(frozen=True)
class AmrNode:
    variable: str
    concept: str

    def is_frame(self) -> bool:
        return FRAME_CONCEPT.match(self.concept) is not None


@dataclass(frozen=True)
class AmrEdge:
    source: str
    role: str  # begins with ':'
    target: Union[str, AmrConstant]  # variable name or constant

    def __post_init__(self) -> None:
        if not self.role.startswith(":"):
            raise ValueError(f"role must begin with ':': {self.role!r}")


@dataclass(frozen=True)
class AmrGraph:
    """Rooted AMR graph. ``nodes`` preserves declaration (depth-first) order."""

    root: str
    nodes: tuple[AmrNode, ...]
    edges: tuple[AmrEdge, ...]

    def concept(self, variable: str) -> str:
        for n in self.nodes:
            if n.variable == variable:
                return n.concept
        raise KeyError(variable)

    def variables(self) -> tuple[str, ...]:
        return tuple(n.variable for n in self.nodes)

    def node(self, variable: str) -> AmrNode:
        for n in self.nodes:
            if n.variable == variable:
                return n
        raise KeyError(variable)

    def outgoing(self, variable: str) -> tuple[AmrEdge, ...]:
        return tuple(e for e in self.edges if e.source == variable)


class _Reader:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, char: str) -> None:
        self.skip_ws()
        if self.peek() != char:
            raise PenmanSyntaxError(self.pos, f"expected {char!r}, found {self.peek()!r}")
        self.pos += 1

    def token(self) -> str:
        """Read up to the next whitespace, paren, or slash."""
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos] not in " \t\r\n()/":
            self.pos += 1
        if self.pos == start:
            raise PenmanSyntaxError(start, "expected a token")
        return self.text[start : self.pos]

    def quoted(self) -> str:
        start = self.pos
        self.pos += 1
        out = []
        while self.pos < len(self.text):
            c = self.text[self.pos]
            if c == "\\" and self.pos + 1 < len(self.text):
                out.append(self.text[self.pos + 1])
                self.pos += 2
                continue
            if c == '"':
                self.pos += 1
                return "".join(out)
            out.append(c)
            self.pos += 1
        raise PenmanSyntaxError(start, "unterminated string")


def _strip_alignments(text: str) -> str:
    stripped, count = _ALIGNMENT.subn("", text)
    if count:
        logger.warning("stripped %d alignment marker(s) from PENMAN input", count)
    return stripped


def parse_penman(text: str, normalize_inverse: bool = True) -> AmrGraph:
    """Parse one PENMAN expression into an AmrGraph.

    Raises PenmanSyntaxError, DuplicateVariableError, or
    DanglingVariableError.
    """
    reader = _Reader(_strip_alignments(text))
    nodes: list[AmrNode] = []
    declared: dict[str, str] = {}
    edges: list[AmrEdge] = []
    referenced: list[tuple[str, int]] = []

    def parse_node() -> str:
        reader.expect("(")
        var = reader.token()
        if not _VARIABLE.match(var):
            raise PenmanSyntaxError(reader.pos, f"bad variable name {var!r}")
        reader.skip_ws()
        if reader.peek() != "/":
            raise PenmanSyntaxError(reader.pos, f"expected '/' after variable {var!r}")
        reader.pos += 1
        concept = reader.token()
        if var in declared:
            raise DuplicateVariableError(var)
        declared[var] = concept
        nodes.append(AmrNode(var, concept))

        while True:
            reader.skip_ws()
            c = reader.peek()
            if c == ")":
                reader.pos += 1
                return var
            if c == "":
                raise PenmanSyntaxError(reader.pos, "unexpected end of input")
            role = reader.token()
            if not role.startswith(":"):
                raise PenmanSyntaxError(reader.pos, f"expected a :role, found {role!r}")
            reader.skip_ws()
            c = reader.peek()
            if c == "(":
                target: Union[str, AmrConstant] = parse_node()
            elif c == '"':
                target = AmrConstant(reader.quoted(), quoted=True)
            else:
                word = reader.token()
                if _NUMBER.match(word) or word in ("-", "+"):
                    target = AmrConstant(word)
                else:
                    target = word
                    referenced.append((word, reader.pos))
            edge = AmrEdge(var, role, target)
            if edge not in edges:
                edges.append(edge)

    reader.skip_ws()
    root = parse_node()
    reader.skip_ws()
    if reader.pos < len(reader.text):
        raise PenmanSyntaxError(reader.pos, "trailing content after the expression")

    for var, _pos in referenced:
        if var not in declared:
            raise DanglingVariableError(var)

    if normalize_inverse:
        edges = [_invert(e) for e in edges]
        deduped: list[AmrEdge] = []
        for e in edges:
            if e not in deduped:
                deduped.append(e)
        edges = deduped

    return AmrGraph(root, tuple(nodes), tuple(edges))


def _invert(edge: AmrEdge) -> AmrEdge:
    if edge.role.endswith("-of") and isinstance(edge.target, str):
        return AmrEdge(edge.target, edge.role[: -len("-of")], edge.source)
    return edge


def normalize_inverse_roles(graph: AmrGraph) -> AmrGraph:
    """Flip every ``-of`` edge between nodes. Applying this twice equals once."""
    edges: list[AmrEdge] = []
    for e in graph.edges:
        inv = _invert(e)
        if inv not in edges:
            edges.append(inv)
    return AmrGraph(graph.root, graph.nodes, tuple(edges))


def serialize_penman(graph: AmrGraph) -> str:
    """Render an AmrGraph in PENMAN notation.

    Each node is declared exactly once, at its first reachable position in a
    depth-first walk from the root; edges that would revisit a declared node
    print the bare variable, and edges only traversable against their
    direction print with an ``-of`` role.
    """
    declared: set[str] = set()
    printed: set[int] = set()  # indexes into graph.edges
    concepts = {n.variable: n.concept for n in graph.nodes}

    incident: dict[str, list[int]] = {v: [] for v in concepts}
    for idx, e in enumerate(graph.edges):
        incident[e.source].append(idx)
        if isinstance(e.target, str):
            incident[e.target].append(idx)

    def render_constant(c: AmrConstant) -> str:
        if c.quoted:
            escaped = c.value.replace("\\", "\\\\").replace('"', '\\"')
            return f'"{escaped}"'
        return c.value

    def render(var: str) -> str:
        declared.add(var)
        parts = [f"({var} / {concepts[var]}"]
        for idx in incident[var]:
            if idx in printed:
                continue
            e = graph.edges[idx]
            if e.source == var:
                role, other = e.role, e.target
            else:
                role, other = e.role + "-of", e.source
            printed.add(idx)
            if isinstance(other, AmrConstant):
                parts.append(f"{role} {render_constant(other)}")
            elif other in declared:
                parts.append(f"{role} {other}")
            else:
                parts.append(f"{role} {render(other)}")
        return " ".join(parts) + ")"

    out = render(graph.root)
    unreachable = set(concepts) - declared
    if unreachable:
        raise AmrError(f"nodes unreachable from root: {sorted(unreachable)}")
    return out


def amr_equal(g1: AmrGraph, g2: AmrGraph) -> bool:
    """Same root, node set, and edge set (edge order ignored)."""
    return (
        g1.root == g2.root
        and set(g1.nodes) == set(g2.nodes)
        and set(g1.edges) == set(g2.edges)
    )


def amr_isomorphic(g1: AmrGraph, g2: AmrGraph) -> bool:
    """Equality up to a bijective renaming of variables."""
    if len(g1.nodes) != len(g2.nodes) or len(g1.edges) != len(g2.edges):
        return False

    def profile(g: AmrGraph, var: str) -> tuple:
        out = sorted((e.role, "*" if isinstance(e.target, str) else repr(e.target))
                     for e in g.edges if e.source == var)
        inc = sorted(e.role for e in g.edges if e.target == var)
        return (g.concept(var), tuple(out), tuple(inc), var == g.root)

    vars1 = [n.variable for n in g1.nodes]
    vars2 = [n.variable for n in g2.nodes]
    prof2 = {v: profile(g2, v) for v in vars2}
    candidates = {v: [w for w in vars2 if prof2[w] == profile(g1, v)] for v in vars1}
    order = sorted(vars1, key=lambda v: len(candidates[v]))

    edges2 = set(g2.edges)

    def rename(e: AmrEdge, mapping: dict[str, str]) -> Optional[AmrEdge]:
        target = e.target if isinstance(e.target, AmrConstant) else mapping.get(e.target)
        source = mapping.get(e.source)
        if source is None or target is None:
            return None
        return AmrEdge(source, e.role, target)

    def backtrack(idx: int, mapping: dict[str, str], used: set[str]) -> bool:
        if idx == len(order):
            if mapping[g1.root] != g2.root:
                return False
            return {rename(e, mapping) for e in g1.edges} == edges2
        v = order[idx]
        for w in candidates[v]:
            if w in used:
                continue
            mapping[v] = w
            used.add(w)
            if backtrack(idx + 1, mapping, used):
                return True
            del mapping[v]
            used.discard(w)
        return False

    return backtrack(0, {}, set())


def parse_penman_file(text: str, normalize_inverse: bool = True) -> list[AmrGraph]:
    """Parse a PENMAN file: '#'-comment lines separate or annotate graphs."""
    graphs: list[AmrGraph] = []
    chunk: list[str] = []

    def flush() -> None:
        block = "\n".join(chunk).strip()
        if block:
            graphs.append(parse_penman(block, normalize_inverse=normalize_inverse))
        chunk.clear()

    depth = 0
    for line in text.splitlines():
        if line.lstrip().startswith("#"):
            if depth == 0:
                flush()
            continue
        depth += line.count("(") - line.count(")")
        chunk.append(line)
        if depth == 0 and any(s.strip() for s in chunk):
            flush()
    flush()
    return graphs
