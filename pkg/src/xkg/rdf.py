"""RDF data model and a deterministic Turtle subset parser/serializer.

The graph model is deliberately small: IRIs, literals, blank nodes, triples
with set semantics, and a prefix table. The Turtle dialect covers what the
pipeline's artifacts actually use: prefix declarations, ``a``, predicate and
object lists (``;`` / ``,``), blank nodes (``[]`` and ``_:label``), plain,
language-tagged and datatyped literals, booleans, integers and decimals.
Collections ``( )`` and named graphs are not supported.

Serialization is fully deterministic (subjects sorted by expanded IRI, then
predicates, then objects) so that golden-file tests are byte-stable.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Optional, Union

# Namespaces used across the pipeline. Framester/OntologyDesignPatterns IRIs
# are the public ones these prefixes conventionally denote.
FRED_NS = "http://www.ontologydesignpatterns.org/ont/fred/domain.owl#"
DUL_NS = "http://www.ontologydesignpatterns.org/ont/dul/DUL.owl#"
D0_NS = "http://www.ontologydesignpatterns.org/ont/d0.owl#"
VN_ROLE_NS = "http://www.ontologydesignpatterns.org/ont/vn/abox/role/vnrole.owl#"
PBRS_NS = "https://w3id.org/framester/data/propbank-3.4.0/RoleSet/"
PBLR_NS = "https://w3id.org/framester/data/propbank-3.4.0/LocalRole/"
WN30_NS = "https://w3id.org/framester/wn/wn30/instances/"
OWL_NS = "http://www.w3.org/2002/07/owl#"
RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS_NS = "http://www.w3.org/2000/01/rdf-schema#"
XSD_NS = "http://www.w3.org/2001/XMLSchema#"
WIKIDATA_NS = "http://www.wikidata.org/entity/"

#: Namespace bound to prefixes that a response used without declaring them.
UNDECLARED_NS_BASE = "http://example.org/undeclared/"

STANDARD_NAMESPACES: dict[str, str] = {
    "fred": FRED_NS,
    "pbrs": PBRS_NS,
    "pblr": PBLR_NS,
    "vn.role": VN_ROLE_NS,
    "wn30": WN30_NS,
    "dul": DUL_NS,
    "d0": D0_NS,
    "owl": OWL_NS,
    "rdf": RDF_NS,
    "rdfs": RDFS_NS,
    "xsd": XSD_NS,
    "wd": WIKIDATA_NS,
}

_IRI_FORBIDDEN = re.compile(r"[\s<>\"{}|\\^`]")


class RdfError(Exception):
    """Base class for errors raised by this module."""


class TurtleSyntaxError(RdfError):
    """Malformed Turtle input."""

    def __init__(self, line: int, column: int, message: str):
        self.line = line
        self.column = column
        self.message = message
        super().__init__(f"line {line}, column {column}: {message}")


class UndeclaredPrefixError(RdfError):
    """A qualified name used a prefix label with no declaration."""

    def __init__(self, label: str, line: int = 0, column: int = 0):
        self.label = label
        self.line = line
        self.column = column
        super().__init__(f"undeclared prefix '{label}:'")


class PrefixConflictError(RdfError):
    """One prefix label maps to two different namespaces."""

    def __init__(self, label: str, iri1: str, iri2: str):
        self.label = label
        self.iri1 = iri1
        self.iri2 = iri2
        super().__init__(f"prefix '{label}:' bound to both <{iri1}> and <{iri2}>")


@dataclass(frozen=True)
class Iri:
    """An absolute IRI."""

    value: str

    def __post_init__(self) -> None:
        if not self.value or ":" not in self.value:
            raise ValueError(f"not an absolute IRI: {self.value!r}")
        if _IRI_FORBIDDEN.search(self.value):
            raise ValueError(f"forbidden character in IRI: {self.value!r}")

    def local_name(self) -> str:
        """Everything after the last '#' or '/' (the conventional local part)."""
        cut = max(self.value.rfind("#"), self.value.rfind("/"))
        return self.value[cut + 1 :]

    def namespace(self) -> str:
        cut = max(self.value.rfind("#"), self.value.rfind("/"))
        return self.value[: cut + 1]

    def __repr__(self) -> str:
        return f"Iri({self.value!r})"


XSD_BOOLEAN = Iri(XSD_NS + "boolean")
XSD_INTEGER = Iri(XSD_NS + "integer")
XSD_DECIMAL = Iri(XSD_NS + "decimal")
XSD_STRING = Iri(XSD_NS + "string")

RDF_TYPE = Iri(RDF_NS + "type")
RDFS_LABEL = Iri(RDFS_NS + "label")
RDFS_COMMENT = Iri(RDFS_NS + "comment")
RDFS_SUBCLASSOF = Iri(RDFS_NS + "subClassOf")
OWL_CLASS = Iri(OWL_NS + "Class")
OWL_OBJECT_PROPERTY = Iri(OWL_NS + "ObjectProperty")
OWL_DATATYPE_PROPERTY = Iri(OWL_NS + "DatatypeProperty")
OWL_NAMED_INDIVIDUAL = Iri(OWL_NS + "NamedIndividual")
OWL_ANNOTATION_PROPERTY = Iri(OWL_NS + "AnnotationProperty")
OWL_ONTOLOGY = Iri(OWL_NS + "Ontology")
OWL_EQUIVALENT_CLASS = Iri(OWL_NS + "equivalentClass")
OWL_SAME_AS = Iri(OWL_NS + "sameAs")
OWL_DISJOINT_WITH = Iri(OWL_NS + "disjointWith")
DUL_ASSOCIATED_WITH = Iri(DUL_NS + "associatedWith")
DUL_HAS_QUALITY = Iri(DUL_NS + "hasQuality")
DUL_PRECEDES = Iri(DUL_NS + "precedes")


@dataclass(frozen=True)
class Literal:
    """An RDF literal. ``datatype`` and ``language`` are mutually exclusive."""

    lexical: str
    datatype: Optional[Iri] = None
    language: Optional[str] = None

    def __post_init__(self) -> None:
        if self.datatype is not None and self.language is not None:
            raise ValueError("literal cannot have both a datatype and a language tag")
        if self.datatype == XSD_BOOLEAN:
            lowered = self.lexical.lower()
            if lowered not in ("true", "false"):
                raise ValueError(f"bad boolean lexical form: {self.lexical!r}")
            object.__setattr__(self, "lexical", lowered)

    def __repr__(self) -> str:
        if self.language:
            return f"Literal({self.lexical!r}@{self.language})"
        if self.datatype:
            return f"Literal({self.lexical!r}^^{self.datatype.value})"
        return f"Literal({self.lexical!r})"


@dataclass(frozen=True)
class BlankNode:
    """A blank node with a parse-scope label."""

    label: str

    def __repr__(self) -> str:
        return f"BlankNode(_:{self.label})"


Term = Union[Iri, Literal, BlankNode]

TRUE = Literal("true", XSD_BOOLEAN)
FALSE = Literal("false", XSD_BOOLEAN)


@dataclass(frozen=True)
class Triple:
    subject: Union[Iri, BlankNode]
    predicate: Iri
    object: Term

    def __post_init__(self) -> None:
        if isinstance(self.subject, Literal):
            raise ValueError("triple subject cannot be a literal")
        if not isinstance(self.predicate, Iri):
            raise ValueError("triple predicate must be an IRI")

    def __iter__(self) -> Iterator[Term]:
        return iter((self.subject, self.predicate, self.object))


def _term_sort_key(term: Term) -> tuple:
    if isinstance(term, Iri):
        return (0, term.value, "", "")
    if isinstance(term, BlankNode):
        return (1, term.label, "", "")
    return (2, term.lexical, term.datatype.value if term.datatype else "", term.language or "")


def triple_sort_key(t: Triple) -> tuple:
    return (_term_sort_key(t.subject), t.predicate.value, _term_sort_key(t.object))


class PrefixTable:
    """Bidirectional prefix-label <-> namespace mapping.

    Labels are injective: a label maps to one namespace and, to keep
    expansion/contraction a round trip, a namespace maps to one label.
    """

    def __init__(self, mapping: Optional[Mapping[str, str]] = None):
        self._by_label: dict[str, str] = {}
        self._by_ns: dict[str, str] = {}
        if mapping:
            for label, ns in mapping.items():
                self._bind(label, ns)

    def _bind(self, label: str, ns: str) -> None:
        existing = self._by_label.get(label)
        if existing is not None and existing != ns:
            raise PrefixConflictError(label, existing, ns)
        if existing == ns:
            return
        if ns in self._by_ns:
            # Same namespace under a second label would make contraction
            # ambiguous; keep the first binding.
            return
        self._by_label[label] = ns
        self._by_ns[ns] = label

    def with_binding(self, label: str, ns: str) -> "PrefixTable":
        merged = PrefixTable(self._by_label)
        merged._bind(label, ns)
        return merged

    def merged(self, other: "PrefixTable") -> "PrefixTable":
        out = PrefixTable(self._by_label)
        for label, ns in other.items():
            out._bind(label, ns)
        return out

    def namespace(self, label: str) -> Optional[str]:
        return self._by_label.get(label)

    def expand(self, curie: str) -> Iri:
        label, _, local = curie.partition(":")
        ns = self._by_label.get(label)
        if ns is None:
            raise UndeclaredPrefixError(label)
        return Iri(ns + local)

    def contract(self, iri: Iri) -> Optional[str]:
        """Return the shortest CURIE for ``iri``, or None if no prefix matches."""
        best: Optional[tuple[str, str]] = None
        for ns, label in self._by_ns.items():
            if iri.value.startswith(ns) and (best is None or len(ns) > len(best[1])):
                local = iri.value[len(ns) :]
                if _PN_LOCAL_OK.fullmatch(local):
                    best = (label, ns)
        if best is None:
            return None
        return f"{best[0]}:{iri.value[len(best[1]):]}"

    def items(self) -> Iterable[tuple[str, str]]:
        return self._by_label.items()

    def labels(self) -> Iterable[str]:
        return self._by_label.keys()

    def __contains__(self, label: str) -> bool:
        return label in self._by_label

    def __len__(self) -> int:
        return len(self._by_label)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PrefixTable) and self._by_label == other._by_label

    def __repr__(self) -> str:
        return f"PrefixTable({self._by_label!r})"


def standard_prefixes() -> PrefixTable:
    return PrefixTable(STANDARD_NAMESPACES)


# Local parts we are willing to contract: empty or name-ish with inner dots.
_PN_LOCAL_OK = re.compile(r"|[A-Za-z0-9_](?:[A-Za-z0-9_.\-]*[A-Za-z0-9_\-])?")


@dataclass(frozen=True)
class RdfGraph:
    """An immutable set of triples plus the prefix table used to render it."""

    triples: frozenset[Triple] = frozenset()
    prefixes: PrefixTable = field(default_factory=standard_prefixes)

    @staticmethod
    def of(triples: Iterable[Triple], prefixes: Optional[PrefixTable] = None) -> "RdfGraph":
        return RdfGraph(frozenset(triples), prefixes or standard_prefixes())

    def __len__(self) -> int:
        return len(self.triples)

    def __contains__(self, triple: Triple) -> bool:
        return triple in self.triples

    def __iter__(self) -> Iterator[Triple]:
        return iter(sorted(self.triples, key=triple_sort_key))

    def with_triples(self, extra: Iterable[Triple]) -> "RdfGraph":
        return RdfGraph(self.triples | frozenset(extra), self.prefixes)

    def subjects(self, predicate: Optional[Iri] = None, obj: Optional[Term] = None):
        for t in self.triples:
            if predicate is not None and t.predicate != predicate:
                continue
            if obj is not None and t.object != obj:
                continue
            yield t.subject

    def objects(self, subject: Optional[Term] = None, predicate: Optional[Iri] = None):
        for t in self.triples:
            if subject is not None and t.subject != subject:
                continue
            if predicate is not None and t.predicate != predicate:
                continue
            yield t.object

    def node_iris(self) -> frozenset[Iri]:
        """IRIs occurring in a node position (subject or object)."""
        out = set()
        for t in self.triples:
            if isinstance(t.subject, Iri):
                out.add(t.subject)
            if isinstance(t.object, Iri):
                out.add(t.object)
        return frozenset(out)

    def all_iris(self) -> frozenset[Iri]:
        out = set()
        for t in self.triples:
            if isinstance(t.subject, Iri):
                out.add(t.subject)
            out.add(t.predicate)
            if isinstance(t.object, Iri):
                out.add(t.object)
        return frozenset(out)


def merge(graphs: Iterable[RdfGraph]) -> RdfGraph:
    """Union of triple sets and prefix tables.

    Raises PrefixConflictError when one label maps to two namespaces.
    """
    triples: set[Triple] = set()
    prefixes = PrefixTable()
    for g in graphs:
        triples |= g.triples
        prefixes = prefixes.merged(g.prefixes)
    return RdfGraph(frozenset(triples), prefixes)


def diff(after: RdfGraph, before: RdfGraph) -> frozenset[Triple]:
    """Triples present in ``after`` but absent from ``before``."""
    return after.triples - before.triples


# ---------------------------------------------------------------------------
# Turtle tokenizer
# ---------------------------------------------------------------------------

_NAME_CHARS = re.compile(r"[A-Za-z0-9_.\-]")
_NUMBER = re.compile(r"[+-]?[0-9]+(\.[0-9]+)?")
_LANG_TAG = re.compile(r"[a-zA-Z]+(-[a-zA-Z0-9]+)*")


@dataclass
class _Token:
    kind: str  # IRIREF PNAME BLANK STRING NUMBER KEYWORD PUNCT EOF
    value: str
    line: int
    column: int


class _Tokenizer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1

    def _error(self, message: str) -> TurtleSyntaxError:
        return TurtleSyntaxError(self.line, self.col, message)

    def _advance(self, n: int = 1) -> None:
        for _ in range(n):
            if self.pos < len(self.text) and self.text[self.pos] == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
            self.pos += 1

    def _peek(self, offset: int = 0) -> str:
        i = self.pos + offset
        return self.text[i] if i < len(self.text) else ""

    def tokens(self) -> list[_Token]:
        out: list[_Token] = []
        while True:
            tok = self._next()
            out.append(tok)
            if tok.kind == "EOF":
                return out

    def _next(self) -> _Token:
        text = self.text
        while self.pos < len(text):
            c = text[self.pos]
            if c.isspace():
                self._advance()
                continue
            if c == "#":
                while self.pos < len(text) and text[self.pos] != "\n":
                    self._advance()
                continue
            break
        if self.pos >= len(text):
            return _Token("EOF", "", self.line, self.col)

        line, col = self.line, self.col
        c = text[self.pos]

        if c == "<":
            self._advance()
            start = self.pos
            while self.pos < len(text) and text[self.pos] != ">":
                if text[self.pos] in "\n <":
                    raise TurtleSyntaxError(line, col, "unterminated IRI reference")
                self._advance()
            if self.pos >= len(text):
                raise TurtleSyntaxError(line, col, "unterminated IRI reference")
            value = text[start : self.pos]
            self._advance()
            return _Token("IRIREF", value, line, col)

        if c == '"':
            return self._string(line, col)

        if c in ";,.[]":
            self._advance()
            return _Token("PUNCT", c, line, col)

        if c == "^" and self._peek(1) == "^":
            self._advance(2)
            return _Token("PUNCT", "^^", line, col)

        if c == "@":
            self._advance()
            start = self.pos
            while self.pos < len(text) and (text[self.pos].isalnum() or text[self.pos] == "-"):
                self._advance()
            word = text[start : self.pos]
            if word == "prefix":
                return _Token("KEYWORD", "@prefix", line, col)
            if _LANG_TAG.fullmatch(word):
                return _Token("LANG", word, line, col)
            raise TurtleSyntaxError(line, col, f"unexpected @{word}")

        if c == "_" and self._peek(1) == ":":
            self._advance(2)
            start = self.pos
            while self.pos < len(text) and _NAME_CHARS.match(text[self.pos]):
                self._advance()
            return _Token("BLANK", text[start : self.pos], line, col)

        m = _NUMBER.match(text, self.pos)
        if m and (c.isdigit() or (c in "+-" and self._peek(1).isdigit())):
            end = m.end()
            if end >= len(text) or not _NAME_CHARS.match(text[end]) or text[end] == ".":
                value = m.group(0)
                # A trailing dot belongs to the statement, not the number.
                self._advance(end - self.pos)
                return _Token("NUMBER", value, line, col)

        if _NAME_CHARS.match(c) or c == ":":
            start = self.pos
            while self.pos < len(text) and (_NAME_CHARS.match(text[self.pos]) or text[self.pos] == ":"):
                self._advance()
            word = text[start : self.pos]
            # Trailing dots terminate statements; inner dots stay in the name.
            stripped = word.rstrip(".")
            trailing = len(word) - len(stripped)
            if trailing:
                self.pos -= trailing
                self.col -= trailing
                word = stripped
            if not word:
                raise TurtleSyntaxError(line, col, "unexpected '.'")
            if ":" in word:
                return _Token("PNAME", word, line, col)
            if word == "a":
                return _Token("KEYWORD", "a", line, col)
            if word in ("true", "false"):
                return _Token("BOOLEAN", word, line, col)
            raise TurtleSyntaxError(line, col, f"unexpected token {word!r}")

        raise TurtleSyntaxError(line, col, f"unexpected character {c!r}")

    def _string(self, line: int, col: int) -> _Token:
        text = self.text
        self._advance()  # opening quote
        out: list[str] = []
        while True:
            if self.pos >= len(text):
                raise TurtleSyntaxError(line, col, "unterminated string literal")
            c = text[self.pos]
            if c == '"':
                self._advance()
                return _Token("STRING", "".join(out), line, col)
            if c == "\\":
                esc = self._peek(1)
                mapping = {"t": "\t", "n": "\n", "r": "\r", '"': '"', "\\": "\\"}
                if esc in mapping:
                    out.append(mapping[esc])
                    self._advance(2)
                    continue
                if esc == "u":
                    hexpart = text[self.pos + 2 : self.pos + 6]
                    if len(hexpart) != 4:
                        raise TurtleSyntaxError(self.line, self.col, "bad \\u escape")
                    out.append(chr(int(hexpart, 16)))
                    self._advance(6)
                    continue
                raise TurtleSyntaxError(self.line, self.col, f"unknown escape \\{esc}")
            if c == "\n":
                raise TurtleSyntaxError(line, col, "newline in string literal")
            out.append(c)
            self._advance()


# ---------------------------------------------------------------------------
# Turtle parser
# ---------------------------------------------------------------------------


class _Parser:
    def __init__(self, tokens: list[_Token], base_prefixes: Optional[PrefixTable],
                 bind_undeclared: bool):
        self.tokens = tokens
        self.i = 0
        self.prefixes = base_prefixes or PrefixTable()
        self.declared: set[str] = set()
        self.bind_undeclared = bind_undeclared
        self.triples: list[Triple] = []
        self.blank_counter = 0
        # Labels the document uses itself; generated labels must avoid them.
        self.document_labels = {t.value for t in tokens if t.kind == "BLANK"}

    def _peek(self) -> _Token:
        return self.tokens[self.i]

    def _take(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def _expect_punct(self, value: str) -> _Token:
        tok = self._take()
        if tok.kind != "PUNCT" or tok.value != value:
            raise TurtleSyntaxError(tok.line, tok.column, f"expected {value!r}, found {tok.value!r}")
        return tok

    def _fresh_blank(self) -> BlankNode:
        while True:
            self.blank_counter += 1
            label = f"b{self.blank_counter}"
            if label not in self.document_labels:
                return BlankNode(label)

    def parse(self) -> tuple[list[Triple], PrefixTable]:
        while self._peek().kind != "EOF":
            tok = self._peek()
            if tok.kind == "KEYWORD" and tok.value == "@prefix":
                self._prefix_decl()
            else:
                self._statement()
        return self.triples, self.prefixes

    def _prefix_decl(self) -> None:
        self._take()
        tok = self._take()
        if tok.kind != "PNAME" or not tok.value.endswith(":"):
            raise TurtleSyntaxError(tok.line, tok.column, "expected prefix label in @prefix")
        label = tok.value[:-1]
        iri_tok = self._take()
        if iri_tok.kind != "IRIREF":
            raise TurtleSyntaxError(iri_tok.line, iri_tok.column, "expected <IRI> in @prefix")
        self._expect_punct(".")
        self.prefixes = self.prefixes.with_binding(label, iri_tok.value)
        self.declared.add(label)

    def _resolve_pname(self, tok: _Token) -> Iri:
        label, _, local = tok.value.partition(":")
        ns = self.prefixes.namespace(label)
        if ns is None:
            if not self.bind_undeclared:
                raise UndeclaredPrefixError(label, tok.line, tok.column)
            ns = UNDECLARED_NS_BASE + label + "#"
            self.prefixes = self.prefixes.with_binding(label, ns)
        try:
            return Iri(ns + local)
        except ValueError as exc:
            raise TurtleSyntaxError(tok.line, tok.column, str(exc))

    def _statement(self) -> None:
        subject = self._subject()
        self._predicate_object_list(subject)
        self._expect_punct(".")

    def _subject(self) -> Union[Iri, BlankNode]:
        tok = self._peek()
        if tok.kind == "IRIREF":
            self._take()
            try:
                return Iri(tok.value)
            except ValueError as exc:
                raise TurtleSyntaxError(tok.line, tok.column, str(exc))
        if tok.kind == "PNAME":
            self._take()
            return self._resolve_pname(tok)
        if tok.kind == "BLANK":
            self._take()
            return self._scoped_blank(tok.value)
        if tok.kind == "PUNCT" and tok.value == "[":
            return self._bnode_property_list()
        raise TurtleSyntaxError(tok.line, tok.column, f"expected subject, found {tok.value!r}")

    def _scoped_blank(self, label: str) -> BlankNode:
        # Labels from the document are kept verbatim; anonymous nodes get
        # fresh ones. Caller-provided graphs never collide because parse
        # always starts a new scope.
        return BlankNode(label)

    def _bnode_property_list(self) -> BlankNode:
        self._expect_punct("[")
        node = self._fresh_blank()
        if not (self._peek().kind == "PUNCT" and self._peek().value == "]"):
            self._predicate_object_list(node)
        self._expect_punct("]")
        return node

    def _predicate_object_list(self, subject: Union[Iri, BlankNode]) -> None:
        while True:
            predicate = self._predicate()
            self._object_list(subject, predicate)
            tok = self._peek()
            if tok.kind == "PUNCT" and tok.value == ";":
                self._take()
                # Allow a dangling ';' before '.' or ']'.
                nxt = self._peek()
                if nxt.kind == "PUNCT" and nxt.value in (".", "]"):
                    return
                continue
            return

    def _predicate(self) -> Iri:
        tok = self._take()
        if tok.kind == "KEYWORD" and tok.value == "a":
            return RDF_TYPE
        if tok.kind == "IRIREF":
            try:
                return Iri(tok.value)
            except ValueError as exc:
                raise TurtleSyntaxError(tok.line, tok.column, str(exc))
        if tok.kind == "PNAME":
            return self._resolve_pname(tok)
        raise TurtleSyntaxError(tok.line, tok.column, f"expected predicate, found {tok.value!r}")

    def _object_list(self, subject: Union[Iri, BlankNode], predicate: Iri) -> None:
        while True:
            obj = self._object()
            self.triples.append(Triple(subject, predicate, obj))
            tok = self._peek()
            if tok.kind == "PUNCT" and tok.value == ",":
                self._take()
                continue
            return

    def _object(self) -> Term:
        tok = self._peek()
        if tok.kind == "IRIREF":
            self._take()
            try:
                return Iri(tok.value)
            except ValueError as exc:
                raise TurtleSyntaxError(tok.line, tok.column, str(exc))
        if tok.kind == "PNAME":
            self._take()
            return self._resolve_pname(tok)
        if tok.kind == "BLANK":
            self._take()
            return self._scoped_blank(tok.value)
        if tok.kind == "PUNCT" and tok.value == "[":
            return self._bnode_property_list()
        if tok.kind == "BOOLEAN":
            self._take()
            return Literal(tok.value, XSD_BOOLEAN)
        if tok.kind == "NUMBER":
            self._take()
            dt = XSD_DECIMAL if "." in tok.value else XSD_INTEGER
            return Literal(tok.value, dt)
        if tok.kind == "STRING":
            self._take()
            nxt = self._peek()
            if nxt.kind == "LANG":
                self._take()
                return Literal(tok.value, language=nxt.value)
            if nxt.kind == "PUNCT" and nxt.value == "^^":
                self._take()
                dt_tok = self._take()
                if dt_tok.kind == "IRIREF":
                    return Literal(tok.value, Iri(dt_tok.value))
                if dt_tok.kind == "PNAME":
                    return Literal(tok.value, self._resolve_pname(dt_tok))
                raise TurtleSyntaxError(dt_tok.line, dt_tok.column, "expected datatype IRI after ^^")
            return Literal(tok.value)
        raise TurtleSyntaxError(tok.line, tok.column, f"expected object, found {tok.value!r}")


def parse_turtle(text: str, base_prefixes: Optional[PrefixTable] = None,
                 bind_undeclared: bool = False) -> RdfGraph:
    """Parse a Turtle document into an RdfGraph.

    ``base_prefixes`` pre-loads prefix bindings on top of which the document's
    own ``@prefix`` declarations apply. With ``bind_undeclared`` every unknown
    prefix label is bound under a recognizable placeholder namespace instead
    of raising, so lint can flag it downstream.
    """
    tokens = _Tokenizer(text).tokens()
    triples, prefixes = _Parser(tokens, base_prefixes, bind_undeclared).parse()
    return RdfGraph(frozenset(triples), prefixes)


# ---------------------------------------------------------------------------
# Serializer
# ---------------------------------------------------------------------------


def _render_iri(iri: Iri, prefixes: PrefixTable) -> str:
    curie = prefixes.contract(iri)
    if curie is not None:
        return curie
    return f"<{iri.value}>"


_STRING_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t"}


def _render_literal(lit: Literal, prefixes: PrefixTable) -> str:
    if lit.datatype == XSD_BOOLEAN:
        return lit.lexical
    if lit.datatype in (XSD_INTEGER, XSD_DECIMAL) and _NUMBER.fullmatch(lit.lexical):
        return lit.lexical
    escaped = "".join(_STRING_ESCAPES.get(c, c) for c in lit.lexical)
    rendered = f'"{escaped}"'
    if lit.language:
        return f"{rendered}@{lit.language}"
    if lit.datatype and lit.datatype != XSD_STRING:
        return f"{rendered}^^{_render_iri(lit.datatype, prefixes)}"
    return rendered


def _render_term(term: Term, prefixes: PrefixTable) -> str:
    if isinstance(term, Iri):
        return _render_iri(term, prefixes)
    if isinstance(term, BlankNode):
        return f"_:{term.label}"
    return _render_literal(term, prefixes)


def serialize_turtle(graph: RdfGraph) -> str:
    """Render a graph as Turtle with a fixed, deterministic layout.

    The whole prefix table is declared, sorted by label (an empty graph is a
    document of prefix declarations alone); statements are grouped per
    subject with ';' and ',' and sorted by expanded IRI so output is
    byte-stable for equal graphs.
    """
    prefixes = graph.prefixes
    ordered = sorted(graph.triples, key=triple_sort_key)
    lines = [f"@prefix {label}: <{prefixes.namespace(label)}> ."
             for label in sorted(prefixes.labels())]
    if lines:
        lines.append("")

    i = 0
    while i < len(ordered):
        subject = ordered[i].subject
        group = []
        while i < len(ordered) and ordered[i].subject == subject:
            group.append(ordered[i])
            i += 1
        subj_text = _render_term(subject, prefixes)
        parts: list[str] = []
        j = 0
        while j < len(group):
            predicate = group[j].predicate
            objs = []
            while j < len(group) and group[j].predicate == predicate:
                objs.append(_render_term(group[j].object, prefixes))
                j += 1
            pred_text = "a" if predicate == RDF_TYPE else _render_iri(predicate, prefixes)
            parts.append(f"{pred_text} {', '.join(objs)}")
        # Predicate groups on continuation lines, indented for readability.
        if len(parts) == 1:
            lines.append(f"{subj_text} {parts[0]} .")
        else:
            body = " ;\n    ".join(parts)
            lines.append(f"{subj_text} {body} .")
    lines.append("")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Graph isomorphism up to blank-node relabeling
# ---------------------------------------------------------------------------


def _blank_signature(graph_triples: frozenset[Triple], label: str) -> tuple:
    sig = []
    for t in graph_triples:
        s_blank = isinstance(t.subject, BlankNode) and t.subject.label == label
        o_blank = isinstance(t.object, BlankNode) and t.object.label == label
        if s_blank or o_blank:
            s = "*" if isinstance(t.subject, BlankNode) else t.subject.value
            o = "*" if isinstance(t.object, BlankNode) else _term_sort_key(t.object)
            sig.append((s_blank, t.predicate.value, o_blank, s, o))
    return tuple(sorted(map(repr, sig)))


def _rename_blanks(t: Triple, mapping: dict[str, str]) -> Triple:
    s = BlankNode(mapping[t.subject.label]) if isinstance(t.subject, BlankNode) else t.subject
    o = BlankNode(mapping[t.object.label]) if isinstance(t.object, BlankNode) else t.object
    return Triple(s, t.predicate, o)


def isomorphic(g1: RdfGraph, g2: RdfGraph) -> bool:
    """True when the graphs are equal up to a bijective blank-node relabeling."""
    def split(g: RdfGraph):
        ground, blanky = set(), set()
        labels = set()
        for t in g.triples:
            has_blank = False
            if isinstance(t.subject, BlankNode):
                labels.add(t.subject.label)
                has_blank = True
            if isinstance(t.object, BlankNode):
                labels.add(t.object.label)
                has_blank = True
            (blanky if has_blank else ground).add(t)
        return ground, blanky, sorted(labels)

    ground1, blanky1, labels1 = split(g1)
    ground2, blanky2, labels2 = split(g2)
    if ground1 != ground2 or len(labels1) != len(labels2) or len(blanky1) != len(blanky2):
        return False
    if not labels1:
        return True

    sig1 = {lb: _blank_signature(g1.triples, lb) for lb in labels1}
    sig2 = {lb: _blank_signature(g2.triples, lb) for lb in labels2}
    candidates = {lb: [m for m in labels2 if sig2[m] == sig1[lb]] for lb in labels1}
    order = sorted(labels1, key=lambda lb: len(candidates[lb]))

    def backtrack(idx: int, mapping: dict[str, str], used: set[str]) -> bool:
        if idx == len(order):
            renamed = {_rename_blanks(t, mapping) for t in blanky1}
            return renamed == blanky2
        lb = order[idx]
        for m in candidates[lb]:
            if m in used:
                continue
            mapping[lb] = m
            used.add(m)
            if backtrack(idx + 1, mapping, used):
                return True
            del mapping[lb]
            used.discard(m)
        return False

    return backtrack(0, {}, set())
