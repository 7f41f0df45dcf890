"""RDF data model: terms, triples, graphs, and the set-level graph algebra.

Graphs are immutable after construction and safe to share across workers.
All ordering in this module derives from the canonical N-Triples text of a
term (ASCII-only, uppercase hex escapes), which makes every sorted output a
pure function of the triple set.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Optional, Union

from chadkit.errors import BlankNodePresent, PrefixConflict

_XSD_STRING = "http://www.w3.org/2001/XMLSchema#string"
_RDF_LANGSTRING = "http://www.w3.org/1999/02/22-rdf-syntax-ns#langString"

_SCHEME_RE = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*:")
_LANG_RE = re.compile(r"^[A-Za-z]+(-[A-Za-z0-9]+)*$")


@dataclass(frozen=True, slots=True)
class Iri:
    """An absolute IRI."""

    value: str

    def __post_init__(self) -> None:
        v = self.value
        if not v:
            raise ValueError("empty IRI")
        if not _SCHEME_RE.match(v):
            raise ValueError(f"IRI without scheme: {v!r}")
        if any(c in v for c in " \t\r\n<>"):
            raise ValueError(f"IRI contains forbidden character: {v!r}")

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True, slots=True)
class Literal:
    """A literal with its datatype and optional language tag.

    A missing datatype normalizes to xsd:string; a language tag forces the
    datatype to rdf:langString.
    """

    lexical: str
    datatype: Iri = field(default=Iri(_XSD_STRING))
    lang: Optional[str] = None

    def __post_init__(self) -> None:
        if self.lang is not None:
            if not _LANG_RE.match(self.lang):
                raise ValueError(f"malformed language tag: {self.lang!r}")
            if self.datatype.value != _RDF_LANGSTRING:
                object.__setattr__(self, "datatype", Iri(_RDF_LANGSTRING))
        elif self.datatype.value == _RDF_LANGSTRING:
            raise ValueError("rdf:langString literal requires a language tag")


@dataclass(frozen=True, slots=True)
class BlankNode:
    """A labelled blank node.  Appears only in parsed input graphs; graphs
    produced by the toolkit are skolemized."""

    label: str

    def __post_init__(self) -> None:
        if not self.label:
            raise ValueError("empty blank node label")


Term = Union[Iri, Literal, BlankNode]
Subject = Union[Iri, BlankNode]


@dataclass(frozen=True, slots=True)
class Triple:
    subject: Subject
    predicate: Iri
    object: Term

    def __post_init__(self) -> None:
        if isinstance(self.subject, Literal):
            raise ValueError("literal in subject position")
        if not isinstance(self.predicate, Iri):
            raise ValueError("predicate must be an IRI")


def _escape_chars(text: str, quote_unicode: bool) -> str:
    out: list[str] = []
    for ch in text:
        if ch == "\\":
            out.append("\\\\")
        elif ch == '"':
            out.append('\\"')
        elif ch == "\n":
            out.append("\\n")
        elif ch == "\r":
            out.append("\\r")
        elif ch == "\t":
            out.append("\\t")
        else:
            code = ord(ch)
            if code < 0x20 or code == 0x7F or (quote_unicode and code > 0x7E):
                if code > 0xFFFF:
                    out.append(f"\\U{code:08X}")
                else:
                    out.append(f"\\u{code:04X}")
            else:
                out.append(ch)
    return "".join(out)


def iri_nt(iri: Iri) -> str:
    body = _escape_chars(iri.value, quote_unicode=True)
    return f"<{body}>"


def term_nt(term: Term) -> str:
    """Canonical N-Triples surface form: ASCII-only, uppercase hex escapes.

    This text doubles as the sort key everywhere the toolkit promises
    deterministic output.
    """
    if isinstance(term, Iri):
        return iri_nt(term)
    if isinstance(term, BlankNode):
        return f"_:{term.label}"
    body = _escape_chars(term.lexical, quote_unicode=True)
    if term.lang is not None:
        return f'"{body}"@{term.lang}'
    if term.datatype.value == _XSD_STRING:
        return f'"{body}"'
    return f'"{body}"^^{iri_nt(term.datatype)}'


def triple_key(t: Triple) -> tuple[str, str, str]:
    return (term_nt(t.subject), term_nt(t.predicate), term_nt(t.object))


class Graph:
    """An immutable set of triples plus a prefix map.

    Equality of graphs is triple-set equality; the prefix map only guides
    Turtle serialization.
    """

    __slots__ = ("_triples", "_prefixes")

    def __init__(
        self,
        triples: Iterable[Triple] = (),
        prefixes: Optional[Mapping[str, Iri]] = None,
    ):
        self._triples: frozenset[Triple] = frozenset(triples)
        self._prefixes: dict[str, Iri] = dict(prefixes or {})

    @property
    def triples(self) -> frozenset[Triple]:
        return self._triples

    @property
    def prefixes(self) -> dict[str, Iri]:
        return dict(self._prefixes)

    def __len__(self) -> int:
        return len(self._triples)

    def __iter__(self) -> Iterator[Triple]:
        return iter(self._triples)

    def __contains__(self, t: Triple) -> bool:
        return t in self._triples

    def __repr__(self) -> str:
        return f"<Graph of {len(self._triples)} triples>"

    def sorted_triples(self) -> list[Triple]:
        return sorted(self._triples, key=triple_key)

    def has_blank_nodes(self) -> bool:
        return any(
            isinstance(t.subject, BlankNode) or isinstance(t.object, BlankNode)
            for t in self._triples
        )

    def subjects(self) -> set[Subject]:
        return {t.subject for t in self._triples}

    def with_prefixes(self, prefixes: Mapping[str, Iri]) -> "Graph":
        merged = dict(self._prefixes)
        merged.update(prefixes)
        return Graph(self._triples, merged)


WILDCARD = None


def match_pattern(
    g: Graph,
    s: Optional[Subject] = WILDCARD,
    p: Optional[Iri] = WILDCARD,
    o: Optional[Term] = WILDCARD,
) -> list[Triple]:
    """Triples matching every bound position, in canonical sorted order."""
    hits = [
        t
        for t in g.triples
        if (s is None or t.subject == s)
        and (p is None or t.predicate == p)
        and (o is None or t.object == o)
    ]
    hits.sort(key=triple_key)
    return hits


def graphs_equal(a: Graph, b: Graph) -> bool:
    """Set equality of the two triple sets; prefix maps are ignored."""
    if a.has_blank_nodes() or b.has_blank_nodes():
        raise BlankNodePresent("skolemize before comparing graphs")
    return a.triples == b.triples


def merge_graphs(a: Graph, b: Graph) -> Graph:
    """Union of the triple sets; prefix maps merged, conflicting labels rejected."""
    prefixes = dict(a.prefixes)
    for label, ns in b.prefixes.items():
        bound = prefixes.get(label)
        if bound is not None and bound != ns:
            raise PrefixConflict(label, bound.value, ns.value)
        prefixes[label] = ns
    return Graph(a.triples | b.triples, prefixes)


def skolemize(g: Graph, base: Union[Iri, str]) -> Graph:
    """Replace every blank node with a minted IRI under `base`.

    The IRI is derived from the blank label's first occurrence in canonical
    triple order, so the result does not depend on insertion order.
    """
    base_text = base.value if isinstance(base, Iri) else Iri(base).value
    order: dict[str, int] = {}
    for t in g.sorted_triples():
        for side in (t.subject, t.object):
            if isinstance(side, BlankNode) and side.label not in order:
                order[side.label] = len(order)
    if not order:
        return g

    sep = "" if base_text.endswith(("/", "#")) else "/"

    def sub(term: Term) -> Term:
        if isinstance(term, BlankNode):
            return Iri(f"{base_text}{sep}genid-{order[term.label]}")
        return term

    triples = [Triple(sub(t.subject), t.predicate, sub(t.object)) for t in g.triples]
    return Graph(triples, g.prefixes)
