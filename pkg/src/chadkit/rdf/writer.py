"""Graph serialization: canonical N-Triples and readable Turtle.

N-Triples output is the canonical text form: one triple per line, sorted by
(subject, predicate, object) text, every line terminated by " .\n", all
non-ASCII escaped.  Two equal graphs always serialize to identical bytes,
which makes the format suitable for golden files and diffing.

Turtle output groups triples by subject, abbreviates IRIs through the
graph's prefix map where possible, and lists rdf:type first for each
subject.  It is meant for human readers; it round-trips through the parser
back to an equal graph.
"""

from __future__ import annotations

import re

from chadkit.rdf.model import (
    BlankNode,
    Graph,
    Iri,
    Literal,
    Term,
    _escape_chars,
    iri_nt,
    term_nt,
)

_RDF_TYPE = Iri("http://www.w3.org/1999/02/22-rdf-syntax-ns#type")
_XSD_STRING = Iri("http://www.w3.org/2001/XMLSchema#string")
_LOCAL_OK_RE = re.compile(r"^[A-Za-z0-9_][A-Za-z0-9_\-]*$")


def serialize_ntriples(graph: Graph) -> str:
    lines = []
    for t in graph.sorted_triples():
        s = iri_nt(t.subject) if isinstance(t.subject, Iri) else f"_:{t.subject.label}"
        o = term_nt(t.object) if not isinstance(t.object, BlankNode) else f"_:{t.object.label}"
        lines.append(f"{s} {iri_nt(t.predicate)} {o} .\n")
    return "".join(lines)


def _turtle_name(iri: Iri, prefixes: dict[str, Iri]) -> str:
    """Abbreviate an IRI through the longest matching prefix, else <...>."""
    if iri.value == _RDF_TYPE.value:
        return "a"
    best_label = None
    best_len = -1
    for label, ns in prefixes.items():
        if iri.value.startswith(ns.value) and len(ns.value) > best_len:
            local = iri.value[len(ns.value) :]
            if local == "" or _LOCAL_OK_RE.match(local):
                best_label = label
                best_len = len(ns.value)
    if best_label is None:
        return iri_nt(iri)
    return f"{best_label}:{iri.value[best_len:]}"


def _turtle_term(term: Term, prefixes: dict[str, Iri]) -> str:
    if isinstance(term, Iri):
        return _turtle_name(term, prefixes)
    if isinstance(term, BlankNode):
        return f"_:{term.label}"
    assert isinstance(term, Literal)
    body = f'"{_escape_chars(term.lexical, quote_unicode=False)}"'
    if term.lang is not None:
        return f"{body}@{term.lang}"
    if term.datatype.value == _XSD_STRING.value:
        return body
    return f"{body}^^{_turtle_name(term.datatype, prefixes)}"


def serialize_turtle(graph: Graph) -> str:
    prefixes = graph.prefixes
    out: list[str] = []
    used = set()
    for t in graph.sorted_triples():
        for term in (t.subject, t.predicate, t.object):
            if isinstance(term, Iri):
                # the rdf:type predicate is always written as `a`, so it
                # does not by itself require the prefix declaration
                if term is t.predicate and term.value == _RDF_TYPE.value:
                    continue
                used.add(term.value)
            if isinstance(term, Literal):
                used.add(term.datatype.value)
    emitted = []
    for label in sorted(prefixes):
        ns = prefixes[label].value
        if any(v.startswith(ns) for v in used):
            emitted.append(label)
            out.append(f"@prefix {label}: {iri_nt(prefixes[label])} .\n")
    if out:
        out.append("\n")

    by_subject: dict[tuple[str, str], list] = {}
    for t in graph.sorted_triples():
        key = (
            "0" if isinstance(t.subject, Iri) else "1",
            t.subject.value if isinstance(t.subject, Iri) else t.subject.label,
        )
        by_subject.setdefault(key, []).append(t)

    first = True
    for key in sorted(by_subject):
        triples = by_subject[key]
        subject = triples[0].subject
        # rdf:type first, then the remaining predicates in canonical order
        typed = [t for t in triples if t.predicate.value == _RDF_TYPE.value]
        rest = [t for t in triples if t.predicate.value != _RDF_TYPE.value]
        ordered = typed + rest
        if not first:
            out.append("\n")
        first = False
        subj_text = _turtle_term(subject, prefixes)
        out.append(f"{subj_text}")
        # group consecutive triples sharing a predicate into object lists
        groups: list[tuple[Iri, list[Term]]] = []
        for t in ordered:
            if groups and groups[-1][0].value == t.predicate.value:
                groups[-1][1].append(t.object)
            else:
                groups.append((t.predicate, [t.object]))
        for gi, (pred, objects) in enumerate(groups):
            pred_text = _turtle_term(pred, prefixes)
            obj_text = ", ".join(_turtle_term(o, prefixes) for o in objects)
            sep = " " if gi == 0 else f" ;\n{' ' * 4}"
            out.append(f"{sep}{pred_text} {obj_text}")
        out.append(" .\n")
    return "".join(out)


def serialize_graph(graph: Graph, format: str = "ntriples") -> str:
    if format == "ntriples":
        return serialize_ntriples(graph)
    if format == "turtle":
        return serialize_turtle(graph)
    raise ValueError(f"unknown format {format!r}")
