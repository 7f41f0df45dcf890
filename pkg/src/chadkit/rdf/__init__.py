"""RDF data model, Turtle/N-Triples parsing, and canonical serialization."""

from chadkit.rdf.model import (
    BlankNode,
    Graph,
    Iri,
    Literal,
    Term,
    Triple,
    graphs_equal,
    match_pattern,
    merge_graphs,
    skolemize,
    term_nt,
    triple_key,
)
from chadkit.rdf.turtle import parse_document
from chadkit.rdf.writer import serialize_graph, serialize_ntriples, serialize_turtle

__all__ = [
    "BlankNode",
    "Graph",
    "Iri",
    "Literal",
    "Term",
    "Triple",
    "graphs_equal",
    "match_pattern",
    "merge_graphs",
    "skolemize",
    "term_nt",
    "triple_key",
    "parse_document",
    "serialize_graph",
    "serialize_ntriples",
    "serialize_turtle",
]
