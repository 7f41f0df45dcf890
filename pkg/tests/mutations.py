"""The five seeded single-triple mutations used by validation tests.

Each mutation edits exactly one triple of the exemplar dataset (one
removal, one change, or one addition) and is expected to produce exactly
one violation of a known kind from the shipped shapes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from chadkit.namespaces import AAT, CRM, CRMDIG, XSD
from chadkit.rdf import Graph, Iri, Literal, Triple

BASE = "https://example.org/aldrovandi/"

P2 = Iri(CRM + "P2_has_type")
P32 = Iri(CRM + "P32_used_general_technique")
P82A = Iri(CRM + "P82a_begin_of_the_begin")
L10 = Iri(CRMDIG + "L10_had_input")


@dataclass(frozen=True)
class Mutation:
    name: str
    apply: Callable[[Graph], Graph]
    kind: str  # expected violation kind
    shape_id: str  # expected shape
    path: Iri  # expected constraint path


def _without(graph: Graph, triple: Triple) -> Graph:
    assert triple in graph.triples, f"mutation target missing: {triple}"
    return Graph(graph.triples - {triple}, graph.prefixes)


def _with(graph: Graph, triple: Triple) -> Graph:
    assert triple not in graph.triples, f"mutation target already present: {triple}"
    return Graph(graph.triples | {triple}, graph.prefixes)


def _replace(graph: Graph, old: Triple, new: Triple) -> Graph:
    return _with(_without(graph, old), new)


def drop_title_type(graph: Graph) -> Graph:
    """Remove the type concept from one title node."""
    return _without(
        graph,
        Triple(Iri(BASE + "title/mo-001-original"), P2, Iri(AAT + "300417204")),
    )


def break_begin_datatype(graph: Graph) -> Graph:
    """Replace a date-time begin bound with a plain string literal."""
    node = Iri(BASE + "timespan/mo-001-creation")
    old = Literal("1639-01-01T00:00:00", Iri(XSD + "dateTime"))
    return _replace(
        graph,
        Triple(node, P82A, old),
        Triple(node, P82A, Literal("1639-01-01T00:00:00")),
    )


def foreign_technique(graph: Graph) -> Graph:
    """Point a digitization's technique at a non-digitization concept."""
    node = Iri(BASE + "activity/mo-001-acquisition")
    return _replace(
        graph,
        Triple(node, P32, Iri(AAT + "300053580")),
        Triple(node, P32, Iri(AAT + "300054196")),
    )


def duplicate_title_type(graph: Graph) -> Graph:
    """Give one title node a second type concept."""
    return _with(
        graph,
        Triple(Iri(BASE + "title/mo-003-original"), P2, Iri(AAT + "300417207")),
    )


def drop_software_input(graph: Graph) -> Graph:
    """Remove the input data object from a software execution."""
    return _without(
        graph,
        Triple(
            Iri(BASE + "activity/mo-001-processing"),
            L10,
            Iri(BASE + "data-object/mo-001-raw"),
        ),
    )


MUTATIONS = (
    Mutation("missing title type", drop_title_type, "min_count", "title", P2),
    Mutation("string where date-time required", break_begin_datatype, "datatype", "timespan", P82A),
    Mutation("out-of-vocabulary technique", foreign_technique, "value_in", "digitization", P32),
    Mutation("duplicate title type", duplicate_title_type, "max_count", "title", P2),
    Mutation("software stage without input", drop_software_input, "min_count", "software-execution", L10),
)
