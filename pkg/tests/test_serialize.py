"""Serializer tests: canonical N-Triples bytes and Turtle round-trips."""

import pytest

from chadkit.rdf import (
    Graph,
    Iri,
    Literal,
    Triple,
    graphs_equal,
    parse_document,
    serialize_graph,
    serialize_ntriples,
    serialize_turtle,
)

CRM = "http://www.cidoc-crm.org/cidoc-crm/"
EX = "https://example.org/aldrovandi/"
XSD = "http://www.w3.org/2001/XMLSchema#"


def sample_graph() -> Graph:
    s = Iri(EX + "object/mo-001")
    return Graph(
        [
            Triple(s, Iri("http://www.w3.org/1999/02/22-rdf-syntax-ns#type"), Iri(CRM + "E24_Physical_Human-Made_Thing")),
            Triple(s, Iri(CRM + "P3_has_note"), Literal("a dried specimen")),
            Triple(s, Iri(CRM + "P3_has_note"), Literal("esemplare", lang="it")),
            Triple(s, Iri(CRM + "P82a_begin_of_the_begin"), Literal("1551-01-01T00:00:00", datatype=Iri(XSD + "dateTime"))),
        ],
        {"crm": Iri(CRM), "ex": Iri(EX)},
    )


class TestNTriples:
    def test_lines_sorted_and_terminated(self):
        text = serialize_ntriples(sample_graph())
        lines = text.splitlines(keepends=True)
        assert all(line.endswith(" .\n") for line in lines)
        assert lines == sorted(lines)

    def test_identical_bytes_for_any_insertion_order(self):
        g = sample_graph()
        forward = Graph(list(g), g.prefixes)
        backward = Graph(list(reversed(list(g))), g.prefixes)
        assert serialize_ntriples(forward).encode() == serialize_ntriples(backward).encode()

    def test_ascii_only(self):
        g = Graph([Triple(Iri(EX + "s"), Iri(EX + "p"), Literal("Bologna è bella"))])
        text = serialize_ntriples(g)
        assert text.isascii()
        assert "\\u00E8" in text

    def test_round_trip(self):
        g = sample_graph()
        back = parse_document(serialize_ntriples(g), format="ntriples")
        assert graphs_equal(back, g)

    def test_plain_string_has_no_datatype(self):
        g = Graph([Triple(Iri(EX + "s"), Iri(EX + "p"), Literal("v"))])
        assert "XMLSchema#string" not in serialize_ntriples(g)

    def test_empty_graph(self):
        assert serialize_ntriples(Graph([])) == ""


class TestTurtle:
    def test_round_trip_equal_graph(self):
        g = sample_graph()
        back = parse_document(serialize_turtle(g))
        assert graphs_equal(back, g)

    def test_groups_by_subject_with_type_first(self):
        text = serialize_turtle(sample_graph())
        # one subject block: subject text appears exactly once
        assert text.count("ex:object/mo-001") == 0  # '/' not valid in a local name
        assert f"<{EX}object/mo-001> a crm:E24_Physical_Human-Made_Thing" in text

    def test_prefix_shortening(self):
        g = Graph(
            [Triple(Iri(EX + "mo-001"), Iri(CRM + "P3_has_note"), Literal("x"))],
            {"crm": Iri(CRM), "ex": Iri(EX)},
        )
        text = serialize_turtle(g)
        assert "ex:mo-001 crm:P3_has_note" in text

    def test_unused_prefixes_omitted(self):
        g = Graph(
            [Triple(Iri(EX + "s"), Iri(EX + "p"), Iri(EX + "o"))],
            {"ex": Iri(EX), "crm": Iri(CRM)},
        )
        text = serialize_turtle(g)
        assert "@prefix ex:" in text
        assert "crm" not in text

    def test_empty_graph(self):
        assert serialize_turtle(Graph([])) == ""

    def test_round_trip_with_awkward_literals(self):
        g = Graph(
            [
                Triple(Iri(EX + "s"), Iri(EX + "p"), Literal('with "quotes" and \\ slash\nnewline')),
                Triple(Iri(EX + "s"), Iri(EX + "p"), Literal("tagged", lang="en-GB")),
                Triple(Iri(EX + "s"), Iri(EX + "p"), Literal("7", datatype=Iri(XSD + "integer"))),
            ],
            {"ex": Iri(EX)},
        )
        back = parse_document(serialize_turtle(g))
        assert graphs_equal(back, g)


class TestDispatch:
    def test_formats(self):
        g = sample_graph()
        assert serialize_graph(g, "ntriples") == serialize_ntriples(g)
        assert serialize_graph(g, "turtle") == serialize_turtle(g)

    def test_unknown_format(self):
        with pytest.raises(ValueError):
            serialize_graph(sample_graph(), "rdfxml")
