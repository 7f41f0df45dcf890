"""Tests for manifest loading, profile extraction, and the consistency gate."""

import json
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chadkit.errors import ManifestError, MissingInSource, SourceUnavailable
from chadkit.namespaces import (
    RDFS_ISDEFINEDBY,
    RDFS_RANGE,
    RDFS_SUBCLASSOF,
    RDF_TYPE,
)
from chadkit.profile import (
    ConsistencyFinding,
    ProfileGraph,
    ProfileStats,
    check_consistency,
    extract_profile,
    load_manifest,
    load_sources,
    profile_stats,
    source_closure,
)
from chadkit.rdf import Graph, Iri, Triple, graphs_equal, match_pattern, serialize_ntriples
from tests.oracles.closure import closure_fixpoint
from tests.oracles.term_checklist import DESK_CLASSES, DESK_INDIVIDUALS, DESK_PROPERTIES
from tests.oracles.ttl_count import count_triples

FIXTURES = Path(__file__).parent / "fixtures"
CRM = "http://www.cidoc-crm.org/cidoc-crm/"
LRMOO = "http://iflastandards.info/ns/lrm/lrmoo/"


@pytest.fixture(scope="module")
def desk():
    manifest = load_manifest(FIXTURES / "manifests" / "chad_ap_desk.json")
    sources = load_sources(manifest)
    return manifest, sources, extract_profile(manifest, sources)


@pytest.fixture(scope="module")
def full():
    manifest = load_manifest(FIXTURES / "manifests" / "chad_ap_full.json")
    sources = load_sources(manifest)
    return manifest, sources, extract_profile(manifest, sources)


def make_manifest(tmp_path: Path, doc: dict) -> Path:
    path = tmp_path / "manifest.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    return path


def tiny_manifest_doc(classes=(), object_properties=(), individuals=()):
    return {
        "sources": {
            "crm": {"namespace": CRM, "document": str(FIXTURES / "sources" / "cidoc_crm.ttl")},
            "lrmoo": {"namespace": LRMOO, "document": str(FIXTURES / "sources" / "lrmoo.ttl")},
        },
        "classes": [{"iri": c, "source": "lrmoo" if c.startswith(LRMOO) else "crm"} for c in classes],
        "object_properties": [{"iri": p, "source": "crm"} for p in object_properties],
        "data_properties": [],
        "individuals": list(individuals),
    }


class TestLoadManifest:
    def test_full_manifest_counts(self, full):
        manifest, _, _ = full
        assert len(manifest.classes) == 25
        assert len(manifest.object_properties) == 28
        assert len(manifest.data_properties) == 5
        assert len(manifest.individuals) == 81

    def test_not_json(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{ nope", encoding="utf-8")
        with pytest.raises(ManifestError):
            load_manifest(bad)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ManifestError):
            load_manifest(tmp_path / "absent.json")

    def test_duplicate_term(self, tmp_path):
        doc = tiny_manifest_doc(classes=[CRM + "E52_Time-Span", CRM + "E52_Time-Span"])
        with pytest.raises(ManifestError, match="twice"):
            load_manifest(make_manifest(tmp_path, doc))

    def test_undeclared_source(self, tmp_path):
        doc = tiny_manifest_doc()
        doc["classes"] = [{"iri": CRM + "E52_Time-Span", "source": "nope"}]
        with pytest.raises(ManifestError, match="undeclared source"):
            load_manifest(make_manifest(tmp_path, doc))

    def test_namespace_mismatch(self, tmp_path):
        doc = tiny_manifest_doc()
        doc["classes"] = [{"iri": LRMOO + "F1_Work", "source": "crm"}]
        with pytest.raises(ManifestError, match="namespace"):
            load_manifest(make_manifest(tmp_path, doc))


class TestLoadSources:
    def test_four_sources(self, full):
        _, sources, _ = full
        assert set(sources) == {"crm", "lrmoo", "crmdig", "aat"}

    def test_empty_manifest(self, tmp_path):
        doc = {"sources": {}, "classes": [], "object_properties": [], "data_properties": [], "individuals": []}
        manifest = load_manifest(make_manifest(tmp_path, doc))
        assert load_sources(manifest) == {}

    def test_missing_document(self, tmp_path):
        doc = tiny_manifest_doc()
        doc["sources"]["crm"]["document"] = str(tmp_path / "gone.ttl")
        manifest = load_manifest(make_manifest(tmp_path, doc))
        with pytest.raises(SourceUnavailable):
            load_sources(manifest)

    def test_counts_match_independent_statement_counter(self, full):
        _, sources, _ = full
        manifest, _, _ = full
        for sid, graph in sources.items():
            text = manifest.sources[sid].document.read_text(encoding="utf-8")
            assert len(graph) == count_triples(text), f"count drift in source {sid}"


class TestExtractProfile:
    def test_single_class_is_minimal(self, tmp_path):
        doc = tiny_manifest_doc(classes=[CRM + "E52_Time-Span"])
        manifest = load_manifest(make_manifest(tmp_path, doc))
        profile = extract_profile(manifest, load_sources(manifest))
        term = Iri(CRM + "E52_Time-Span")
        g = profile.graph
        assert len(g) == 4  # type declaration, label, comment, provenance
        assert match_pattern(g, s=term, p=RDF_TYPE) != []
        assert match_pattern(g, s=term, p=RDFS_ISDEFINEDBY) != []
        # its superclass is not selected, so the subsumption was dropped
        assert match_pattern(g, p=RDFS_SUBCLASSOF) == []
        assert any(w.kind == "DanglingReference" for w in profile.warnings)

    def test_unselected_property_never_emitted(self, tmp_path):
        doc = tiny_manifest_doc(classes=[LRMOO + "F1_Work", LRMOO + "F2_Expression"])
        manifest = load_manifest(make_manifest(tmp_path, doc))
        profile = extract_profile(manifest, load_sources(manifest))
        realised = Iri(LRMOO + "R3_is_realised_in")
        assert match_pattern(profile.graph, s=realised) == []
        assert match_pattern(profile.graph, p=realised) == []
        assert profile.warnings  # the dropped subsumptions are reported

    def test_full_stats(self, full):
        _, _, profile = full
        assert profile_stats(profile) == (25, 28, 5, 81)

    def test_desk_stats(self, desk):
        _, _, profile = desk
        assert profile_stats(profile) == (21, 6, 0, 15)

    def test_desk_contains_every_checklist_term(self, desk):
        _, _, profile = desk
        subjects = {t.subject.value for t in match_pattern(profile.graph, p=RDF_TYPE)}
        for iri in DESK_CLASSES + DESK_PROPERTIES + DESK_INDIVIDUALS:
            assert iri in subjects, f"missing from desk profile: {iri}"

    def test_exactly_one_provenance_per_term(self, full):
        manifest, _, profile = full
        for term in manifest.selected():
            assert len(match_pattern(profile.graph, s=term, p=RDFS_ISDEFINEDBY)) == 1

    def test_subgraph_of_sources_modulo_provenance(self, full):
        _, sources, profile = full
        union = set()
        for g in sources.values():
            union |= set(g)
        for t in profile.graph:
            if t.predicate == RDFS_ISDEFINEDBY:
                continue
            assert t in union, f"axiom not in any source: {t}"

    def test_selected_to_selected_subsumptions_copied(self, full):
        _, _, profile = full
        g = profile.graph
        assert Triple(Iri(CRM + "E21_Person"), RDFS_SUBCLASSOF, Iri(CRM + "E39_Actor")) in g
        assert Triple(Iri(LRMOO + "F2_Expression"), RDFS_SUBCLASSOF, Iri(CRM + "E73_Information_Object")) in g

    def test_desk_drops_what_full_keeps(self, desk, full):
        _, _, desk_profile = desk
        _, _, full_profile = full
        edge = Triple(Iri(CRM + "E42_Identifier"), RDFS_SUBCLASSOF, Iri(CRM + "E41_Appellation"))
        assert edge in full_profile.graph
        assert edge not in desk_profile.graph

    def test_deterministic_bytes(self, full):
        manifest, sources, profile = full
        again = extract_profile(manifest, sources)
        assert serialize_ntriples(again.graph) == serialize_ntriples(profile.graph)

    def test_missing_term_raises(self, tmp_path):
        doc = tiny_manifest_doc(classes=[CRM + "E52_Time-Span", CRM + "E9999_Nonexistent"])
        manifest = load_manifest(make_manifest(tmp_path, doc))
        with pytest.raises(MissingInSource):
            extract_profile(manifest, load_sources(manifest))


def with_axiom(profile: ProfileGraph, *triples: Triple) -> ProfileGraph:
    return ProfileGraph(
        graph=Graph(list(profile.graph) + list(triples), profile.graph.prefixes),
        stats=profile.stats,
    )


def without_axiom(profile: ProfileGraph, *triples: Triple) -> ProfileGraph:
    removed = set(triples)
    return ProfileGraph(
        graph=Graph([t for t in profile.graph if t not in removed], profile.graph.prefixes),
        stats=profile.stats,
    )


class TestCheckConsistency:
    def test_untampered_full_is_clean(self, full):
        _, sources, profile = full
        assert check_consistency(profile, sources) == []

    def test_untampered_desk_is_clean(self, desk):
        _, sources, profile = desk
        assert check_consistency(profile, sources) == []

    def test_foreign_subsumption(self, full):
        _, sources, profile = full
        bad = Triple(Iri(CRM + "E21_Person"), RDFS_SUBCLASSOF, Iri(CRM + "E73_Information_Object"))
        # the closure oracle confirms the injected edge is absent from the sources
        for source in sources.values():
            pairs = {
                (t.subject.value, t.object.value)
                for t in match_pattern(source, p=RDFS_SUBCLASSOF)
            }
            assert (bad.subject.value, bad.object.value) not in closure_fixpoint(pairs)
        findings = check_consistency(with_axiom(profile, bad), sources)
        assert len(findings) == 1
        assert findings[0].kind == "ForeignSubsumption"
        assert findings[0].severity == "error"
        assert findings[0].term == bad.subject

    def test_entailed_subsumption_is_not_foreign(self, full):
        """An injected edge that the source closure entails is not flagged."""
        _, sources, profile = full
        crmdig = "http://www.ics.forth.gr/isl/CRMdig/"
        entailed = Triple(Iri(crmdig + "D2_Digitization_Process"), RDFS_SUBCLASSOF, Iri(CRM + "E7_Activity"))
        pairs = {
            (t.subject.value, t.object.value)
            for t in match_pattern(sources["crmdig"], p=RDFS_SUBCLASSOF)
        }
        assert (entailed.subject.value, entailed.object.value) in closure_fixpoint(pairs)
        assert check_consistency(with_axiom(profile, entailed), sources) == []

    def test_narrowed_range(self, full):
        _, sources, profile = full
        prop = Iri(CRM + "P2_has_type")
        old = Triple(prop, RDFS_RANGE, Iri(CRM + "E55_Type"))
        new = Triple(prop, RDFS_RANGE, Iri(CRM + "E52_Time-Span"))
        assert old in profile.graph
        findings = check_consistency(with_axiom(without_axiom(profile, old), new), sources)
        assert len(findings) == 1
        assert findings[0].kind == "RangeNarrowed"
        assert findings[0].term == prop

    def test_narrowed_domain(self, full):
        _, sources, profile = full
        prop = Iri(CRM + "P14_carried_out_by")
        old = Triple(prop, Iri("http://www.w3.org/2000/01/rdf-schema#domain"), Iri(CRM + "E7_Activity"))
        new = Triple(prop, Iri("http://www.w3.org/2000/01/rdf-schema#domain"), Iri(CRM + "E21_Person"))
        assert old in profile.graph
        findings = check_consistency(with_axiom(without_axiom(profile, old), new), sources)
        assert len(findings) == 1
        assert findings[0].kind == "DomainNarrowed"

    def test_missing_term(self, full):
        _, sources, profile = full
        ghost = Triple(Iri(CRM + "E9999_Invented"), RDF_TYPE, Iri("http://www.w3.org/2002/07/owl#Class"))
        findings = check_consistency(with_axiom(profile, ghost), sources)
        assert len(findings) == 1
        assert findings[0].kind == "MissingInSource"
        assert findings[0].term == ghost.subject

    def test_dangling_reference_is_warning(self, full):
        _, sources, _ = full
        g = Graph(
            [
                Triple(Iri(CRM + "E21_Person"), RDF_TYPE, Iri("http://www.w3.org/2002/07/owl#Class")),
                Triple(Iri(CRM + "E21_Person"), RDFS_SUBCLASSOF, Iri(CRM + "E39_Actor")),
            ]
        )
        profile = ProfileGraph(graph=g, stats=ProfileStats(1, 0, 0, 0))
        findings = check_consistency(profile, sources)
        dangling = [f for f in findings if f.kind == "DanglingReference"]
        assert len(dangling) == 1
        assert dangling[0].severity == "warning"

    def test_validation_is_read_only(self, full):
        _, sources, profile = full
        before = serialize_ntriples(profile.graph)
        check_consistency(profile, sources)
        assert serialize_ntriples(profile.graph) == before


class TestClosure:
    def test_agrees_with_fixpoint_oracle_on_sources(self, full):
        _, sources, _ = full
        for sid, source in sources.items():
            got_classes, got_props = source_closure(source)
            want_classes = closure_fixpoint(
                {(t.subject.value, t.object.value) for t in match_pattern(source, p=RDFS_SUBCLASSOF)}
            )
            want_props = closure_fixpoint(
                {
                    (t.subject.value, t.object.value)
                    for t in match_pattern(source, p=Iri("http://www.w3.org/2000/01/rdf-schema#subPropertyOf"))
                }
            )
            assert {(a.value, b.value) for a, b in got_classes} == want_classes, sid
            assert {(a.value, b.value) for a, b in got_props} == want_props, sid

    @settings(max_examples=150, deadline=None)
    @given(
        st.lists(
            st.tuples(st.integers(0, 8), st.integers(0, 8)),
            max_size=20,
        )
    )
    def test_agrees_with_fixpoint_oracle_on_random_graphs(self, edges):
        base = "https://example.org/aldrovandi/n"
        graph = Graph(
            [
                Triple(Iri(f"{base}{a}"), RDFS_SUBCLASSOF, Iri(f"{base}{b}"))
                for a, b in edges
            ]
        )
        got, _ = source_closure(graph)
        want = closure_fixpoint({(f"{base}{a}", f"{base}{b}") for a, b in edges})
        assert {(a.value, b.value) for a, b in got} == want


class TestStats:
    def test_empty_profile(self):
        profile = ProfileGraph(graph=Graph([]), stats=ProfileStats(0, 0, 0, 0))
        assert profile_stats(profile) == (0, 0, 0, 0)

    def test_stats_json_shape(self, desk):
        _, _, profile = desk
        assert (
            profile.stats.as_json()
            == '{"classes":21,"object_properties":6,"data_properties":0,"individuals":15}'
        )
