"""Application-profile extraction and the consistency gate.

A term manifest declares which classes, properties, and individuals are
selected from each source ontology.  Extraction copies, for every selected
term, only a minimal bundle of axioms from its source — type declaration,
labels, comments, subsumptions whose both ends are selected, domain/range
whose property and class are both selected — and stamps each term with one
rdfs:isDefinedBy annotation pointing at its source namespace.  Nothing else
crosses over, so the profile is a subgraph of the sources modulo the
provenance annotations.

The consistency gate re-derives that property: it computes the RDFS
closure (subclass/subproperty transitivity) of each source and flags any
profile axiom that the sources do not support.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Optional, Union

from chadkit.errors import ManifestError, MissingInSource, SourceUnavailable
from chadkit.namespaces import (
    OWL,
    RDF,
    RDFS,
    RDFS_COMMENT,
    RDFS_DOMAIN,
    RDFS_ISDEFINEDBY,
    RDFS_LABEL,
    RDFS_RANGE,
    RDFS_SUBCLASSOF,
    RDFS_SUBPROPERTYOF,
    RDF_TYPE,
    XSD,
)
from chadkit.rdf import Graph, Iri, Literal, Triple, match_pattern, parse_document

CATEGORIES = ("classes", "object_properties", "data_properties", "individuals")

# rdf/rdfs/owl meta-vocabulary that may appear as the object of a type
# declaration without being a selected term
META_TYPES = frozenset(
    Iri(v)
    for v in (
        OWL + "Class",
        OWL + "ObjectProperty",
        OWL + "DatatypeProperty",
        OWL + "AnnotationProperty",
        OWL + "NamedIndividual",
        RDFS + "Class",
        RDF + "Property",
    )
)


@dataclass(frozen=True)
class SourceDecl:
    namespace: Iri
    document: Path


@dataclass(frozen=True)
class TermManifest:
    sources: Mapping[str, SourceDecl]
    classes: tuple[tuple[Iri, str], ...]
    object_properties: tuple[tuple[Iri, str], ...]
    data_properties: tuple[tuple[Iri, str], ...]
    individuals: tuple[tuple[Iri, str], ...]

    def category(self, name: str) -> tuple[tuple[Iri, str], ...]:
        return getattr(self, name)

    def terms(self) -> list[tuple[Iri, str, str]]:
        """All (iri, source-id, category) entries in manifest order."""
        out = []
        for cat in CATEGORIES:
            out.extend((iri, src, cat) for iri, src in self.category(cat))
        return out

    def selected(self) -> set[Iri]:
        return {iri for iri, _src, _cat in self.terms()}


@dataclass(frozen=True)
class ProfileStats:
    classes: int
    object_properties: int
    data_properties: int
    individuals: int

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.classes, self.object_properties, self.data_properties, self.individuals)

    def as_json(self) -> str:
        return json.dumps(
            {
                "classes": self.classes,
                "object_properties": self.object_properties,
                "data_properties": self.data_properties,
                "individuals": self.individuals,
            },
            separators=(",", ":"),
        )


@dataclass(frozen=True)
class ConsistencyFinding:
    severity: str  # "error" | "warning"
    term: Iri
    kind: str  # ForeignSubsumption | DomainNarrowed | RangeNarrowed | MissingInSource | DanglingReference
    message: str


@dataclass(frozen=True)
class ProfileGraph:
    graph: Graph
    stats: ProfileStats
    warnings: tuple[ConsistencyFinding, ...] = ()


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ManifestError(message)


def load_manifest(path: Union[str, Path]) -> TermManifest:
    """Load and validate a JSON term manifest.

    Document paths inside the manifest are resolved relative to the
    manifest file's directory.
    """
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ManifestError(f"manifest {path} is not valid JSON: {exc}") from None
    _require(isinstance(doc, dict), "manifest root must be an object")
    _require(isinstance(doc.get("sources"), dict), "manifest needs a 'sources' object")

    sources: dict[str, SourceDecl] = {}
    for sid, decl in doc["sources"].items():
        _require(isinstance(decl, dict), f"source {sid!r} must be an object")
        _require("namespace" in decl and "document" in decl, f"source {sid!r} needs namespace and document")
        try:
            ns = Iri(decl["namespace"])
        except ValueError as exc:
            raise ManifestError(f"source {sid!r}: {exc}") from None
        sources[sid] = SourceDecl(ns, (path.parent / decl["document"]).resolve())

    seen: set[Iri] = set()
    categories: dict[str, list[tuple[Iri, str]]] = {}
    for cat in CATEGORIES:
        entries = doc.get(cat, [])
        _require(isinstance(entries, list), f"{cat} must be a list")
        out: list[tuple[Iri, str]] = []
        for entry in entries:
            _require(
                isinstance(entry, dict) and "iri" in entry and "source" in entry,
                f"{cat} entries must be objects with 'iri' and 'source'",
            )
            try:
                iri = Iri(entry["iri"])
            except ValueError as exc:
                raise ManifestError(f"{cat}: {exc}") from None
            sid = entry["source"]
            _require(sid in sources, f"{cat}: {iri.value} references undeclared source {sid!r}")
            _require(iri not in seen, f"term listed twice: {iri.value}")
            _require(
                iri.value.startswith(sources[sid].namespace.value),
                f"{iri.value} does not start with the namespace of source {sid!r}",
            )
            seen.add(iri)
            out.append((iri, sid))
        categories[cat] = out

    return TermManifest(
        sources=sources,
        classes=tuple(categories["classes"]),
        object_properties=tuple(categories["object_properties"]),
        data_properties=tuple(categories["data_properties"]),
        individuals=tuple(categories["individuals"]),
    )


def load_sources(manifest: TermManifest) -> dict[str, Graph]:
    """Parse every declared source document into a graph."""
    graphs: dict[str, Graph] = {}
    for sid, decl in manifest.sources.items():
        try:
            data = decl.document.read_bytes()
        except OSError:
            raise SourceUnavailable(sid, str(decl.document)) from None
        graphs[sid] = parse_document(data, format="turtle")
    return graphs


def extract_profile(manifest: TermManifest, sources: Mapping[str, Graph]) -> ProfileGraph:
    """Select the manifest terms out of the sources with minimal axioms."""
    selected = manifest.selected()
    selected_classes = {iri for iri, _ in manifest.classes}
    selected_properties = {iri for iri, _ in manifest.object_properties} | {
        iri for iri, _ in manifest.data_properties
    }

    triples: list[Triple] = []
    warnings: list[ConsistencyFinding] = []

    def dropped(term: Iri, axiom: str, other: Iri) -> None:
        warnings.append(
            ConsistencyFinding(
                severity="warning",
                term=term,
                kind="DanglingReference",
                message=f"{axiom} axiom of {term.value} mentions unselected {other.value}; dropped",
            )
        )

    for term, sid, category in manifest.terms():
        source = sources.get(sid)
        if source is None:
            raise SourceUnavailable(sid, str(manifest.sources[sid].document))
        about = match_pattern(source, s=term)
        if not about:
            raise MissingInSource(term.value, sid)

        for t in about:
            pred = t.predicate
            obj = t.object
            if pred == RDF_TYPE:
                if obj in META_TYPES or obj in selected_classes:
                    triples.append(t)
                elif isinstance(obj, Iri):
                    dropped(term, "type", obj)
            elif pred in (RDFS_LABEL, RDFS_COMMENT):
                triples.append(t)
            elif pred in (RDFS_SUBCLASSOF, RDFS_SUBPROPERTYOF):
                if obj in selected:
                    triples.append(t)
                elif isinstance(obj, Iri):
                    dropped(term, "subsumption", obj)
            elif pred in (RDFS_DOMAIN, RDFS_RANGE):
                if term in selected_properties and obj in selected_classes:
                    triples.append(t)
                elif isinstance(obj, Iri):
                    dropped(term, "domain" if pred == RDFS_DOMAIN else "range", obj)
            # anything else the source says about the term is out of scope

        triples.append(Triple(term, RDFS_ISDEFINEDBY, manifest.sources[sid].namespace))

    prefixes = {
        "rdf": Iri(RDF),
        "rdfs": Iri(RDFS),
        "owl": Iri(OWL),
        "xsd": Iri(XSD),
    }
    for sid, decl in manifest.sources.items():
        prefixes[sid] = decl.namespace

    stats = ProfileStats(
        classes=len(manifest.classes),
        object_properties=len(manifest.object_properties),
        data_properties=len(manifest.data_properties),
        individuals=len(manifest.individuals),
    )
    return ProfileGraph(graph=Graph(triples, prefixes), stats=stats, warnings=tuple(warnings))


def _transitive_closure(edges: Iterable[tuple[Iri, Iri]]) -> set[tuple[Iri, Iri]]:
    """Reachability over a directed edge set, by depth-first search."""
    adjacency: dict[Iri, set[Iri]] = {}
    for a, b in edges:
        adjacency.setdefault(a, set()).add(b)
    closure: set[tuple[Iri, Iri]] = set()
    for start in adjacency:
        stack = list(adjacency[start])
        seen: set[Iri] = set()
        while stack:
            node = stack.pop()
            if node in seen:
                continue
            seen.add(node)
            closure.add((start, node))
            stack.extend(adjacency.get(node, ()))
    return closure


def source_closure(source: Graph) -> tuple[set[tuple[Iri, Iri]], set[tuple[Iri, Iri]]]:
    """RDFS closure of one source: transitive subclass and subproperty pairs."""
    sub_class = [
        (t.subject, t.object)
        for t in match_pattern(source, p=RDFS_SUBCLASSOF)
        if isinstance(t.subject, Iri) and isinstance(t.object, Iri)
    ]
    sub_prop = [
        (t.subject, t.object)
        for t in match_pattern(source, p=RDFS_SUBPROPERTYOF)
        if isinstance(t.subject, Iri) and isinstance(t.object, Iri)
    ]
    return _transitive_closure(sub_class), _transitive_closure(sub_prop)


def check_consistency(profile: ProfileGraph, sources: Mapping[str, Graph]) -> list[ConsistencyFinding]:
    """Verify that the profile does not diverge from its sources.

    Errors: a subsumption absent from every source closure; a domain or
    range no source states; a declared term that no source knows.  A
    profile axiom pointing at a term the profile itself does not declare is
    reported as a warning.
    """
    g = profile.graph
    findings: list[ConsistencyFinding] = []

    class_closure: set[tuple[Iri, Iri]] = set()
    prop_closure: set[tuple[Iri, Iri]] = set()
    source_subjects: set[Iri] = set()
    domain_triples: set[tuple[Iri, Iri]] = set()
    range_triples: set[tuple[Iri, Iri]] = set()
    for source in sources.values():
        sc, sp = source_closure(source)
        class_closure |= sc
        prop_closure |= sp
        for t in source:
            if isinstance(t.subject, Iri):
                source_subjects.add(t.subject)
            if isinstance(t.object, Iri):
                if t.predicate == RDFS_DOMAIN:
                    domain_triples.add((t.subject, t.object))
                elif t.predicate == RDFS_RANGE:
                    range_triples.add((t.subject, t.object))

    declared = {
        t.subject
        for t in match_pattern(g, p=RDF_TYPE)
        if isinstance(t.subject, Iri)
    }

    def dangling(term: Iri, other: Iri, axiom: str) -> None:
        if other not in declared and other not in META_TYPES:
            findings.append(
                ConsistencyFinding(
                    severity="warning",
                    term=term,
                    kind="DanglingReference",
                    message=f"{axiom} of {term.value} references undeclared {other.value}",
                )
            )

    for term in sorted(declared, key=lambda i: i.value):
        if term not in source_subjects:
            findings.append(
                ConsistencyFinding(
                    severity="error",
                    term=term,
                    kind="MissingInSource",
                    message=f"{term.value} is declared in the profile but absent from every source",
                )
            )

    for t in g.sorted_triples():
        if not isinstance(t.subject, Iri) or not isinstance(t.object, Iri):
            continue
        pair = (t.subject, t.object)
        if t.predicate == RDFS_SUBCLASSOF:
            if pair not in class_closure:
                findings.append(
                    ConsistencyFinding(
                        severity="error",
                        term=t.subject,
                        kind="ForeignSubsumption",
                        message=f"{t.subject.value} rdfs:subClassOf {t.object.value} is not entailed by any source",
                    )
                )
            dangling(t.subject, t.object, "subsumption")
        elif t.predicate == RDFS_SUBPROPERTYOF:
            if pair not in prop_closure:
                findings.append(
                    ConsistencyFinding(
                        severity="error",
                        term=t.subject,
                        kind="ForeignSubsumption",
                        message=f"{t.subject.value} rdfs:subPropertyOf {t.object.value} is not entailed by any source",
                    )
                )
            dangling(t.subject, t.object, "subsumption")
        elif t.predicate == RDFS_DOMAIN:
            if pair not in domain_triples:
                findings.append(
                    ConsistencyFinding(
                        severity="error",
                        term=t.subject,
                        kind="DomainNarrowed",
                        message=f"domain {t.object.value} of {t.subject.value} is not stated by any source",
                    )
                )
            dangling(t.subject, t.object, "domain")
        elif t.predicate == RDFS_RANGE:
            if pair not in range_triples:
                findings.append(
                    ConsistencyFinding(
                        severity="error",
                        term=t.subject,
                        kind="RangeNarrowed",
                        message=f"range {t.object.value} of {t.subject.value} is not stated by any source",
                    )
                )
            dangling(t.subject, t.object, "range")

    findings.sort(key=lambda f: (f.term.value, f.kind, f.message))
    return findings


def profile_stats(profile: ProfileGraph) -> tuple[int, int, int, int]:
    """Counts of distinct declared terms per manifest category."""
    return profile.stats.as_tuple()
