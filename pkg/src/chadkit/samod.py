"""Iterative, test-driven model development harness.

Each development iteration ships as a *bundle*: a directory holding a
motivating scenario, a glossary, a term manifest (the iteration's modelet
selection), exemplar data, and competency-question queries with their
expected answers.  The harness checks every bundle in three phases —

* **model**: extract the modelet from the declared sources and verify it
  stays consistent with them (sources are imported only while testing;
  the emitted modelet never contains them);
* **data**: validate the exemplar data against the shape catalogue
  restricted to the modelet's classes, and enforce the closed vocabulary
  (data may use only manifest terms);
* **query**: execute each competency question and compare against the
  expected answers.

Bundles then merge in iteration order.  A merge unions the manifests
(set semantics per category), re-extracts the profile from the union,
re-validates the combined exemplar data, and re-runs every bundle's
queries against it.  Failures introduced by a merge are reported as
regressions attributed to the earliest bundle whose data exhibits them.
"""

from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Optional, Sequence, Union

from .errors import (
    BundleLayoutError,
    ChadError,
    CsvSyntaxError,
    HeaderMismatch,
    ManifestError,
    MissingInSource,
    PrefixConflict,
    SourceUnavailable,
)
from .lowering import AMBIENT_PROPERTIES
from .namespaces import RDF_TYPE
from .profile import (
    ProfileGraph,
    ProfileStats,
    TermManifest,
    check_consistency,
    extract_profile,
    load_manifest,
    load_sources,
)
from .query import compare_results, execute, parse_query
from .rdf import Graph, Iri, merge_graphs, parse_document
from .shapes import ShapeSet, Violation, validate

__all__ = [
    "TestCase",
    "Finding",
    "PhaseOutcome",
    "TestReport",
    "Regression",
    "IterationModel",
    "MergeOutcome",
    "HarnessReport",
    "load_test_case",
    "load_bundles",
    "run_model_test",
    "run_data_test",
    "run_query_test",
    "run_test_case",
    "merge_manifests",
    "empty_model",
    "merge_iteration",
    "run_harness",
    "report_text",
    "report_json",
]

_REQUIRED_FILES = ("scenario.md", "glossary.csv", "manifest.json", "data.ttl")
_GLOSSARY_COLUMNS = ["term", "definition"]
_PHASES = ("model", "data", "query")


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TestCase:
    """One development iteration, fully parsed from its bundle directory."""

    id: int
    directory: Path
    scenario: str
    glossary: tuple[tuple[str, str], ...]
    manifest: TermManifest
    exemplar_data: Graph
    #: (query file, expected-answers TSV) pairs, in file-name order.
    queries: tuple[tuple[Path, Path], ...]
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True)
class Finding:
    """A single reason a phase failed."""

    kind: str
    message: str


@dataclass(frozen=True)
class PhaseOutcome:
    phase: str  # "model" | "data" | "query"
    passed: bool
    findings: tuple[Finding, ...] = ()
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True)
class TestReport:
    """Per-phase outcomes of one bundle's standalone check."""

    case_id: int
    model: PhaseOutcome
    data: PhaseOutcome
    query: PhaseOutcome

    @property
    def passed(self) -> bool:
        return self.model.passed and self.data.passed and self.query.passed

    def outcome(self, phase: str) -> PhaseOutcome:
        if phase not in _PHASES:
            raise ValueError(f"unknown phase {phase!r}")
        return getattr(self, phase)


@dataclass(frozen=True)
class Regression:
    """A failure surfaced by a merge, charged to the bundle it breaks."""

    bundle_id: int
    phase: str
    findings: tuple[Finding, ...]


@dataclass(frozen=True)
class IterationModel:
    """The cumulative model after zero or more merges."""

    manifest: TermManifest
    profile: ProfileGraph
    data: Graph
    cases: tuple[TestCase, ...] = ()

    @property
    def stats(self) -> tuple[int, int, int, int]:
        return (
            len(self.manifest.classes),
            len(self.manifest.object_properties),
            len(self.manifest.data_properties),
            len(self.manifest.individuals),
        )


@dataclass(frozen=True)
class MergeOutcome:
    merged: IterationModel
    regressions: tuple[Regression, ...] = ()

    @property
    def passed(self) -> bool:
        return not self.regressions


@dataclass(frozen=True)
class HarnessReport:
    """Standalone reports plus merge outcomes for a run over many bundles."""

    reports: tuple[TestReport, ...]
    merges: tuple[MergeOutcome, ...]
    final: IterationModel

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports) and all(
            m.passed for m in self.merges
        )


# ---------------------------------------------------------------------------
# Bundle loading
# ---------------------------------------------------------------------------


def _read_glossary(path: Path) -> tuple[tuple[str, str], ...]:
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise HeaderMismatch(_GLOSSARY_COLUMNS, []) from None
        if header != _GLOSSARY_COLUMNS:
            raise HeaderMismatch(_GLOSSARY_COLUMNS, header)
        rows: list[tuple[str, str]] = []
        for number, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise CsvSyntaxError(number, f"expected 2 fields, found {len(row)}")
            rows.append((row[0], row[1]))
    return tuple(rows)


def load_test_case(directory: Union[str, Path]) -> TestCase:
    """Parse one bundle directory into a :class:`TestCase`.

    The directory name must end in the iteration number
    (``iteration-3``); the layout must contain ``scenario.md``,
    ``glossary.csv``, ``manifest.json``, ``data.ttl`` and a ``queries/``
    directory in which every ``*.cq`` query has a sibling ``*.tsv`` of
    expected answers.
    """
    directory = Path(directory)
    match = re.search(r"(\d+)$", directory.name)
    if match is None:
        raise BundleLayoutError("an iteration number suffix in the directory name")
    case_id = int(match.group(1))

    for name in _REQUIRED_FILES:
        if not (directory / name).is_file():
            raise BundleLayoutError(name)
    queries_dir = directory / "queries"
    if not queries_dir.is_dir():
        raise BundleLayoutError("queries/")

    scenario = (directory / "scenario.md").read_text(encoding="utf-8")
    glossary = _read_glossary(directory / "glossary.csv")
    manifest = load_manifest(directory / "manifest.json")
    exemplar_data = parse_document((directory / "data.ttl").read_text(encoding="utf-8"))

    queries: list[tuple[Path, Path]] = []
    for query_path in sorted(queries_dir.glob("*.cq")):
        expected_path = query_path.with_suffix(".tsv")
        if not expected_path.is_file():
            raise BundleLayoutError(f"queries/{expected_path.name}")
        queries.append((query_path, expected_path))

    warnings: tuple[str, ...] = ()
    if not queries:
        warnings = ("bundle declares no queries",)

    return TestCase(
        id=case_id,
        directory=directory,
        scenario=scenario,
        glossary=glossary,
        manifest=manifest,
        exemplar_data=exemplar_data,
        queries=tuple(queries),
        warnings=warnings,
    )


def load_bundles(root: Union[str, Path]) -> list[TestCase]:
    """Load every bundle directory under *root*, sorted by iteration id."""
    root = Path(root)
    cases = [
        load_test_case(child)
        for child in sorted(root.iterdir())
        if child.is_dir()
    ]
    cases.sort(key=lambda tc: tc.id)
    seen: set[int] = set()
    for case in cases:
        if case.id in seen:
            raise BundleLayoutError(
                f"distinct iteration numbers (iteration {case.id} appears twice)"
            )
        seen.add(case.id)
    return cases


# ---------------------------------------------------------------------------
# Test phases
# ---------------------------------------------------------------------------


def run_model_test(
    tc: TestCase,
    sources: Mapping[str, Graph],
    profile: Optional[ProfileGraph] = None,
) -> PhaseOutcome:
    """Extract the iteration's modelet and check it against its sources.

    *sources* are imported only for the duration of the check; the
    extracted modelet graph never includes them.  A pre-extracted
    *profile* may be supplied to re-check an existing modelet.
    """
    findings: list[Finding] = []
    warnings: list[str] = []
    if profile is None:
        try:
            profile = extract_profile(tc.manifest, sources)
        except (MissingInSource, SourceUnavailable) as exc:
            return PhaseOutcome(
                "model", False, (Finding(type(exc).__name__, str(exc)),)
            )
    warnings.extend(w.message for w in profile.warnings)
    for finding in check_consistency(profile, sources):
        if finding.severity == "error":
            findings.append(Finding(finding.kind, finding.message))
        else:
            warnings.append(finding.message)
    return PhaseOutcome("model", not findings, tuple(findings), tuple(warnings))


def _closed_vocabulary_offences(
    graph: Graph, manifest: TermManifest
) -> list[tuple[Iri, Iri]]:
    """(subject, foreign term) pairs where data strays outside the manifest."""
    selected = manifest.selected()
    namespaces = [decl.namespace.value for decl in manifest.sources.values()]
    offences: list[tuple[Iri, Iri]] = []
    for triple in graph:
        subject = triple.subject
        predicate = triple.predicate
        if predicate not in AMBIENT_PROPERTIES and predicate not in selected:
            offences.append((subject, predicate))
        obj = triple.object
        if not isinstance(obj, Iri):
            continue
        if predicate == RDF_TYPE:
            if obj not in selected:
                offences.append((subject, obj))
        elif any(obj.value.startswith(ns) for ns in namespaces):
            if obj not in selected:
                offences.append((subject, obj))
    return offences


def _violation_finding(violation: Violation) -> Finding:
    return Finding(
        violation.kind,
        f"{violation.focus.value} [{violation.shape_id}]: {violation.message}",
    )


def run_data_test(tc: TestCase, shapes: ShapeSet) -> PhaseOutcome:
    """Validate exemplar data against the modelet's shapes and vocabulary."""
    restricted = shapes.restrict({iri for iri, _ in tc.manifest.classes})
    report = validate(tc.exemplar_data, restricted)
    findings = [_violation_finding(v) for v in report.violations]
    for subject, term in _closed_vocabulary_offences(tc.exemplar_data, tc.manifest):
        findings.append(
            Finding(
                "closed_vocabulary",
                f"{subject.value} uses {term.value}, which the manifest does not select",
            )
        )
    return PhaseOutcome("data", not findings, tuple(findings))


def run_query_test(tc: TestCase, graph: Optional[Graph] = None) -> PhaseOutcome:
    """Execute each competency question and diff against expected answers.

    By default queries run over the bundle's own exemplar data; *graph*
    substitutes a different dataset (the merged one, during merges).
    """
    target = tc.exemplar_data if graph is None else graph
    findings: list[Finding] = []
    for query_path, expected_path in tc.queries:
        try:
            query = parse_query(query_path.read_text(encoding="utf-8"))
            table = execute(query, target)
            diff = compare_results(table, expected_path)
        except ChadError as exc:
            findings.append(Finding("query_error", f"{query_path.name}: {exc}"))
            continue
        if diff:
            findings.append(
                Finding("query_mismatch", f"{query_path.name}: " + "; ".join(diff))
            )
    warnings: tuple[str, ...] = ()
    if not tc.queries:
        warnings = ("no queries to run",)
    return PhaseOutcome("query", not findings, tuple(findings), warnings)


def run_test_case(
    tc: TestCase,
    shapes: ShapeSet,
    sources: Optional[Mapping[str, Graph]] = None,
) -> TestReport:
    """Run the three phases of one bundle in order: model, data, query."""
    if sources is None:
        try:
            sources = load_sources(tc.manifest)
        except SourceUnavailable as exc:
            model: PhaseOutcome = PhaseOutcome(
                "model", False, (Finding("SourceUnavailable", str(exc)),)
            )
            return TestReport(tc.id, model, run_data_test(tc, shapes), run_query_test(tc))
    return TestReport(
        tc.id,
        run_model_test(tc, sources),
        run_data_test(tc, shapes),
        run_query_test(tc),
    )


# ---------------------------------------------------------------------------
# Merging
# ---------------------------------------------------------------------------


def merge_manifests(a: TermManifest, b: TermManifest) -> TermManifest:
    """Union two manifests with set semantics per category.

    Keeps *a*'s entries in order, then appends *b*'s new ones.  The same
    source label bound to two namespaces raises :class:`PrefixConflict`;
    one IRI claimed by two categories or two sources raises
    :class:`ManifestError`.
    """
    sources = dict(a.sources)
    for label, decl in b.sources.items():
        existing = sources.get(label)
        if existing is None:
            sources[label] = decl
        elif existing.namespace != decl.namespace:
            raise PrefixConflict(label, existing.namespace.value, decl.namespace.value)

    placed: dict[Iri, tuple[str, str]] = {}  # iri -> (category, source id)
    merged: dict[str, list[tuple[Iri, str]]] = {}
    for category in ("classes", "object_properties", "data_properties", "individuals"):
        entries: list[tuple[Iri, str]] = []
        for iri, source_id in a.category(category) + b.category(category):
            earlier = placed.get(iri)
            if earlier is None:
                placed[iri] = (category, source_id)
                entries.append((iri, source_id))
            elif earlier != (category, source_id):
                raise ManifestError(
                    f"term {iri.value} declared as {earlier[0]}/{earlier[1]} "
                    f"and {category}/{source_id}"
                )
        merged[category] = entries
    return TermManifest(
        sources=sources,
        classes=tuple(merged["classes"]),
        object_properties=tuple(merged["object_properties"]),
        data_properties=tuple(merged["data_properties"]),
        individuals=tuple(merged["individuals"]),
    )


def empty_model() -> IterationModel:
    """The cumulative model before the first iteration: everything empty."""
    manifest = TermManifest(
        sources={},
        classes=(),
        object_properties=(),
        data_properties=(),
        individuals=(),
    )
    profile = ProfileGraph(graph=Graph(), stats=ProfileStats(0, 0, 0, 0))
    return IterationModel(manifest=manifest, profile=profile, data=Graph())


def _owner_of(focus: Iri, cases: Sequence[TestCase], fallback: int) -> int:
    """The earliest iteration whose exemplar data speaks about *focus*."""
    for case in sorted(cases, key=lambda tc: tc.id):
        if any(t.subject == focus for t in case.exemplar_data):
            return case.id
    return fallback


def merge_iteration(
    current: IterationModel, tc: TestCase, shapes: ShapeSet
) -> MergeOutcome:
    """Merge one iteration's modelet into the cumulative model.

    The manifests are unioned, the profile re-extracted from the union,
    and every bundle merged so far — the new one included — is re-checked
    against the merged model: the combined exemplar data must still
    conform to the shapes of all merged classes and to the closed
    vocabulary, and every bundle's queries must still answer as expected.
    Failures are returned as regressions attributed to the earliest
    bundle whose data exhibits them.
    """
    manifest = merge_manifests(current.manifest, tc.manifest)
    sources = load_sources(manifest)
    regressions: list[Regression] = []

    try:
        profile = extract_profile(manifest, sources)
    except MissingInSource as exc:
        profile = current.profile
        regressions.append(
            Regression(tc.id, "model", (Finding("MissingInSource", str(exc)),))
        )
    else:
        model_findings = tuple(
            Finding(f.kind, f.message)
            for f in check_consistency(profile, sources)
            if f.severity == "error"
        )
        if model_findings:
            regressions.append(Regression(tc.id, "model", model_findings))

    data = merge_graphs(current.data, tc.exemplar_data)
    cases = current.cases + (tc,)

    data_findings: dict[int, list[Finding]] = {}
    restricted = shapes.restrict({iri for iri, _ in manifest.classes})
    for violation in validate(data, restricted).violations:
        owner = _owner_of(violation.focus, cases, tc.id)
        data_findings.setdefault(owner, []).append(_violation_finding(violation))
    for subject, term in _closed_vocabulary_offences(data, manifest):
        owner = _owner_of(subject, cases, tc.id)
        data_findings.setdefault(owner, []).append(
            Finding(
                "closed_vocabulary",
                f"{subject.value} uses {term.value}, which the manifest does not select",
            )
        )
    for owner in sorted(data_findings):
        regressions.append(Regression(owner, "data", tuple(data_findings[owner])))

    for case in cases:
        outcome = run_query_test(case, graph=data)
        if not outcome.passed:
            regressions.append(Regression(case.id, "query", outcome.findings))

    merged = IterationModel(manifest=manifest, profile=profile, data=data, cases=cases)
    return MergeOutcome(merged=merged, regressions=tuple(regressions))


def run_harness(cases: Sequence[TestCase], shapes: ShapeSet) -> HarnessReport:
    """Check every bundle standalone, then merge them in iteration order."""
    ordered = sorted(cases, key=lambda tc: tc.id)
    reports = tuple(run_test_case(tc, shapes) for tc in ordered)
    model = empty_model()
    merges: list[MergeOutcome] = []
    for tc in ordered:
        outcome = merge_iteration(model, tc, shapes)
        merges.append(outcome)
        model = outcome.merged
    return HarnessReport(reports=reports, merges=tuple(merges), final=model)


# ---------------------------------------------------------------------------
# Reporting
# ---------------------------------------------------------------------------


def report_text(report: HarnessReport) -> str:
    """Human-readable run summary, one line per bundle and per merge."""
    lines: list[str] = []
    for test in report.reports:
        phases = ", ".join(
            f"{phase} {'PASS' if test.outcome(phase).passed else 'FAIL'}"
            for phase in _PHASES
        )
        lines.append(f"iteration {test.case_id}: {phases}")
        for phase in _PHASES:
            outcome = test.outcome(phase)
            for finding in outcome.findings:
                lines.append(f"  {phase} [{finding.kind}] {finding.message}")
            for warning in outcome.warnings:
                lines.append(f"  {phase} (warning) {warning}")
    for outcome, test in zip(report.merges, report.reports):
        stats = outcome.merged.stats
        status = "PASS" if outcome.passed else "FAIL"
        lines.append(
            f"merge after iteration {test.case_id}: {status} "
            f"(classes {stats[0]}, object_properties {stats[1]}, "
            f"data_properties {stats[2]}, individuals {stats[3]})"
        )
        for regression in outcome.regressions:
            for finding in regression.findings:
                lines.append(
                    f"  regression in iteration {regression.bundle_id} "
                    f"[{regression.phase}] ({finding.kind}) {finding.message}"
                )
    lines.append(f"result: {'PASS' if report.passed else 'FAIL'}")
    return "\n".join(lines) + "\n"


def report_json(report: HarnessReport) -> str:
    """Machine-readable run summary with the same content as the text form."""

    def outcome_doc(outcome: PhaseOutcome) -> dict:
        return {
            "passed": outcome.passed,
            "findings": [
                {"kind": f.kind, "message": f.message} for f in outcome.findings
            ],
            "warnings": list(outcome.warnings),
        }

    doc = {
        "passed": report.passed,
        "iterations": [
            {
                "id": test.case_id,
                "passed": test.passed,
                "phases": {
                    phase: outcome_doc(test.outcome(phase)) for phase in _PHASES
                },
            }
            for test in report.reports
        ],
        "merges": [
            {
                "after_iteration": test.case_id,
                "passed": outcome.passed,
                "stats": {
                    "classes": outcome.merged.stats[0],
                    "object_properties": outcome.merged.stats[1],
                    "data_properties": outcome.merged.stats[2],
                    "individuals": outcome.merged.stats[3],
                },
                "regressions": [
                    {
                        "iteration": regression.bundle_id,
                        "phase": regression.phase,
                        "findings": [
                            {"kind": f.kind, "message": f.message}
                            for f in regression.findings
                        ],
                    }
                    for regression in outcome.regressions
                ],
            }
            for outcome, test in zip(report.merges, report.reports)
        ],
    }
    return json.dumps(doc, indent=2)
