"""Command-line entry point orchestrating the toolkit for curators and CI.

Subcommands cover the pipeline end to end: ``extract`` a profile from the
source ontologies, ``convert`` tabular records to a knowledge graph,
``validate`` a graph against the shape catalogue, ``query`` it with a
competency question, and ``test`` a directory of iteration bundles.

Exit codes are a stable contract for CI: 0 on success, 1 when the domain
check fails (consistency findings, rejected rows, shape violations,
answer diffs, harness regressions), 2 on usage or input errors.

Options may be preset in an optional ``chad.json`` next to the working
directory (or named via ``--config``); command-line flags win over the
config file, which wins over built-in defaults.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import samod, shapes as shapes_mod
from .errors import ChadError, MissingInSource
from .ingest import bind_records, load_vocabulary, parse_table
from .lowering import convert_dataset, load_mapping
from .profile import check_consistency, extract_profile, load_manifest, load_sources
from .query import compare_results, execute, format_results, parse_query
from .rdf import parse_document, serialize_graph

__all__ = ["main"]

_DEFAULTS = {
    "format": "turtle",
    "report": "text",
    "workers": 1,
    "delimiter": ";",
}

#: Errors that mean the inputs could not even be read or parsed, as
#: opposed to domain verdicts about well-formed inputs.
_INPUT_ERRORS = (
    "ParseError",
    "PrefixConflict",
    "ManifestError",
    "SourceUnavailable",
    "HeaderMismatch",
    "CsvSyntaxError",
    "MappingError",
    "ShapeSchemaError",
    "QuerySyntaxError",
    "UnboundVariable",
    "ExpectedFileMalformed",
    "BundleLayoutError",
)


class _UsageError(Exception):
    """Bad invocation or unreadable input; maps to exit code 2."""


def _resolve(args: argparse.Namespace, config: dict) -> argparse.Namespace:
    """Apply precedence: explicit flags, then config file, then defaults."""
    for key, value in vars(args).items():
        if value is not None:
            continue
        if key in config:
            setattr(args, key, config[key])
        elif key in _DEFAULTS:
            setattr(args, key, _DEFAULTS[key])
    return args


def _load_config(path: Optional[str]) -> dict:
    candidate = Path(path) if path else Path("chad.json")
    if path is None and not candidate.is_file():
        return {}
    try:
        doc = json.loads(candidate.read_text(encoding="utf-8"))
    except OSError as exc:
        raise _UsageError(f"cannot read config {candidate}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise _UsageError(f"config {candidate} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise _UsageError(f"config {candidate} must hold a JSON object")
    return doc


def _require(args: argparse.Namespace, *names: str) -> None:
    for name in names:
        if getattr(args, name) is None:
            raise _UsageError(f"missing required option --{name.replace('_', '-')}")


def _read_text(path: str, role: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _UsageError(f"cannot read {role} {path}: {exc}") from exc


def _read_bytes(path: str, role: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise _UsageError(f"cannot read {role} {path}: {exc}") from exc


def _graph_filename(fmt: str) -> str:
    return "data.ttl" if fmt == "turtle" else "data.nt"


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_extract(args: argparse.Namespace) -> int:
    _require(args, "manifest")
    if not Path(args.manifest).is_file():
        raise _UsageError(f"manifest {args.manifest} does not exist")
    manifest = load_manifest(args.manifest)
    sources = load_sources(manifest)
    try:
        profile = extract_profile(manifest, sources)
    except MissingInSource as exc:
        print(f"MissingInSource: {exc}", file=sys.stderr)
        return 1
    print(profile.stats.as_json())
    for warning in profile.warnings:
        print(f"warning: {warning.message}", file=sys.stderr)
    if args.out:
        Path(args.out).write_text(
            serialize_graph(profile.graph, args.format), encoding="utf-8"
        )
    findings = [
        finding
        for finding in check_consistency(profile, sources)
        if finding.severity == "error"
    ]
    for finding in findings:
        print(f"{finding.kind}: {finding.message}", file=sys.stderr)
    return 1 if findings else 0


def cmd_convert(args: argparse.Namespace) -> int:
    _require(args, "objects", "processes", "mapping", "vocab", "out_dir")
    vocab = load_vocabulary(args.vocab)
    object_rows = parse_table(_read_bytes(args.objects, "objects table"), "object")
    process_rows = parse_table(_read_bytes(args.processes, "process table"), "process")
    objects, object_errors = bind_records(
        object_rows, "object", vocab, delimiter=args.delimiter
    )
    processes, process_errors = bind_records(
        process_rows, "process", vocab, delimiter=args.delimiter
    )
    policy, table = load_mapping(args.mapping)
    graph = convert_dataset(objects, processes, policy, table, workers=args.workers)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    graph_path = out_dir / _graph_filename(args.format)
    graph_path.write_text(serialize_graph(graph, args.format), encoding="utf-8")

    errors = object_errors + process_errors
    if errors:
        report = [
            {
                "kind": e.kind,
                "row": e.row,
                "column": e.column,
                "message": e.message,
            }
            for e in errors
        ]
        (out_dir / "errors.json").write_text(
            json.dumps(report, indent=2) + "\n", encoding="utf-8"
        )
        print(
            f"{len(errors)} row(s) rejected; see {out_dir / 'errors.json'}",
            file=sys.stderr,
        )
        return 1
    print(f"wrote {len(graph.triples)} triples to {graph_path}")
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    _require(args, "data", "shapes")
    graph = parse_document(_read_text(args.data, "data graph"))
    catalogue = shapes_mod.load_shapes(args.shapes)
    report = shapes_mod.validate(graph, catalogue)
    if args.report == "json":
        print(shapes_mod.report_json(report))
    else:
        print(shapes_mod.report_text(report), end="")
    return 0 if report.conforms else 1


def cmd_query(args: argparse.Namespace) -> int:
    _require(args, "data", "query")
    graph = parse_document(_read_text(args.data, "data graph"))
    query = parse_query(_read_text(args.query, "query"))
    table = execute(query, graph)
    if args.expected is None:
        print(format_results(table), end="")
        return 0
    diff = compare_results(table, Path(args.expected))
    for line in diff:
        print(line)
    return 1 if diff else 0


def cmd_test(args: argparse.Namespace) -> int:
    _require(args, "bundles", "shapes")
    if not Path(args.bundles).is_dir():
        raise _UsageError(f"bundle directory {args.bundles} does not exist")
    catalogue = shapes_mod.load_shapes(args.shapes)
    cases = samod.load_bundles(args.bundles)
    if not cases:
        print("warning: no bundles found", file=sys.stderr)
        return 0
    report = samod.run_harness(cases, catalogue)
    if args.report == "json":
        print(samod.report_json(report))
    else:
        print(samod.report_text(report), end="")
    return 0 if report.passed else 1


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chadkit",
        description="Knowledge-graph construction toolkit for cultural heritage data.",
    )
    parser.add_argument("--config", help="path to a chad.json options file")
    commands = parser.add_subparsers(dest="command", required=True)

    extract = commands.add_parser(
        "extract", help="extract an application profile from its sources"
    )
    extract.add_argument("--manifest", help="term manifest JSON")
    extract.add_argument("--out", help="write the profile graph here")
    extract.add_argument("--format", choices=["turtle", "ntriples"])
    extract.set_defaults(handler=cmd_extract)

    convert = commands.add_parser(
        "convert", help="convert object/process tables to a knowledge graph"
    )
    convert.add_argument("--objects", help="objects CSV")
    convert.add_argument("--processes", help="process CSV")
    convert.add_argument("--mapping", help="mapping JSON")
    convert.add_argument("--vocab", help="vocabulary token table CSV")
    convert.add_argument("--out-dir", dest="out_dir", help="output directory")
    convert.add_argument("--delimiter", help="multi-value cell separator")
    convert.add_argument("--workers", type=int, help="parallel row lowering")
    convert.add_argument("--format", choices=["turtle", "ntriples"])
    convert.set_defaults(handler=cmd_convert)

    validate = commands.add_parser(
        "validate", help="validate a graph against the shape catalogue"
    )
    validate.add_argument("--data", help="data graph (Turtle or N-Triples)")
    validate.add_argument("--shapes", help="shape catalogue JSON")
    validate.add_argument("--report", choices=["text", "json"])
    validate.add_argument(
        "--workers",
        type=int,
        help="accepted for symmetry; validation output is independent of it",
    )
    validate.set_defaults(handler=cmd_validate)

    query = commands.add_parser(
        "query", help="run a competency question over a data graph"
    )
    query.add_argument("--data", help="data graph (Turtle or N-Triples)")
    query.add_argument("--query", help="query file")
    query.add_argument("--expected", help="expected-answers TSV to diff against")
    query.set_defaults(handler=cmd_query)

    test = commands.add_parser(
        "test", help="run the iteration-bundle harness over a directory"
    )
    test.add_argument("--bundles", help="directory of iteration bundles")
    test.add_argument("--shapes", help="shape catalogue JSON")
    test.add_argument("--report", choices=["text", "json"])
    test.set_defaults(handler=cmd_test)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config = _load_config(args.config)
        _resolve(args, config)
        return args.handler(args)
    except _UsageError as exc:
        print(f"chadkit: error: {exc}", file=sys.stderr)
        return 2
    except ChadError as exc:
        kind = type(exc).__name__
        print(f"chadkit: {kind}: {exc}", file=sys.stderr)
        return 2 if kind in _INPUT_ERRORS else 1
    except OSError as exc:
        print(f"chadkit: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
