"""End-to-end tests for the command-line interface.

Each test drives ``chadkit.cli.main`` with a real argv vector and asserts
on the exit code and captured output, exactly as a shell user or CI job
would observe them.
"""

import json
import shutil
from pathlib import Path

import pytest

from chadkit.cli import main
from chadkit.rdf import parse_document, serialize_graph
from tests.mutations import MUTATIONS

FIXTURES = Path(__file__).parent / "fixtures"
MANIFESTS = FIXTURES / "manifests"
TABLES = FIXTURES / "tables"
SHAPES = str(FIXTURES / "shapes" / "chad_shapes.json")
BUNDLES = FIXTURES / "bundles"
QUERIES = FIXTURES / "queries"

CONVERT_ARGS = [
    "convert",
    "--objects", str(TABLES / "objects.csv"),
    "--processes", str(TABLES / "process.csv"),
    "--mapping", str(FIXTURES / "mapping.json"),
    "--vocab", str(TABLES / "vocab.csv"),
]


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture(scope="module")
def converted(tmp_path_factory):
    """A conversion output directory shared by validate/query tests."""
    out_dir = tmp_path_factory.mktemp("kg")
    code = main(CONVERT_ARGS + ["--out-dir", str(out_dir)])
    assert code == 0
    return out_dir


# ---------------------------------------------------------------------------
# extract
# ---------------------------------------------------------------------------


def test_extract_desk_stats_line(capsys):
    code, out, err = run(capsys, "extract", "--manifest", MANIFESTS / "chad_ap_desk.json")
    assert code == 0
    assert out.splitlines()[0] == (
        '{"classes":21,"object_properties":6,"data_properties":0,"individuals":15}'
    )


def test_extract_full_writes_profile(capsys, tmp_path):
    out_file = tmp_path / "profile.ttl"
    code, out, err = run(
        capsys,
        "extract", "--manifest", MANIFESTS / "chad_ap_full.json", "--out", out_file,
    )
    assert code == 0
    assert out.splitlines()[0] == (
        '{"classes":25,"object_properties":28,"data_properties":5,"individuals":81}'
    )
    graph = parse_document(out_file.read_text(encoding="utf-8"))
    assert len(graph.triples) > 0


def test_extract_ntriples_output(capsys, tmp_path):
    out_file = tmp_path / "profile.nt"
    code, out, err = run(
        capsys,
        "extract",
        "--manifest", MANIFESTS / "chad_ap_desk.json",
        "--out", out_file,
        "--format", "ntriples",
    )
    assert code == 0
    first = out_file.read_text(encoding="utf-8").splitlines()[0]
    assert first.endswith(" .")
    assert first.startswith("<")


def test_extract_missing_manifest_is_usage_error(capsys, tmp_path):
    code, out, err = run(capsys, "extract", "--manifest", tmp_path / "nope.json")
    assert code == 2
    assert "error" in err


# ---------------------------------------------------------------------------
# convert
# ---------------------------------------------------------------------------


def test_convert_writes_graph(capsys, tmp_path):
    code, out, err = run(capsys, *CONVERT_ARGS, "--out-dir", tmp_path)
    assert code == 0
    graph_path = tmp_path / "data.ttl"
    assert f"wrote 562 triples to {graph_path}" in out
    graph = parse_document(graph_path.read_text(encoding="utf-8"))
    assert len(graph.triples) == 562


def test_convert_reports_rejected_rows(capsys, tmp_path):
    # Tamper the stage token of the terminal process row: that row is
    # rejected on its own without breaking any cross-row data reference.
    processes = tmp_path / "process.csv"
    text = (TABLES / "process.csv").read_text(encoding="utf-8")
    assert text.count("optimisation") == 1
    processes.write_text(
        text.replace("optimisation", "transmogrification"), encoding="utf-8"
    )

    out_dir = tmp_path / "kg"
    code, out, err = run(
        capsys,
        "convert",
        "--objects", TABLES / "objects.csv",
        "--processes", processes,
        "--mapping", FIXTURES / "mapping.json",
        "--vocab", TABLES / "vocab.csv",
        "--out-dir", out_dir,
    )
    assert code == 1
    assert "1 row(s) rejected" in err
    report = json.loads((out_dir / "errors.json").read_text(encoding="utf-8"))
    assert len(report) == 1
    entry = report[0]
    assert entry["kind"] == "UnknownVocabularyToken"
    assert entry["column"] == "stage"
    assert isinstance(entry["row"], int)
    assert "transmogrification" in entry["message"]
    # The graph for the surviving rows is still written.
    assert (out_dir / "data.ttl").is_file()


def test_convert_workers_do_not_change_bytes(capsys, tmp_path):
    outputs = []
    for workers in (1, 4):
        out_dir = tmp_path / f"w{workers}"
        code, out, err = run(
            capsys,
            *CONVERT_ARGS,
            "--out-dir", out_dir,
            "--format", "ntriples",
            "--workers", workers,
        )
        assert code == 0
        outputs.append((out_dir / "data.nt").read_bytes())
    assert outputs[0] == outputs[1]


def test_convert_missing_option_is_usage_error(capsys):
    code, out, err = run(capsys, "convert", "--objects", TABLES / "objects.csv")
    assert code == 2
    assert "missing required option --processes" in err


# ---------------------------------------------------------------------------
# validate
# ---------------------------------------------------------------------------


def test_validate_conforming(capsys, converted):
    code, out, err = run(
        capsys, "validate", "--data", converted / "data.ttl", "--shapes", SHAPES
    )
    assert code == 0
    assert "conforms: true" in out


def test_validate_mutated_graph_fails(capsys, converted, tmp_path):
    graph = parse_document((converted / "data.ttl").read_text(encoding="utf-8"))
    mutation = MUTATIONS[0]
    mutated = tmp_path / "mutated.ttl"
    mutated.write_text(serialize_graph(mutation.apply(graph), "turtle"), encoding="utf-8")
    code, out, err = run(capsys, "validate", "--data", mutated, "--shapes", SHAPES)
    assert code == 1
    assert "conforms: false" in out
    assert mutation.kind in out


def test_validate_json_report(capsys, converted):
    code, out, err = run(
        capsys,
        "validate",
        "--data", converted / "data.ttl",
        "--shapes", SHAPES,
        "--report", "json",
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["conforms"] is True


def test_validate_unparseable_data_is_usage_error(capsys, tmp_path):
    bad = tmp_path / "bad.ttl"
    bad.write_text("this is not turtle @@@", encoding="utf-8")
    code, out, err = run(capsys, "validate", "--data", bad, "--shapes", SHAPES)
    assert code == 2
    assert "ParseError" in err


# ---------------------------------------------------------------------------
# query
# ---------------------------------------------------------------------------


def test_query_prints_results_without_expected(capsys, converted):
    code, out, err = run(
        capsys, "query", "--data", converted / "data.ttl", "--query", QUERIES / "cq1.cq"
    )
    assert code == 0
    lines = out.splitlines()
    assert len(lines) >= 2  # header plus at least one answer row
    assert "\t" in lines[0] or lines[0]  # TSV header of variable names


def test_query_matches_expected(capsys, converted):
    code, out, err = run(
        capsys,
        "query",
        "--data", converted / "data.ttl",
        "--query", QUERIES / "cq1.cq",
        "--expected", QUERIES / "cq1.tsv",
    )
    assert code == 0
    assert out == ""


def test_query_mismatch_prints_diff(capsys, converted, tmp_path):
    expected = tmp_path / "expected.tsv"
    original = (QUERIES / "cq1.tsv").read_text(encoding="utf-8")
    surplus = "\t".join(
        "<https://example.org/aldrovandi/ghost>"
        for _ in original.splitlines()[0].split("\t")
    )
    expected.write_text(original + surplus + "\n", encoding="utf-8")
    code, out, err = run(
        capsys,
        "query",
        "--data", converted / "data.ttl",
        "--query", QUERIES / "cq1.cq",
        "--expected", expected,
    )
    assert code == 1
    assert "missing row" in out


def test_query_bad_syntax_is_usage_error(capsys, converted, tmp_path):
    bad = tmp_path / "bad.cq"
    bad.write_text("?x crm:P999_nope ?y .\n", encoding="utf-8")
    code, out, err = run(
        capsys, "query", "--data", converted / "data.ttl", "--query", bad
    )
    assert code == 2
    assert "QuerySyntaxError" in err


# ---------------------------------------------------------------------------
# test (iteration-bundle harness)
# ---------------------------------------------------------------------------


def test_harness_over_shipped_bundles(capsys):
    code, out, err = run(capsys, "test", "--bundles", BUNDLES, "--shapes", SHAPES)
    assert code == 0
    assert out.rstrip().endswith("result: PASS")


def test_harness_json_report(capsys):
    code, out, err = run(
        capsys, "test", "--bundles", BUNDLES, "--shapes", SHAPES, "--report", "json"
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["passed"] is True
    assert len(doc["iterations"]) == 8


def test_harness_regression_detected(capsys, tmp_path):
    # Bundle manifests locate their sources by relative path, so mirror
    # the fixture layout: bundles/ and sources/ as siblings.
    shutil.copytree(BUNDLES, tmp_path / "bundles")
    shutil.copytree(FIXTURES / "sources", tmp_path / "sources")
    shutil.copytree(
        FIXTURES / "regression" / "iteration-9", tmp_path / "bundles" / "iteration-9"
    )
    code, out, err = run(
        capsys, "test", "--bundles", tmp_path / "bundles", "--shapes", SHAPES
    )
    assert code == 1
    assert "regression in iteration 1 [data]" in out
    assert out.rstrip().endswith("result: FAIL")


def test_harness_empty_directory_warns(capsys, tmp_path):
    code, out, err = run(capsys, "test", "--bundles", tmp_path, "--shapes", SHAPES)
    assert code == 0
    assert "warning: no bundles found" in err


def test_harness_missing_directory_is_usage_error(capsys, tmp_path):
    code, out, err = run(
        capsys, "test", "--bundles", tmp_path / "absent", "--shapes", SHAPES
    )
    assert code == 2
    assert "does not exist" in err


# ---------------------------------------------------------------------------
# config file
# ---------------------------------------------------------------------------


def test_config_supplies_default_format(capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    (tmp_path / "chad.json").write_text('{"format": "ntriples"}', encoding="utf-8")
    out_dir = tmp_path / "kg"
    code, out, err = run(capsys, *CONVERT_ARGS, "--out-dir", out_dir)
    assert code == 0
    assert (out_dir / "data.nt").is_file()
    assert not (out_dir / "data.ttl").exists()


def test_flag_overrides_config(capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    (tmp_path / "chad.json").write_text('{"format": "ntriples"}', encoding="utf-8")
    out_dir = tmp_path / "kg"
    code, out, err = run(capsys, *CONVERT_ARGS, "--out-dir", out_dir, "--format", "turtle")
    assert code == 0
    assert (out_dir / "data.ttl").is_file()
    assert not (out_dir / "data.nt").exists()


def test_explicit_config_path(capsys, tmp_path):
    config = tmp_path / "custom.json"
    config.write_text('{"format": "ntriples"}', encoding="utf-8")
    out_dir = tmp_path / "kg"
    code, out, err = run(
        capsys, "--config", config, *CONVERT_ARGS, "--out-dir", out_dir
    )
    assert code == 0
    assert (out_dir / "data.nt").is_file()


def test_invalid_config_is_usage_error(capsys, tmp_path):
    config = tmp_path / "broken.json"
    config.write_text("{not json", encoding="utf-8")
    code, out, err = run(
        capsys, "--config", config, "extract", "--manifest", MANIFESTS / "chad_ap_desk.json"
    )
    assert code == 2
    assert "not valid JSON" in err


def test_config_must_be_object(capsys, tmp_path):
    config = tmp_path / "list.json"
    config.write_text("[1, 2]", encoding="utf-8")
    code, out, err = run(
        capsys, "--config", config, "extract", "--manifest", MANIFESTS / "chad_ap_desk.json"
    )
    assert code == 2
    assert "must hold a JSON object" in err
