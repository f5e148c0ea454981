import json

import pytest
from click.testing import CliRunner

from cli import cli


@pytest.fixture
def runner():
    return CliRunner()


def invoke(runner, *args):
    return runner.invoke(cli, list(args), obj={})


def test_normalize_json(runner):
    result = invoke(runner, "--json", "normalize", "--k", "0", "--expr", "x+ . x+")
    assert result.exit_code == 0, result.output
    payload = json.loads(result.output)
    assert (payload["source"], payload["target"], payload["k"]) == ("UU", "UU", 0)
    assert len(payload["terms"]) == 2


def test_normalize_from_file(runner, tmp_path):
    path = tmp_path / "f.txt"
    path.write_text("x- . x+", encoding="utf-8")
    result = invoke(runner, "--json", "normalize", "--k", "1", "--file", str(path))
    assert result.exit_code == 0, result.output
    assert len(json.loads(result.output)["terms"]) == 1


def test_normalize_reports_syntax_errors(runner):
    result = invoke(runner, "normalize", "--k", "0", "--expr", "x+ . ")
    assert result.exit_code == 2
    assert "❌ DiagramSyntaxError" in result.output
    assert "error_id=" in result.output


def test_normalize_needs_one_input(runner):
    result = invoke(runner, "normalize", "--k", "0")
    assert result.exit_code == 2
    assert "ParameterMismatch" in result.output


def test_relations_braid(runner):
    result = invoke(runner, "--json", "relations", "--k", "0", "--suite", "braid")
    assert result.exit_code == 0, result.output
    payload = json.loads(result.output)
    assert payload["checks"]
    assert all(row["status"] == "pass" for row in payload["checks"])


def test_unknown_suite_is_a_usage_error(runner):
    result = invoke(runner, "run", "teleporting")
    assert result.exit_code == 2


def test_hecke_trace(runner):
    result = invoke(runner, "hecke", "trace", "--n", "0", "--cyclotomic", '{"coeffs": [1, 0, "t^2"]}', "x1^2")
    assert result.exit_code == 0, result.output
    assert result.output.strip() == "-t^2"


def test_bad_polynomial(runner):
    result = invoke(runner, "hecke", "trace", "--n", "0", "--cyclotomic", '{"coeffs": []}', "x1")
    assert result.exit_code == 2
    assert "ParameterMismatch" in result.output


def test_qgln_hc(runner):
    result = invoke(runner, "qgln", "hc", "--n", "1", "--m", "2", "--max-size", "2")
    assert result.exit_code == 0, result.output
    lines = result.output.strip().splitlines()
    assert len(lines) == 3
    assert all(line.endswith("| ok") for line in lines)


def test_bubble_series(runner):
    result = invoke(runner, "--json", "bubbles", "series", "--k", "1", "--order", "3")
    assert result.exit_code == 0, result.output
    payload = json.loads(result.output)
    assert payload["coefficients"]


def test_comult_center(runner):
    result = invoke(runner, "comult", "center", "--l", "1", "--m", "0", "--order", "2")
    assert result.exit_code == 0, result.output
    assert "w^" in result.output


def test_run_quick_suite(runner):
    result = invoke(runner, "--json", "--seed", "7", "run", "gcq", "--quick")
    assert result.exit_code == 0, result.output
    payload = json.loads(result.output)
    assert payload["suite"] == "gcq"
    assert payload["failed"] == 0
