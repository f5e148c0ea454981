import json

import pytest

from activity_logger import ActivityLogger
from cache_manager import CacheManager
from error_handler import (
    ErrorHandler,
    ErrorSeverity,
    FormulaMismatch,
    HeisError,
    LevelUnderflow,
    NonTermination,
    ParameterMismatch,
    TypeMismatch,
    UnknownSuite,
)
from heis_defaults import (
    DEFAULT_BUDGET,
    DEFAULT_LOG_DIR,
    DEFAULT_SEED,
    SUITE_DEFAULTS,
    normalize_budget,
    normalize_log_dir,
    normalize_seed,
    normalize_threads,
    suite_defaults,
)
from suites import (
    CheckResult,
    PolynomialSpec,
    SuiteConfig,
    SuiteReport,
    load_polynomial,
    load_suite_config,
    run_suite,
    suite_params,
)


# ============ error_handler ============

@pytest.mark.parametrize(
    "error,severity",
    [
        (NonTermination("budget", budget=3), ErrorSeverity.CRITICAL),
        (FormulaMismatch("x"), ErrorSeverity.CRITICAL),
        (TypeMismatch("x"), ErrorSeverity.WARNING),
        (ParameterMismatch("x"), ErrorSeverity.WARNING),
        (LevelUnderflow("x"), ErrorSeverity.ERROR),
        (RuntimeError("x"), ErrorSeverity.ERROR),
    ],
)
def test_classify(error, severity):
    assert ErrorHandler.classify(error) == severity


def test_handle_exception_records_and_persists(tmp_path):
    handler = ErrorHandler(log_dir=str(tmp_path))
    error_id = handler.handle_exception(UnknownSuite("nope"), "run nope")
    assert error_id.startswith("err_")
    entry = handler.get_error_log(error_id)
    assert entry["error_type"] == "UnknownSuite"
    assert entry["severity"] == "warning"
    assert handler.get_error_stats()["by_context"] == {"run nope": 1}
    assert handler.get_errors_by_context("run")[0]["error_id"] == error_id
    lines = (tmp_path / "errors.jsonl").read_text(encoding="utf-8").splitlines()
    assert json.loads(lines[-1])["error_id"] == error_id


def test_handled_errors_keep_their_diagnostics(tmp_path):
    handler = ErrorHandler(log_dir=str(tmp_path))
    error_id = handler.handle_exception(TypeMismatch("bad boundary", expected="U", found="D"), "normalize")
    assert handler.get_error_log(error_id)["details"] == {"expected": "U", "found": "D"}
    error_id = handler.handle_exception(NonTermination("out of steps", budget=5), "normalize")
    assert handler.get_error_log(error_id)["details"] == {"budget": "5"}
    stats = handler.get_error_stats()
    assert stats["by_type"] == {"TypeMismatch": 1, "NonTermination": 1}
    assert stats["by_severity"] == {"warning": 1, "critical": 1}


def test_every_error_is_a_heis_error():
    assert issubclass(UnknownSuite, HeisError)
    assert TypeMismatch("x", expected="U", found="D").found == "D"


# ============ activity_logger ============

def test_activity_log_tracks_checks(tmp_path):
    logger = ActivityLogger(log_dir=str(tmp_path), persist=True)
    logger.log_suite_started("r1", "braid", {"k_values": [0]})
    logger.log_check("r1", "braid", "braid.k0", True, 0.01)
    logger.log_check("r1", "braid", "braid.k1", False, 0.02, residual="x" * 500)
    logger.log_suite_finished("r1", "braid", 1, 1)

    failed = logger.get_failed_checks("r1")
    assert [a["check_id"] for a in failed] == ["braid.k1"]
    assert len(failed[0]["details"]["residual"]) == 200

    stats = logger.get_run_stats("r1")
    assert stats["total"] == 4
    assert stats["by_type"]["check_passed"] == 1
    assert (tmp_path / "r1_activity.jsonl").exists()
    assert logger.get_run_activities("other") == []


# ============ cache_manager ============

def test_get_or_compute_counts_hits():
    cache = CacheManager(maxsize=8)
    calls = []

    def compute():
        calls.append(1)
        return 42

    assert cache.get_or_compute("ns", ("a", 1), compute) == 42
    assert cache.get_or_compute("ns", ("a", 1), compute) == 42
    assert len(calls) == 1
    assert cache.get_stats()["ns"] == {"hits": 1, "misses": 1, "size": 1}


def test_clear_resets_a_namespace():
    cache = CacheManager()
    cache.put("a", 1, "x")
    cache.put("b", 1, "y")
    cache.clear("a")
    assert cache.get("a", 1) is None
    assert cache.get("b", 1) == "y"
    cache.clear()
    assert cache.get_stats()["b"]["size"] == 0


# ============ heis_defaults ============

@pytest.mark.parametrize("raw", ["", "abc", "0", "-4"])
def test_malformed_numbers_fall_back(raw):
    assert normalize_threads(raw) == 1
    assert normalize_budget(raw) == DEFAULT_BUDGET


def test_seed_accepts_zero():
    assert normalize_seed("0") == 0
    assert normalize_seed("seed") == DEFAULT_SEED
    assert normalize_budget(" 50 ") == 50


def test_log_dir():
    assert normalize_log_dir("  ") == DEFAULT_LOG_DIR
    assert normalize_log_dir("out") == "out"


def test_quick_defaults_are_smaller():
    full = suite_defaults("bubbles")
    quick = suite_defaults("bubbles", quick=True)
    assert quick["order"] < full["order"]
    full["order"] = -1
    assert SUITE_DEFAULTS["bubbles"]["order"] == 8


# ============ suites configuration ============

def test_polynomial_spec():
    spec = load_polynomial('{"coeffs": [1, "z", "t^2"]}')
    assert isinstance(spec, PolynomialSpec)
    assert spec.coeffs == [1, "z", "t^2"]


@pytest.mark.parametrize("text", ['{"coeffs": []}', "{not json", '{"coeffs": [[1]]}'])
def test_bad_polynomials(text):
    with pytest.raises(ParameterMismatch):
        load_polynomial(text)


def test_polynomial_from_file(tmp_path):
    path = tmp_path / "f.json"
    path.write_text('{"coeffs": [1, 0, "t^2"]}', encoding="utf-8")
    assert load_polynomial(str(path)).coeffs == [1, 0, "t^2"]


def test_suite_params_merge_overrides():
    config = SuiteConfig()
    params = suite_params("bubbles", quick=True, config=config, order=5, seed=None, budget=9)
    assert params.order == 5
    assert params.budget == 9
    assert params.k_values == [-1, 0, 1]
    assert params.quick


def test_suite_params_are_validated():
    with pytest.raises(ParameterMismatch):
        suite_params("curls", config=SuiteConfig(), dot_bound=7)
    with pytest.raises(ParameterMismatch):
        suite_params("hecke", config=SuiteConfig(), levels=[0])


def test_config_rejects_unknown_suites(tmp_path):
    path = tmp_path / "suites.json"
    path.write_text(json.dumps({"suites": {"teleporting": {}}}), encoding="utf-8")
    with pytest.raises(ParameterMismatch):
        load_suite_config(str(path))


def test_missing_config_gives_defaults(tmp_path):
    config = load_suite_config(str(tmp_path / "absent.json"))
    assert config.params_for("gcq") == SUITE_DEFAULTS["gcq"]


# ============ reports ============

def test_report_orders_results_and_sets_exit_code():
    report = SuiteReport("braid", [CheckResult("b", True), CheckResult("a", False, residual="z")])
    assert [r.check_id for r in report.results] == ["a", "b"]
    assert (report.passed, report.failed, report.exit_code) == (1, 1, 1)
    data = json.loads(report.to_json())
    assert data["checks"][0] == {"check_id": "a", "status": "fail", "residual": "z", "seconds": 0.0}


def test_run_unknown_suite():
    with pytest.raises(UnknownSuite):
        run_suite("teleporting")


def test_run_braid_suite():
    params = suite_params("braid", quick=True, config=SuiteConfig(), k_values=[0])
    report = run_suite("braid", params, run_id="test-braid")
    assert report.results
    assert report.ok, [r.to_dict() for r in report.results if not r.passed]
