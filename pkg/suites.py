"""
Suites: acceptance-check runner, suite configuration and reports.
"""

import json
import logging
import os
import random
import time
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, Field, ValidationError, field_validator
from tqdm import tqdm

from action import (
    faithfulness_trials,
    functoriality_trials,
    gcq_series,
    relation_matrices,
    separation_rank,
    soundness_trials,
    vacuum_eval,
)
from activity_logger import activity_logger
from diagrams import Morphism
from error_handler import HeisError, ParameterMismatch, UnknownSuite, error_handler
from hecke import (
    CyclotomicPoly,
    HeckeElement,
    ak_basis,
    cyclotomic_reduce,
    hecke_mul,
    mackey_matrix_rank,
    trace,
)
from heis_defaults import (
    COMULT_PAIRS,
    GENERIC_T,
    GENERIC_Z,
    K_RANGE,
    QUICK_OVERRIDES,
    SUITE_DEFAULTS,
    normalize_budget,
    normalize_seed,
    normalize_threads,
    suite_defaults,
)
from qgln import center_report, heis0_functor_check, hc_table, rcheck_report
from relations import check_relation, relations_in
from rewrite import confluence_mismatches
from symfunc import (
    CCW,
    CW,
    MINUS,
    PLUS,
    beta_image_rank,
    bubble_series,
    comult_apply,
    comult_center,
    comult_generator,
    generator_symsym,
    series_mul_truncated,
)

logger = logging.getLogger("heiscat.suites")

SUITE_NAMES = (
    "core-relations",
    "curls",
    "bubbles",
    "braid",
    "hecke",
    "action-oracle",
    "qgln",
    "gcq",
    "comult-center",
)

CONFIG_FILE = os.path.join("config", "suites.json")

# relation table behind each diagrammatic suite
_RELATION_SUITES = {"core-relations": "core", "curls": "curls", "bubbles": "bubbles", "braid": "braid"}


# ============ Configuration models ============

class PolynomialSpec(BaseModel):
    """`{"coeffs": [f_0, ..., f_l]}`, leading coefficient first; entries are ints or scalar text."""
    coeffs: List[Union[int, str]]

    @field_validator("coeffs")
    @classmethod
    def _not_empty(cls, value: List[Union[int, str]]) -> List[Union[int, str]]:
        if not value:
            raise ValueError("coeffs must not be empty")
        return value

    def cyclotomic(self) -> CyclotomicPoly:
        return CyclotomicPoly(self.coeffs)


class SuiteParams(BaseModel):
    k_values: List[int] = Field(default_factory=lambda: list(K_RANGE))
    dot_bound: int = Field(3, ge=0, le=3)
    order: int = Field(6, ge=0, le=20)
    vacuum_order: int = Field(4, ge=1, le=12)
    max_l: int = Field(3, ge=1, le=4)
    max_n: int = Field(3, ge=0, le=4)
    samples: int = Field(100, ge=0)
    levels: List[int] = Field(default_factory=lambda: [1, 2])
    max_m: int = Field(3, ge=0, le=6)
    max_len: int = Field(3, ge=0, le=4)
    seed: int = Field(default_factory=lambda: normalize_seed(), ge=0)
    budget: int = Field(default_factory=lambda: normalize_budget(), ge=1)
    quick: bool = False
    threads: int = Field(default_factory=lambda: normalize_threads(), ge=1)

    @field_validator("levels")
    @classmethod
    def _positive_levels(cls, value: List[int]) -> List[int]:
        if any(level < 1 for level in value):
            raise ValueError("levels must be positive")
        return value


class SuiteConfig(BaseModel):
    """Contents of config/suites.json: full-size defaults and their quick overrides."""
    suites: Dict[str, Dict[str, Any]] = Field(default_factory=lambda: {k: dict(v) for k, v in SUITE_DEFAULTS.items()})
    quick: Dict[str, Dict[str, Any]] = Field(default_factory=lambda: {k: dict(v) for k, v in QUICK_OVERRIDES.items()})

    @field_validator("suites", "quick")
    @classmethod
    def _known_suites(cls, value: Dict[str, Dict[str, Any]]) -> Dict[str, Dict[str, Any]]:
        unknown = sorted(set(value) - set(SUITE_NAMES))
        if unknown:
            raise ValueError(f"unknown suites: {', '.join(unknown)}")
        return value

    def params_for(self, name: str, quick: bool = False) -> Dict[str, Any]:
        params = suite_defaults(name, quick)
        params.update(self.suites.get(name, {}))
        if quick:
            params.update(self.quick.get(name, {}))
        return params


def load_polynomial(data: Union[str, Dict]) -> PolynomialSpec:
    """Validate polynomial JSON given as text, a file path or an already-parsed dict."""
    try:
        if isinstance(data, str):
            if os.path.exists(data):
                with open(data, "r", encoding="utf-8") as f:
                    data = json.load(f)
            else:
                data = json.loads(data)
        return PolynomialSpec.model_validate(data)
    except json.JSONDecodeError as e:
        raise ParameterMismatch(f"polynomial JSON is malformed: {e}") from e
    except ValidationError as e:
        raise ParameterMismatch(f"invalid polynomial: {e.errors()[0]['msg']}") from e


def load_suite_config(path: str = CONFIG_FILE, run_id: Optional[str] = None) -> SuiteConfig:
    if not os.path.exists(path):
        return SuiteConfig()
    try:
        with open(path, "r", encoding="utf-8") as f:
            config = SuiteConfig.model_validate(json.load(f))
    except json.JSONDecodeError as e:
        raise ParameterMismatch(f"{path} is not valid JSON: {e}") from e
    except ValidationError as e:
        raise ParameterMismatch(f"{path}: {e.errors()[0]['msg']}") from e
    if run_id:
        activity_logger.log_config_loaded(run_id, path)
    return config


def suite_params(name: str, quick: bool = False, config: Optional[SuiteConfig] = None,
                 **overrides) -> SuiteParams:
    """Defaults for a suite, then config/suites.json, then explicit overrides (None means unset)."""
    config = config or load_suite_config()
    merged = config.params_for(name, quick) if name in SUITE_NAMES else {}
    merged.update({key: value for key, value in overrides.items() if value is not None})
    merged["quick"] = quick
    try:
        return SuiteParams(**merged)
    except ValidationError as e:
        raise ParameterMismatch(f"invalid parameters for {name}: {e.errors()[0]['msg']}") from e


# ============ Reports ============

@dataclass
class CheckResult:
    check_id: str
    passed: bool
    residual: str = ""
    seconds: float = 0.0

    def to_dict(self) -> Dict:
        return {
            "check_id": self.check_id,
            "status": "pass" if self.passed else "fail",
            "residual": "" if self.passed else self.residual,
            "seconds": round(self.seconds, 6),
        }


@dataclass
class SuiteReport:
    suite: str
    results: List[CheckResult] = field(default_factory=list)
    params: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.results = sorted(self.results, key=lambda r: r.check_id)

    @property
    def passed(self) -> int:
        return sum(1 for r in self.results if r.passed)

    @property
    def failed(self) -> int:
        return len(self.results) - self.passed

    @property
    def ok(self) -> bool:
        return self.failed == 0

    @property
    def exit_code(self) -> int:
        return 0 if self.ok else 1

    def to_dict(self) -> Dict:
        return {
            "suite": self.suite,
            "ok": self.ok,
            "passed": self.passed,
            "failed": self.failed,
            "params": self.params,
            "checks": [r.to_dict() for r in self.results],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, ensure_ascii=False)

    def render(self, verbose: bool = False) -> str:
        lines = []
        for r in self.results:
            if r.passed and not verbose:
                continue
            mark = "✅" if r.passed else "❌"
            line = f"{mark} {r.check_id} ({r.seconds:.2f}s)"
            if not r.passed and r.residual:
                line += f": {r.residual}"
            lines.append(line)
        status = "✅" if self.ok else "❌"
        lines.append(f"{status} {self.suite}: {self.passed} passed, {self.failed} failed")
        return "\n".join(lines)


# ============ Check builders ============

# a check returns (passed, residual text)
Outcome = Tuple[bool, str]
Task = Tuple[str, Callable[[], Outcome]]

HECKE_POINT = {"z": GENERIC_Z, "t": GENERIC_T}


def _report_outcome(report) -> Outcome:
    return report.ok, "; ".join(report.failures[:5])


def sample_polynomial(l: int) -> List[Union[int, str]]:
    """Degree-l test polynomial with f_0 = 1 and f_l = t^2."""
    return [1] + ["z"] * (l - 1) + ["t^2"]


def _relation_tasks(name: str, params: SuiteParams) -> List[Task]:
    tasks: List[Task] = []
    for k in params.k_values:
        for relation in relations_in(_RELATION_SUITES[name]):
            labels = tuple(a for a in relation.labels if abs(a) <= params.dot_bound)
            for a in labels:
                single = replace(relation, labels=(a,))
                tag = relation.name if relation.labels == (0,) else f"{relation.name}[{a}]"

                def check(single=single, k=k) -> Outcome:
                    results = check_relation(single, k, params.budget)
                    failures = [r for r in results if not r.passed]
                    residual = "; ".join(
                        r.error or (r.residual.render() if r.residual is not None else "") for r in failures
                    )
                    return not failures, residual

                tasks.append((f"{name}/k={k}/{tag}", check))
    return tasks


def _core_tasks(params: SuiteParams) -> List[Task]:
    tasks = _relation_tasks("core-relations", params)
    per_k = max(1, params.samples // max(1, len(params.k_values))) if params.samples else 0
    for k in params.k_values if per_k else ():
        def confluence(k=k) -> Outcome:
            mismatches = confluence_mismatches(k, per_k, params.seed + k, params.budget)
            return not mismatches, "; ".join(mismatches[:3])

        tasks.append((f"core-relations/k={k}/confluence", confluence))
    return tasks


def _bubble_tasks(params: SuiteParams) -> List[Task]:
    tasks = _relation_tasks("bubbles", params)
    for k in params.k_values:
        for sign in (PLUS, MINUS):
            def grassmannian(k=k, sign=sign) -> Outcome:
                product = series_mul_truncated(
                    bubble_series(k, CCW, sign, params.order), bubble_series(k, CW, sign, params.order), params.order
                )
                return product.is_one(), "" if product.is_one() else repr(product)

            tasks.append((f"bubbles/k={k}/grassmannian-series{sign}", grassmannian))
    for family in (CCW, CW):
        def beta(family=family) -> Outcome:
            count, rank = beta_image_rank(min(4, params.order), family)
            return count == rank, f"rank {rank} of {count} monomials"

        tasks.append((f"bubbles/beta-injective-{'ccw' if family == CCW else 'cw'}", beta))
    return tasks


def _random_hecke(rng: random.Random, n: int, l: int, terms: int = 2) -> HeckeElement:
    total = HeckeElement.zero(n)
    for _ in range(terms):
        r = [rng.randint(-1, l) for _ in range(n)]
        word = [rng.randint(1, n - 1) for _ in range(rng.randint(0, n))] if n > 1 else []
        term = HeckeElement.monomial(r) * HeckeElement.tau_word(word, n)
        total = total + term.scale(rng.choice((1, -1, 2)))
    return total


def _hecke_tasks(params: SuiteParams) -> List[Task]:
    tasks: List[Task] = []
    per_case = max(1, params.samples // max(1, params.max_l * params.max_n))
    for l in range(1, params.max_l + 1):
        f = CyclotomicPoly(sample_polynomial(l))
        for n in range(1, params.max_n + 1):
            tag = f"hecke/l={l}/n={n}"

            def spanning(f=f, n=n, l=l) -> Outcome:
                rng = random.Random(params.seed + 31 * l + n)
                keys = set(ak_basis(n, l))
                factorial = 1
                for i in range(2, n + 1):
                    factorial *= i
                if len(keys) != l ** n * factorial:
                    return False, f"basis has {len(keys)} elements"
                for _ in range(per_case):
                    reduced = cyclotomic_reduce(_random_hecke(rng, n, l), f)
                    stray = [key for key, _ in reduced.items() if key not in keys]
                    if stray:
                        return False, f"reduction left {stray[0]} outside the basis"
                return True, ""

            def associativity(f=f, n=n, l=l) -> Outcome:
                rng = random.Random(params.seed + 17 * l + n)
                for i in range(per_case):
                    a, b, c = (_random_hecke(rng, n, l) for _ in range(3))
                    if hecke_mul(hecke_mul(a, b, f), c, f) != hecke_mul(a, hecke_mul(b, c, f), f):
                        return False, f"sample {i}"
                return True, ""

            tasks.append((f"{tag}/spanning", spanning))
            tasks.append((f"{tag}/associativity", associativity))
            if n >= 2:
                def conjugation(f=f, n=n) -> Outcome:
                    tau = HeckeElement.tau(1, n)
                    lhs = hecke_mul(hecke_mul(tau, HeckeElement.x(1, n), f), tau, f)
                    return lhs == cyclotomic_reduce(HeckeElement.x(2, n), f), str(lhs)

                tasks.append((f"{tag}/conjugation", conjugation))
        for n in range(params.max_n):
            def trace_vanishes(f=f, n=n) -> Outcome:
                value = trace(f.evaluate_x(n + 1, n + 1), f)
                return value.is_zero(), str(value)

            def mackey(f=f, n=n) -> Outcome:
                rank, dim = mackey_matrix_rank(n, f, HECKE_POINT)
                return rank == dim, f"rank {rank} of {dim}"

            tasks.append((f"hecke/l={l}/n={n}/trace-of-f", trace_vanishes))
            tasks.append((f"hecke/l={l}/n={n}/mackey", mackey))
    return tasks


def _oracle_tasks(params: SuiteParams, run_id: str) -> List[Task]:
    tasks: List[Task] = []
    for l in params.levels:
        f = CyclotomicPoly(sample_polynomial(l))
        for n in range(params.max_n + 1):
            def separation(f=f, n=n) -> Outcome:
                rank, count = separation_rank(f, n)
                return rank == count, f"rank {rank} of {count}"

            tasks.append((f"action-oracle/l={l}/n={n}/separation", separation))
            tasks.append((f"action-oracle/l={l}/n={n}/relations",
                          lambda f=f, n=n: _report_outcome(relation_matrices(f, n, ("core",)))))

        def soundness(f=f, l=l) -> Outcome:
            report = soundness_trials(f, params.samples, params.seed + l, 0, params.budget)
            activity_logger.log_oracle_run(run_id, -l, report.checked, len(report.failures))
            return _report_outcome(report)

        def functoriality(f=f, l=l) -> Outcome:
            return _report_outcome(functoriality_trials(f, max(1, params.samples // 10), params.seed + l))

        def faithfulness(f=f, l=l) -> Outcome:
            report = faithfulness_trials(f, max(1, params.samples // 10), params.seed + l, 0, params.budget,
                                         max_strands=3, max_crossings=3, steps=5)
            return _report_outcome(report)

        tasks.append((f"action-oracle/l={l}/soundness", soundness))
        tasks.append((f"action-oracle/l={l}/functoriality", functoriality))
        tasks.append((f"action-oracle/l={l}/faithfulness", faithfulness))
    return tasks


def _qgln_tasks(params: SuiteParams) -> List[Task]:
    tasks: List[Task] = []
    for n in range(1, params.max_n + 1):
        tag = f"qgln/n={n}"
        tasks.append((f"{tag}/rmatrix", lambda n=n: _report_outcome(rcheck_report(n, params.max_len))))
        tasks.append((f"{tag}/center", lambda n=n: _report_outcome(center_report(n, params.max_m, params.max_len))))
        tasks.append((f"{tag}/heis0-functor",
                      lambda n=n: _report_outcome(heis0_functor_check(n, length=params.max_len, mmax=params.max_m))))
        for m in range(1, params.max_m + 1):
            def harish_chandra(n=n, m=m) -> Outcome:
                rows = hc_table(n, m, max_size=min(3, params.max_len))
                bad = [row for row in rows if not row.matches]
                return not bad, "; ".join(f"λ={row.weight}: {row.observed} vs {row.expected}" for row in bad[:3])

            tasks.append((f"{tag}/hc-m={m}", harish_chandra))
    return tasks


# (f, g) pairs with f_l = t^2 g_m
GCQ_PAIRS: Tuple[Tuple[List, List], ...] = (
    ([1, "t^2"], [1]),
    ([1, 0, "t^2"], [1, 1]),
    ([1, "z", "t^2"], [1]),
)


def _gcq_tasks(params: SuiteParams) -> List[Task]:
    tasks: List[Task] = []
    for i, (f, g) in enumerate(GCQ_PAIRS):
        tag = f"gcq/pair{i}"

        def inverse(f=f, g=g) -> Outcome:
            return gcq_series(f, g, max(1, params.order)).check_inverse(), f"f={f} g={g}"

        def vacuum(f=f, g=g) -> Outcome:
            report = vacuum_eval(Morphism.identity(""), f, g, params.vacuum_order)
            return report.matches, json.dumps(report.to_dict())

        tasks.append((f"{tag}/series-inverse", inverse))
        tasks.append((f"{tag}/vacuum", vacuum))
    return tasks


def _comult_tasks(params: SuiteParams) -> List[Task]:
    tasks: List[Task] = []
    for l, m in COMULT_PAIRS:
        tag = f"comult-center/l={l}/m={m}"
        for sign in (PLUS, MINUS):
            def multiplicative(l=l, m=m, sign=sign) -> Outcome:
                order = params.order
                product = series_mul_truncated(
                    comult_center(l, m, CW, sign, order), comult_center(l, m, CCW, sign, order), order
                )
                return product.is_one(), "" if product.is_one() else repr(product)

            tasks.append((f"{tag}/grassmannian{sign}", multiplicative))

        def algebra_map(l=l, m=m) -> Outcome:
            for n in range(1, min(params.order, 4) + 1):
                for generator in ("h⊗1", "1⊗h"):
                    if comult_generator(l, m, generator, n) != comult_apply(generator_symsym(generator, n), l, m):
                        return False, f"{generator} degree {n}"
            return True, ""

        tasks.append((f"{tag}/algebra-map", algebra_map))
    return tasks


def build_tasks(name: str, params: SuiteParams, run_id: str = "") -> List[Task]:
    if name == "core-relations":
        return _core_tasks(params)
    if name in ("curls", "braid"):
        return _relation_tasks(name, params)
    if name == "bubbles":
        return _bubble_tasks(params)
    if name == "hecke":
        return _hecke_tasks(params)
    if name == "action-oracle":
        return _oracle_tasks(params, run_id)
    if name == "qgln":
        return _qgln_tasks(params)
    if name == "gcq":
        return _gcq_tasks(params)
    if name == "comult-center":
        return _comult_tasks(params)
    raise UnknownSuite(f"unknown suite {name!r}; choose from {', '.join(SUITE_NAMES + ('all',))}")


# ============ Runner ============

def _run_task(task: Task, suite: str, run_id: str) -> CheckResult:
    check_id, check = task
    start = time.perf_counter()
    try:
        passed, residual = check()
    except HeisError as e:
        error_id = error_handler.handle_exception(e, f"suite {suite}: {check_id}")
        activity_logger.log_error(run_id, error_id, str(e))
        passed, residual = False, f"{type(e).__name__}: {e}"
    seconds = time.perf_counter() - start
    activity_logger.log_check(run_id, suite, check_id, passed, seconds, residual if not passed else "")
    return CheckResult(check_id, passed, residual if not passed else "", seconds)


def _run_one(name: str, params: SuiteParams, run_id: str, progress: bool) -> SuiteReport:
    tasks = build_tasks(name, params, run_id)
    activity_logger.log_suite_started(run_id, name, params.model_dump())
    logger.info("Running %s: %d checks on %d thread(s)", name, len(tasks), params.threads)
    with ThreadPoolExecutor(max_workers=params.threads) as executor:
        results = list(
            tqdm(
                executor.map(lambda task: _run_task(task, name, run_id), tasks),
                total=len(tasks),
                desc=name,
                disable=not progress,
            )
        )
    report = SuiteReport(name, results, params.model_dump())
    activity_logger.log_suite_finished(run_id, name, report.passed, report.failed)
    logger.info("%s: %d passed, %d failed", name, report.passed, report.failed)
    return report


def run_suite(name: str, params: Optional[SuiteParams] = None, progress: bool = False,
              run_id: Optional[str] = None) -> SuiteReport:
    """
    Run one acceptance suite, or every suite for "all".

    Args:
        name: a member of SUITE_NAMES or "all"
        params: suite parameters; defaults come from config/suites.json
        progress: show a tqdm bar per suite
        run_id: activity log id; generated when omitted

    Returns:
        SuiteReport with results sorted by check id

    Raises:
        UnknownSuite: name is not a suite
    """
    run_id = run_id or f"run_{uuid.uuid4().hex[:8]}"
    if name != "all" and name not in SUITE_NAMES:
        raise UnknownSuite(f"unknown suite {name!r}; choose from {', '.join(SUITE_NAMES + ('all',))}")
    if name != "all":
        return _run_one(name, params or suite_params(name), run_id, progress)

    config = load_suite_config(run_id=run_id)
    base = params or SuiteParams()
    results: List[CheckResult] = []
    for suite in SUITE_NAMES:
        sub = suite_params(suite, base.quick, config, seed=base.seed, budget=base.budget, threads=base.threads)
        results.extend(_run_one(suite, sub, run_id, progress).results)
    return SuiteReport("all", results, {"quick": base.quick, "seed": base.seed, "budget": base.budget})
