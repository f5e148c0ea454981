"""
CLI: click command group over the rewriter, the Hecke and quantum group oracles,
and the acceptance suites.
"""

import json
import logging
import uuid
from fractions import Fraction
from typing import Any, Dict, Optional

import click

from action import psi_dual_morphism, psi_morphism, vacuum_eval
from activity_logger import activity_logger
from diagrams import parse
from error_handler import HeisError, ParameterMismatch, error_handler
from hecke import HeckeElement, hecke_mul, hecke_parse, hecke_render, trace
from qgln import center_report, hc_table, rcheck_report
from rewrite import normalize
from suites import SUITE_NAMES, SuiteReport, load_polynomial, run_suite, suite_params
from symfunc import CCW, CW, MINUS, PLUS, bubble_series, comult_center, render_sym

logger = logging.getLogger("heiscat.cli")

RELATION_SUITES = ("core-relations", "curls", "bubbles", "braid")
_ORIENTATIONS = {"ccw": CCW, "cw": CW}
_SIGNS = {"plus": PLUS, "minus": MINUS, "+": PLUS, "-": MINUS}


# ============ Output helpers ============

def _emit(ctx: click.Context, payload: Dict[str, Any], text: str) -> None:
    if ctx.obj["json"]:
        click.echo(json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False))
    else:
        click.echo(text)


def _fail(ctx: click.Context, error: Exception, context: str) -> None:
    """Log through the error handler, print a one-line message and exit nonzero."""
    error_id = error_handler.handle_exception(error, context)
    activity_logger.log_error(ctx.obj["run_id"], error_id, str(error))
    click.echo(f"❌ {type(error).__name__}: {error} (error_id={error_id})", err=True)
    ctx.exit(2)


def _finish(ctx: click.Context, report: SuiteReport) -> None:
    _emit(ctx, report.to_dict(), report.render())
    ctx.exit(report.exit_code)


def _series_payload(series) -> Dict[str, Any]:
    return {
        "sign": series.sign,
        "window": [series.n_min, series.n_max],
        "coefficients": {str(n): render_sym(series.coefficient(n)) for n in range(series.n_min, series.n_max + 1)},
    }


def _series_text(series) -> str:
    lines = []
    for n in range(series.n_min, series.n_max + 1):
        lines.append(f"w^{-n}: {render_sym(series.coefficient(n))}")
    return "\n".join(lines)


def _read_expr(expr: Optional[str], path: Optional[str]) -> str:
    if bool(expr) == bool(path):
        raise ParameterMismatch("give exactly one of --expr and --file")
    if path:
        with open(path, "r", encoding="utf-8") as f:
            return f.read()
    return expr


# ============ Group ============

@click.group()
@click.option("--json", "as_json", is_flag=True, help="Machine-readable output.")
@click.option("--seed", type=int, default=None, help="Seed for randomized checks.")
@click.option("--budget", type=int, default=None, help="Rewrite step limit.")
@click.pass_context
def cli(ctx: click.Context, as_json: bool, seed: Optional[int], budget: Optional[int]):
    """Exact computations in the quantum Heisenberg category."""
    ctx.ensure_object(dict)
    ctx.obj.update({"json": as_json, "seed": seed, "budget": budget, "run_id": f"run_{uuid.uuid4().hex[:8]}"})


@cli.command("normalize")
@click.option("--k", "k", type=int, required=True, help="Central charge.")
@click.option("--expr", default=None, help="Morphism in the diagram language.")
@click.option("--file", "path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.pass_context
def cmd_normalize(ctx: click.Context, k: int, expr: Optional[str], path: Optional[str]):
    """Basis expansion of a morphism."""
    try:
        text = _read_expr(expr, path)
        nf = normalize(parse(text), k, ctx.obj["budget"], ctx.obj["seed"])
    except (HeisError, OSError) as e:
        _fail(ctx, e, "normalize")
        return
    activity_logger.log_normalized(ctx.obj["run_id"], k, text, len(nf))
    _emit(ctx, nf.to_dict(), nf.render())


@cli.command("relations")
@click.option("--k", "k", type=int, required=True)
@click.option("--suite", "suite", type=click.Choice(RELATION_SUITES + ("all",)), default="all")
@click.pass_context
def cmd_relations(ctx: click.Context, k: int, suite: str):
    """Residuals of the relation tables at one central charge."""
    names = RELATION_SUITES if suite == "all" else (suite,)
    results = []
    try:
        for name in names:
            params = suite_params(name, k_values=[k], samples=0, seed=ctx.obj["seed"], budget=ctx.obj["budget"])
            results.extend(run_suite(name, params, run_id=ctx.obj["run_id"]).results)
    except HeisError as e:
        _fail(ctx, e, "relations")
        return
    _finish(ctx, SuiteReport(suite, results, {"k": k}))


@cli.command("run")
@click.argument("name", type=click.Choice(SUITE_NAMES + ("all",)))
@click.option("--quick", is_flag=True, help="Bounded sizes.")
@click.pass_context
def cmd_run(ctx: click.Context, name: str, quick: bool):
    """Run an acceptance suite."""
    try:
        params = suite_params(name, quick, seed=ctx.obj["seed"], budget=ctx.obj["budget"])
        report = run_suite(name, params, progress=not ctx.obj["json"], run_id=ctx.obj["run_id"])
    except HeisError as e:
        _fail(ctx, e, f"run {name}")
        return
    _finish(ctx, report)


# ============ Hecke algebras ============

@cli.group("hecke")
def hecke_group():
    """Affine and cyclotomic Hecke algebras."""


@hecke_group.command("mul")
@click.option("--n", "n", type=int, required=True, help="Number of strands.")
@click.option("--cyclotomic", "cyclotomic", default=None, help="Polynomial JSON; omit for AH_n.")
@click.argument("a")
@click.argument("b")
@click.pass_context
def cmd_hecke_mul(ctx: click.Context, n: int, cyclotomic: Optional[str], a: str, b: str):
    try:
        left, right = hecke_parse(a, n), hecke_parse(b, n)
        if cyclotomic:
            product = hecke_mul(left, right, load_polynomial(cyclotomic).cyclotomic())
        else:
            product = left * right
    except HeisError as e:
        _fail(ctx, e, "hecke mul")
        return
    _emit(ctx, {"n": n, "product": hecke_render(product)}, hecke_render(product))


@hecke_group.command("trace")
@click.option("--n", "n", type=int, required=True, help="Target H_n^f; the element lives in H_{n+1}^f.")
@click.option("--cyclotomic", "cyclotomic", required=True, help="Polynomial JSON.")
@click.argument("element")
@click.pass_context
def cmd_hecke_trace(ctx: click.Context, n: int, cyclotomic: str, element: str):
    try:
        value: HeckeElement = trace(hecke_parse(element, n + 1), load_polynomial(cyclotomic).cyclotomic())
    except HeisError as e:
        _fail(ctx, e, "hecke trace")
        return
    _emit(ctx, {"n": n, "trace": hecke_render(value)}, hecke_render(value))


# ============ Module-category action ============

@cli.group("action")
def action_group():
    """The actions Ψ_f and Ψ^∨_f on cyclotomic Hecke modules."""


@action_group.command("eval")
@click.option("--k", "k", type=int, required=True)
@click.option("--f", "f_spec", required=True, help="Polynomial JSON text or file.")
@click.option("--g", "g_spec", default=None, help="Second polynomial for vacuum evaluation.")
@click.option("--level", type=int, default=0, help="Hecke level n of the module.")
@click.option("--dual", is_flag=True, help="Use Ψ^∨_f (k = l) instead of Ψ_f (k = -l).")
@click.option("--expr", required=True, help="Morphism in the diagram language.")
@click.pass_context
def cmd_action_eval(ctx: click.Context, k: int, f_spec: str, g_spec: Optional[str], level: int,
                    dual: bool, expr: str):
    try:
        morphism = parse(expr)
        f = load_polynomial(f_spec)
        if g_spec is not None:
            g = load_polynomial(g_spec)
            if k != len(g.coeffs) - len(f.coeffs):
                raise ParameterMismatch(f"k = {k} does not equal deg g - deg f")
            report = vacuum_eval(morphism, f.coeffs, g.coeffs)
            text = f"blue {report.blue} | red {report.red} | series {'match' if report.matches else 'MISMATCH'}"
            _emit(ctx, report.to_dict(), text)
            return
        poly = f.cyclotomic()
        expected = poly.l if dual else -poly.l
        if k != expected:
            raise ParameterMismatch(f"this action realises k = {expected}, not {k}")
        matrix = psi_dual_morphism(morphism, poly, level) if dual else psi_morphism(morphism, poly, level)
    except HeisError as e:
        _fail(ctx, e, "action eval")
        return
    _emit(ctx, matrix.to_dict(), matrix.render())


@action_group.command("oracle")
@click.option("--k", "k", type=int, required=True, help="Negative central charge k = -l.")
@click.option("--trials", type=int, default=50)
@click.option("--max-n", "max_n", type=int, default=1)
@click.pass_context
def cmd_action_oracle(ctx: click.Context, k: int, trials: int, max_n: int):
    """Separation and soundness of the normal forms against Ψ_f."""
    try:
        if k >= 0:
            raise ParameterMismatch("the Hecke oracle realises k = -l with l >= 1")
        params = suite_params("action-oracle", levels=[-k], max_n=max_n, samples=trials,
                              seed=ctx.obj["seed"], budget=ctx.obj["budget"])
        report = run_suite("action-oracle", params, progress=not ctx.obj["json"], run_id=ctx.obj["run_id"])
    except HeisError as e:
        _fail(ctx, e, "action oracle")
        return
    _finish(ctx, report)


# ============ Quantum gl_n ============

@cli.group("qgln")
def qgln_group():
    """U_q(gl_n) tensor representations."""


def _oracle_finish(ctx: click.Context, report) -> None:
    text = f"{'✅' if report.ok else '❌'} {report.name}: {report.passed}/{report.checked}"
    if report.failures:
        text += "\n" + "\n".join(f"  {label}" for label in report.failures[:20])
    _emit(ctx, report.to_dict(), text)
    ctx.exit(0 if report.ok else 1)


@qgln_group.command("hc")
@click.option("--n", "n", type=int, required=True)
@click.option("--m", "m", type=int, required=True)
@click.option("--q", "q", default="2", help="Rational value of q.")
@click.option("--max-size", "max_size", type=int, default=3)
@click.pass_context
def cmd_qgln_hc(ctx: click.Context, n: int, m: int, q: str, max_size: int):
    """Central character of z_m on highest weight vectors."""
    try:
        rows = hc_table(n, m, Fraction(q), max_size)
    except (HeisError, ValueError, ZeroDivisionError) as e:
        _fail(ctx, e, "qgln hc")
        return
    text = "\n".join(
        f"λ={list(row.weight)} | expected {row.expected} | computed {row.observed} | {'ok' if row.matches else 'FAIL'}"
        for row in rows
    )
    _emit(ctx, {"rows": [row.to_dict() for row in rows]}, text)
    ctx.exit(0 if all(row.matches for row in rows) else 1)


@qgln_group.command("rcheck")
@click.option("--n", "n", type=int, required=True)
@click.option("--len", "length", type=int, default=2)
@click.pass_context
def cmd_qgln_rcheck(ctx: click.Context, n: int, length: int):
    try:
        report = rcheck_report(n, length)
    except HeisError as e:
        _fail(ctx, e, "qgln rcheck")
        return
    _oracle_finish(ctx, report)


@qgln_group.command("center")
@click.option("--n", "n", type=int, required=True)
@click.option("--mmax", type=int, default=2)
@click.option("--len", "length", type=int, default=2)
@click.pass_context
def cmd_qgln_center(ctx: click.Context, n: int, mmax: int, length: int):
    try:
        report = center_report(n, mmax, length)
    except HeisError as e:
        _fail(ctx, e, "qgln center")
        return
    _oracle_finish(ctx, report)


# ============ Bubble series ============

@cli.group("bubbles")
def bubbles_group():
    """Bubble generating series."""


@bubbles_group.command("series")
@click.option("--k", "k", type=int, required=True)
@click.option("--sign", type=click.Choice(sorted(_SIGNS)), default="plus")
@click.option("--orient", type=click.Choice(sorted(_ORIENTATIONS)), default="ccw")
@click.option("--order", type=int, default=4)
@click.pass_context
def cmd_bubbles_series(ctx: click.Context, k: int, sign: str, orient: str, order: int):
    try:
        series = bubble_series(k, _ORIENTATIONS[orient], _SIGNS[sign], order)
    except HeisError as e:
        _fail(ctx, e, "bubbles series")
        return
    _emit(ctx, _series_payload(series), _series_text(series))


@cli.group("comult")
def comult_group():
    """Comultiplication on the center."""


@comult_group.command("center")
@click.option("--l", "l", type=int, required=True)
@click.option("--m", "m", type=int, required=True)
@click.option("--order", type=int, default=3)
@click.option("--sign", type=click.Choice(sorted(_SIGNS)), default="plus")
@click.option("--orient", type=click.Choice(sorted(_ORIENTATIONS)), default="ccw")
@click.pass_context
def cmd_comult_center(ctx: click.Context, l: int, m: int, order: int, sign: str, orient: str):
    """Image of a bubble series of Heis_{l+m} under Δ_{l|m}."""
    try:
        series = comult_center(l, m, _ORIENTATIONS[orient], _SIGNS[sign], order)
    except HeisError as e:
        _fail(ctx, e, "comult center")
        return
    _emit(ctx, _series_payload(series), _series_text(series))
