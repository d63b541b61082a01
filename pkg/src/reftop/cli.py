"""Command-line front end for the recursion engine.

Four commands: ``compute`` evaluates and prints (optionally snapshots)
the differentials, ``check`` runs the exact verification suites,
``crosscheck`` runs the floating-point contour oracle, and
``quantum-curve`` prints the ODE coefficient data.  Reports are emitted
as text or versioned JSON; exit codes are 0 (all good), 1 (a check
failed), 2 (parse or validation failure), 3 (internal error).
"""

from __future__ import annotations

import json
import pathlib
import sys

import click

from .curve import CheckResult, CurveError, CurveFamily, validate
from .dsl import ParseError, parse_curve
from .numeric import NumericError, crosscheck_one_boundary
from .quantum import (
    QuantumError,
    qtop_quantum_curve,
    quantisation_check,
    theorem_qc_check,
)
from .ratfun import FactoredRat
from .recursion import (
    FULL,
    QTOP,
    RecursionCache,
    RecursionError_,
    check_properties,
    computed_orders,
    dilaton_check,
)
from .series import ExpansionError
from .variation import (
    VariationError,
    deformation_check,
    time_consistency,
    variational_check,
)

SCHEMA_VERSION = 1
EXIT_CHECK_FAILED = 1
EXIT_VALIDATION = 2
EXIT_INTERNAL = 3

_INTERNAL_ERRORS = (
    RecursionError_,
    QuantumError,
    VariationError,
    NumericError,
    ExpansionError,
)


def _load(path: str) -> CurveFamily:
    try:
        text = pathlib.Path(path).read_text()
    except OSError as exc:
        click.echo(f"error: cannot read {path}: {exc}", err=True)
        sys.exit(EXIT_VALIDATION)
    name = pathlib.Path(path).stem
    try:
        curve = parse_curve(text, name)
    except (ParseError, CurveError) as exc:
        click.echo(f"error: {path}: {exc}", err=True)
        sys.exit(EXIT_VALIDATION)
    bad = [r for r in validate(curve) if not r.ok]
    if bad:
        for r in bad:
            click.echo(f"error: {path}: {r.name}: {r.witness or 'failed'}", err=True)
        sys.exit(EXIT_VALIDATION)
    return curve


def _emit(curve_name: str, suite: str, results: list[dict], fmt: str) -> None:
    if fmt == "json":
        report = {
            "version": SCHEMA_VERSION,
            "curve": curve_name,
            "suite": suite,
            "results": results,
        }
        click.echo(json.dumps(report, indent=2, sort_keys=False))
    else:
        for r in results:
            line = f"{r['status'].upper():5s} {r['name']}"
            if r.get("witness"):
                line += f"  [{r['witness']}]"
            click.echo(line)


def _from_checks(checks: list[CheckResult]) -> list[dict]:
    out = []
    for c in checks:
        entry = {"name": c.name, "status": "pass" if c.ok else "fail"}
        if c.witness:
            entry["witness"] = c.witness
        out.append(entry)
    return out


def _exit_from(results: list[dict]) -> None:
    if any(r["status"] != "pass" for r in results):
        sys.exit(EXIT_CHECK_FAILED)
    sys.exit(0)


def _constraint_witness(solution) -> str:
    parts = [f"{k} = {v.canonical_str()}" for k, v in solution.assignments.items()]
    parts += [f"{name} free" for name in solution.free]
    return "; ".join(parts) if parts else "no parameters"


@click.group()
def main() -> None:
    """Exact engine for the refined recursion on rational curves."""


_curve_opt = click.option("--curve", "curve_path", required=True, help="curve file")
_mode_opt = click.option(
    "--mode", type=click.Choice([FULL, QTOP]), default=FULL, show_default=True
)
_fmt_opt = click.option(
    "--format", "fmt", type=click.Choice(["text", "json"]), default="text",
    show_default=True,
)


@main.command()
@_curve_opt
@_mode_opt
@click.option("--max-chi", type=int, default=0, show_default=True)
@_fmt_opt
@click.option(
    "--regen-golden", is_flag=True,
    help="write the printed expressions under goldens/<curve>/<mode>/",
)
def compute(curve_path: str, mode: str, max_chi: int, fmt: str, regen_golden: bool):
    """Compute the differentials up to the requested Euler characteristic."""
    curve = _load(curve_path)
    cache = RecursionCache(curve, mode)
    orders = [(0, 1), (0, 2), (1, 1)]
    orders += [o for o in computed_orders(max_chi) if o not in orders]
    results = []
    try:
        for g2, n1 in orders:
            value = cache.get(g2, n1).value
            results.append(
                {
                    "name": f"w{g2}_{n1}",
                    "status": "pass",
                    "witness": value.canonical_str(),
                }
            )
    except _INTERNAL_ERRORS as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_INTERNAL)
    if regen_golden:
        root = pathlib.Path("goldens") / curve.name / mode
        root.mkdir(parents=True, exist_ok=True)
        for r in results:
            (root / f"{r['name']}.txt").write_text(r["witness"] + "\n")
    _emit(curve.name, "compute", results, fmt)
    sys.exit(0)


def _suite_properties(cache: RecursionCache, max_chi: int) -> list[dict]:
    return _from_checks(check_properties(cache, max_chi))


def _suite_dilaton(cache: RecursionCache, max_chi: int) -> list[dict]:
    results = []
    for g2, n1 in computed_orders(max_chi):
        if 2 - g2 - n1 == 0:
            continue
        check = dilaton_check(cache, g2, n1)
        results.append(
            {"name": f"w{g2}_{n1}:{check.name}", "status": "pass" if check.ok else "fail"}
        )
    return results


def _suite_deformation(cache: RecursionCache) -> list[dict]:
    sol = deformation_check(cache, 1, 1)
    status = "pass" if sol.consistent else "fail"
    return [
        {"name": "deformation-constraint", "status": status,
         "witness": _constraint_witness(sol)}
    ]


def _suite_variation(cache: RecursionCache, max_chi: int) -> list[dict]:
    results = _from_checks(time_consistency(cache.curve))
    sol = deformation_check(cache, 1, 1)
    if not sol.consistent:
        results.append({"name": "deformation-constraint", "status": "fail"})
        return results
    values = {name: value for name, value in sol.assignments.items()}
    for g2, n1 in [(0, 1), (0, 2), (1, 1)] + computed_orders(max_chi - 1):
        check = variational_check(cache, g2, n1, values)
        results.append(
            {"name": f"w{g2}_{n1}:{check.name}", "status": "pass" if check.ok else "fail"}
        )
    return results


def _suite_quantisation(curve: CurveFamily, max_2g: int) -> list[dict]:
    cache = RecursionCache(curve, QTOP)
    qc = qtop_quantum_curve(cache, max_2g)
    sol = quantisation_check(qc)
    status = "pass" if sol.consistent else "fail"
    results = [
        {"name": f"q{k}", "status": "pass", "witness": qc.qk[k].canonical_str()}
        for k in sorted(qc.qk)
    ]
    results.append(
        {"name": "quantisation-constraint", "status": status,
         "witness": _constraint_witness(sol)}
    )
    return results


def _suite_theorem(curve: CurveFamily, max_2g: int) -> list[dict]:
    cache = RecursionCache(curve, QTOP)
    return _from_checks(theorem_qc_check(cache, max_2g))


SUITES = ("validate", "properties", "dilaton", "deformation", "variation",
          "quantisation", "theorem", "all")


@main.command()
@_curve_opt
@_mode_opt
@click.option("--suite", type=click.Choice(SUITES), default="all", show_default=True)
@click.option("--max-chi", type=int, default=1, show_default=True)
@click.option("--max-2g", "max_2g", type=int, default=4, show_default=True)
@_fmt_opt
def check(curve_path: str, mode: str, suite: str, max_chi: int, max_2g: int, fmt: str):
    """Run the exact verification suites."""
    curve = _load(curve_path)
    results: list[dict] = []
    try:
        if suite in ("validate", "all"):
            results += _from_checks(validate(curve))
        if suite in ("properties", "dilaton", "variation", "all"):
            cache = RecursionCache(curve, mode)
            if suite in ("properties", "all"):
                results += _suite_properties(cache, max_chi)
            if suite in ("dilaton", "all"):
                results += _suite_dilaton(cache, max_chi)
            if suite in ("variation", "all"):
                results += _suite_variation(cache, max_chi)
        if suite == "deformation":
            cache = RecursionCache(curve, mode)
            results += _suite_deformation(cache)
        if suite in ("quantisation", "all"):
            results += _suite_quantisation(curve, max_2g)
        if suite in ("theorem", "all"):
            results += _suite_theorem(curve, max_2g)
    except _INTERNAL_ERRORS as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_INTERNAL)
    _emit(curve.name, suite, results, fmt)
    _exit_from(results)


@main.command()
@_curve_opt
@_mode_opt
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--tol", type=float, default=1e-8, show_default=True)
@click.option("--samples", type=int, default=10, show_default=True)
@_fmt_opt
def crosscheck(curve_path: str, mode: str, seed: int, tol: float, samples: int, fmt: str):
    """Cross-check the exact one-boundary data against numeric residues."""
    curve = _load(curve_path)
    cache = RecursionCache(curve, mode)
    try:
        runs = crosscheck_one_boundary(cache, 2, seed=seed, samples=samples, rtol=tol)
    except _INTERNAL_ERRORS as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_INTERNAL)
    worst = max(r.rel_error for r in runs)
    results = [
        {
            "name": f"sample-{i}",
            "status": "pass" if r.ok else "fail",
            "witness": f"rel error {r.rel_error:.3e}",
        }
        for i, r in enumerate(runs)
    ]
    golden = pathlib.Path("goldens") / curve.name / mode / "w2_1.txt"
    if golden.exists():
        stored = golden.read_text().strip()
        current = cache.get(2, 1).value.canonical_str()
        ok = stored == current
        results.append(
            {
                "name": "golden-w2_1",
                "status": "pass" if ok else "fail",
                "witness": "matches stored expression"
                if ok
                else f"mismatch against golden; max numeric rel error {worst:.3e}",
            }
        )
    _emit(curve.name, "crosscheck", results, fmt)
    _exit_from(results)


@main.command("quantum-curve")
@_curve_opt
@click.option("--max-2g", "max_2g", type=int, default=4, show_default=True)
def quantum_curve(curve_path: str, max_2g: int):
    """Print the ODE coefficients, constraints, and checks as JSON."""
    curve = _load(curve_path)
    try:
        cache = RecursionCache(curve, QTOP)
        qc = qtop_quantum_curve(cache, max_2g)
        sol = quantisation_check(qc)
        weights = {k: v for k, v in sol.assignments.items()} if sol.consistent else {}
        checks = theorem_qc_check(
            cache, max_2g, weights={k: v for k, v in weights.items()} or None
        )
    except _INTERNAL_ERRORS as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_INTERNAL)
    report = {
        "K": max_2g,
        "Q": {
            "0": qc.q0.canonical_str(),
            **{str(k): qc.qk[k].canonical_str() for k in sorted(qc.qk)},
        },
        "constraints": _constraint_witness(sol),
        "checks": [
            {"name": c.name, "status": "pass" if c.ok else "fail"} for c in checks
        ],
    }
    click.echo(json.dumps(report, indent=2))
    sys.exit(0 if sol.consistent and all(c.ok for c in checks) else EXIT_CHECK_FAILED)


if __name__ == "__main__":
    main()
