"""Second-order ODE coefficients built from the one-boundary tower.

The recursion in reduced mode packages its one-boundary data into the
coefficients Q_k(x) of a formal second-order operator in x.  This module
computes those coefficients, checks that their poles stay inside the pole
set of Q_0, solves for the parameter constraints that enforce this, and
verifies the free-energy form of the constant coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .curve import (
    CheckResult,
    CurveFamily,
    curve_q0,
    eta_value,
    point_eq,
    point_in,
    pushforward_to_x,
)
from .linsolve import AffineSolution, SolveError, common_roots_univariate, solve_affine
from .poly import ParamPoly
from .ratfun import FactoredRat
from .recursion import QTOP, RecursionCache, rename
from .series import INFINITY, laurent
from .variation import dF0_dt, dF_half_dt, dFg_dt


class QuantumError(Exception):
    pass


@dataclass
class QuantumCurve:
    """Ordered ODE coefficients Q_k as rational functions of x."""

    curve: CurveFamily
    order: int
    q0: FactoredRat
    qk: dict[int, FactoredRat] = field(default_factory=dict)


def _require_reduced(cache: RecursionCache) -> None:
    if cache.mode != QTOP:
        raise QuantumError("quantum-curve coefficients need a reduced-mode cache")


def qtop_Qk_in_z(cache: RecursionCache, k: int) -> FactoredRat:
    """The k-th ODE coefficient as a function of the curve variable."""
    _require_reduced(cache)
    if k < 1:
        raise QuantumError("coefficient index must be positive")
    curve = cache.curve
    ctx = curve.ctx
    z = curve.zsym
    dx_inv_sq = curve.dx(z).inv() ** 2
    if k == 1:
        eta_sum = FactoredRat.zero(ctx)
        for pp in cache.cls.p_plus:
            mu = FactoredRat.var(ctx, pp.mu)
            eta_sum = eta_sum + mu * eta_value(curve, pp.point, z)
        return curve.ydx_value(z) * eta_sum * dx_inv_sq
    remainder = cache.loop_remainder(k, 1).value
    remainder = rename(remainder, ctx, [(ctx.point_var(0), z)])
    return FactoredRat.const(ctx, 2) * curve.ydx_value(z) * remainder * dx_inv_sq


def qtop_Qk(cache: RecursionCache, k: int) -> FactoredRat:
    """The k-th ODE coefficient pushed forward to a rational function of x."""
    in_z = qtop_Qk_in_z(cache, k)
    return pushforward_to_x(cache.curve, in_z, cache.curve.zsym)


def qtop_quantum_curve(cache: RecursionCache, order: int = 4) -> QuantumCurve:
    """Assemble Q_0 and Q_1..Q_order for the cached curve."""
    _require_reduced(cache)
    q0 = curve_q0(cache.curve)
    qk = {k: qtop_Qk(cache, k) for k in range(1, order + 1)}
    return QuantumCurve(cache.curve, order, q0, qk)


# -- pole-containment condition ----------------------------------------

def _finite_pole_roots(curve: CurveFamily, f: FactoredRat) -> list[tuple[FactoredRat, int]]:
    """Roots of the x-denominator factors, which must be linear in x."""
    xsym = curve.xsym
    out: list[tuple[FactoredRat, int]] = []
    for factor, mult in f.den:
        if not factor.involves(xsym):
            continue
        if factor.degree(xsym) != 1:
            raise QuantumError(
                f"x-denominator factor {factor.canonical_str()} is nonlinear"
            )
        by_deg = factor.coeffs_in(xsym)
        root = -FactoredRat(by_deg.get(0, ParamPoly.zero(f.ctx))) / FactoredRat(by_deg[1])
        merged = False
        for i, (r, m) in enumerate(out):
            if point_eq(r, root):
                out[i] = (r, max(m, mult))
                merged = True
        if not merged:
            out.append((root, mult))
    return out


def _x_degree(curve: CurveFamily, f: FactoredRat) -> int:
    num_deg = f.num.degree(curve.xsym)
    den_deg = sum(factor.degree(curve.xsym) * m for factor, m in f.den)
    return num_deg - den_deg


def _principal_part_equations(curve: CurveFamily, f: FactoredRat, root) -> list[FactoredRat]:
    """Coefficients of the negative orders of f at x = root (or infinity)."""
    series = laurent(f, curve.xsym, root, -1)
    return [c for order, c in series.coefficients.items() if order < 0 and not c.is_zero()]


def quantisation_check(qc: QuantumCurve) -> AffineSolution:
    """Constraints on the residue weights that keep Q_k poles inside Q_0's.

    Returns the affine solution set for the weight symbols: every weight
    free means the condition holds identically, pinned values give the
    locus on which it holds, and an inconsistent result means it fails
    for every weight choice.
    """
    curve = qc.curve
    permitted = _finite_pole_roots(curve, qc.q0)
    infinity_ok = _x_degree(curve, qc.q0) > 0
    equations: list[FactoredRat] = []
    for k in sorted(qc.qk):
        f = qc.qk[k]
        for root, mult in _finite_pole_roots(curve, f):
            if point_in(root, [r for r, _ in permitted]):
                continue
            equations.extend(_principal_part_equations(curve, f, root))
        if not infinity_ok and _x_degree(curve, f) > 0:
            equations.extend(_principal_part_equations(curve, f, INFINITY))
    unknowns = [pp.mu for pp in curve.points]
    try:
        return solve_affine(equations, unknowns)
    except SolveError:
        if len(unknowns) != 1:
            raise
        sym = unknowns[0]
        roots = common_roots_univariate([eq.num for eq in equations], sym)
        if roots is None:
            return AffineSolution(True, free=[sym.name])
        if not roots:
            return AffineSolution(False)
        if len(roots) == 1:
            return AffineSolution(True, {sym.name: roots[0]})
        raise QuantumError(
            "pole-vanishing locus is not a single point: "
            + ", ".join(r.canonical_str() for r in roots)
        )


# -- free-energy form of the constant coefficients ----------------------

def _subs_weights(f: FactoredRat, curve: CurveFamily, values: dict[str, FactoredRat]):
    for pp in curve.points:
        if pp.mu.name in values:
            f = f.subs(pp.mu, values[pp.mu.name])
    return f


def _is_x_constant(curve: CurveFamily, f: FactoredRat) -> bool:
    return not f.involves(curve.xsym)


def theorem_qc_check(
    cache: RecursionCache, order: int = 4, weights: dict[str, FactoredRat] | None = None
) -> list[CheckResult]:
    """Verify the free-energy form of the ODE coefficients.

    With the residue weights pinned to the pole-containment locus, each
    coefficient Q_k must be constant in x and equal to twice the time
    derivative of the order-k/2 free energy.  When the curve declares its
    planar free energy, the x-constant term of Q_0 must equal twice its
    time derivative as well.
    """
    _require_reduced(cache)
    curve = cache.curve
    ctx = curve.ctx
    if weights is None:
        weights = {
            pp.mu.name: FactoredRat.const(ctx, 1) for pp in curve.points
        }
    out: list[CheckResult] = []

    if curve.f0 is not None:
        q0 = curve_q0(curve)
        const_term = FactoredRat(q0.num.coeffs_in(curve.xsym).get(0, ParamPoly.zero(ctx)), q0.den)
        target = FactoredRat.const(ctx, 2) * dF0_dt(curve)
        out.append(
            CheckResult(
                "q0-constant-term",
                (const_term - target).is_zero(),
                f"{const_term.canonical_str()} vs {target.canonical_str()}",
            )
        )

    for k in range(1, order + 1):
        qk = _subs_weights(qtop_Qk(cache, k), curve, weights)
        constant = _is_x_constant(curve, qk)
        out.append(CheckResult(f"q{k}-constant-in-x", constant, qk.canonical_str()))
        if not constant:
            continue
        if k == 1:
            df = dF_half_dt(cache)
        else:
            df = dFg_dt(cache, k)
        target = _subs_weights(FactoredRat.const(ctx, 2) * df, curve, weights)
        out.append(
            CheckResult(
                f"q{k}-free-energy",
                (qk - target).is_zero(),
                f"{qk.canonical_str()} vs {target.canonical_str()}",
            )
        )
    return out
