"""Variation of the curve family along its time parameter.

Implements differentiation of multidifferentials at fixed base coordinate,
integrals over the declared generalized cycle, and the consistency checks
tying the two together, including the free-energy derivatives that feed the
quantisation checks.
"""

from __future__ import annotations

from fractions import Fraction

from .context import Symbol
from .curve import CheckResult, CurveFamily
from .linsolve import AffineSolution, solve_affine
from .poly import ParamPoly
from .ratfun import FactoredRat
from .recursion import RecursionCache
from .series import antiderivative, antiderivative_value, residue


class VariationError(Exception):
    pass


def _xprime_inverse(curve: CurveFamily, v: Symbol) -> FactoredRat:
    return curve.y_at(v) * curve.ydx_inverse(v)


def delta_t(curve: CurveFamily, value: FactoredRat, nvars: int) -> FactoredRat:
    """Time derivative of a multidifferential at fixed base coordinates."""
    ctx = curve.ctx
    s = curve.generator
    dt_ds = curve.time.value.derivative(s)
    if dt_ds.is_zero():
        raise VariationError("time does not depend on the generator")
    dtds_inv = dt_ds.inv()
    dx_dt = dtds_inv * curve.x.derivative(s)

    h = value
    for a in range(nvars):
        h = h * _xprime_inverse(curve, ctx.point_var(a))
    out = dtds_inv * h.derivative(s)
    for a in range(nvars):
        za = ctx.point_var(a)
        shift = dx_dt.subs(curve.zsym, FactoredRat.var(ctx, za))
        out = out - shift * _xprime_inverse(curve, za) * h.derivative(za)
    for a in range(nvars):
        out = out * curve.dx(ctx.point_var(a))
    return out


def cycle_integral(curve: CurveFamily, value: FactoredRat, v: Symbol) -> FactoredRat:
    """Integral of value (a differential in v) over the declared cycle."""
    cycle = curve.time.cycle
    if cycle is None:
        raise VariationError("curve declares no generalized cycle")
    ctx = curve.ctx
    if cycle.kind == "II":
        lam = cycle.lam.subs(curve.zsym, FactoredRat.var(ctx, v))
        total = residue(lam * value, v, cycle.location)
        if cycle.partner is not None:
            total = total - residue(lam * value, v, cycle.partner)
        return total

    phi = antiderivative(value, v)
    if phi.log_terms:
        raise VariationError(
            "third-kind cycle integral of a differential with nonzero residues"
        )
    upper = cycle.location
    lower = curve.sigma.apply_point(upper)
    if lower is None:
        lower = FactoredRat.zero(ctx)
    return antiderivative_value(phi, v, upper) - antiderivative_value(phi, v, lower)


def time_consistency(curve: CurveFamily) -> list[CheckResult]:
    """The declared cycle must reproduce the declared time from y dx."""
    ctx = curve.ctx
    z = curve.zsym
    cycle = curve.time.cycle
    ydx = curve.ydx_value(z)
    results = []
    if cycle.kind == "II":
        lam_inv = cycle.lam.inv()
        value = residue(lam_inv * ydx, z, cycle.location)
        if cycle.partner is not None:
            value = value - residue(lam_inv * ydx, z, cycle.partner)
    else:
        value = residue(ydx, z, cycle.location)
    diff = value - curve.time.value
    results.append(
        CheckResult("time-from-cycle", diff.is_zero(), None if diff.is_zero() else value.canonical_str())
    )
    return results


def _instantiated(cache: RecursionCache, g2: int, n1: int, extra: Symbol) -> FactoredRat:
    args = [cache.ctx.point_var(i) for i in range(n1 - 1)] + [extra]
    return cache.value_at(g2, n1, args)


def variational_difference(cache: RecursionCache, g2: int, n1: int) -> FactoredRat:
    """delta_t of the (g2, n1) entry minus the cycle integral of the next one."""
    curve = cache.curve
    ctx = cache.ctx
    lhs = delta_t(curve, cache.get(g2, n1).value, n1)
    extra = ctx.fresh_point("_c")
    bigger = _instantiated(cache, g2, n1 + 1, extra)
    rhs = cycle_integral(curve, bigger, extra)
    return lhs - rhs


def _coefficient_equations(value: FactoredRat) -> list[FactoredRat]:
    """Vanishing of value as identity in the point variables, affine in unknown."""
    ctx = value.ctx
    rows = {(): value.num}
    for sym in ctx.symbols:
        if sym.kind.name != "POINT" or sym.name.startswith("_"):
            continue
        expanded = {}
        for tag, poly in rows.items():
            for k, c in poly.coeffs_in(sym).items():
                expanded[tag + ((sym.name, k),)] = c
        rows = expanded
    return [FactoredRat.from_poly(p) for p in rows.values() if not p.is_zero()]


def deformation_check(cache: RecursionCache, g2: int, n1: int) -> AffineSolution:
    """Solve the variational identity for the pole weights."""
    diff = variational_difference(cache, g2, n1)
    mus = [p.mu for p in cache.cls.p_plus]
    if diff.is_zero():
        return AffineSolution(True, {}, [m.name for m in mus])
    equations = _coefficient_equations(diff)
    return solve_affine(equations, mus)


def variational_check(
    cache: RecursionCache, g2: int, n1: int, mu_values: dict[str, FactoredRat] | None = None
) -> CheckResult:
    diff = variational_difference(cache, g2, n1)
    if mu_values:
        for name, val in mu_values.items():
            diff = diff.subs(cache.ctx.get(name), val)
    ok = diff.is_zero()
    return CheckResult(
        f"variational (2g={g2},n+1={n1})", ok, None if ok else diff.canonical_str()
    )


# -- free-energy derivatives -------------------------------------------

def integrate_in_time(curve: CurveFamily, value: FactoredRat) -> FactoredRat:
    """Antiderivative with respect to time of a Laurent monomial sum in the
    generator, with the integration constant fixed to zero."""
    s = curve.generator
    integrand = value * curve.time.value.derivative(s)
    coeffs = _laurent_in(integrand, s)
    ctx = curve.ctx
    total = FactoredRat.zero(ctx)
    sv = FactoredRat.var(ctx, s)
    for k, c in coeffs.items():
        if k == -1:
            raise VariationError("time integration produces a logarithm")
        total = total + c * sv ** (k + 1) * Fraction(1, k + 1)
    return total


def _laurent_in(value: FactoredRat, s: Symbol) -> dict[int, FactoredRat]:
    shift = 0
    ctx = value.ctx
    den_rest = []
    for f, m in value.den:
        if f == ParamPoly.var(ctx, s):
            shift += m
        elif f.involves(s):
            raise VariationError("value is not a Laurent polynomial in the generator")
        else:
            den_rest.append((f, m))
    out = {}
    for k, c in value.num.coeffs_in(s).items():
        out[k - shift] = FactoredRat(c, den_rest)
    return out


def dF0_dt(curve: CurveFamily) -> FactoredRat:
    if curve.f0 is None:
        raise VariationError("curve declares no genus-zero free energy")
    s = curve.generator
    return curve.time.value.derivative(s).inv() * curve.f0.derivative(s)


def d2F_half_dt2(cache: RecursionCache) -> FactoredRat:
    """Double cycle integral of the half-order two-point entry."""
    curve = cache.curve
    ctx = cache.ctx
    a = ctx.fresh_point("_c")
    b = ctx.fresh_point("_e")
    value = cache.value_at(1, 2, [a, b])
    inner = cycle_integral(curve, value, b)
    return cycle_integral(curve, inner, a)


def dF_half_dt(cache: RecursionCache) -> FactoredRat:
    return integrate_in_time(cache.curve, d2F_half_dt2(cache))


def dFg_dt(cache: RecursionCache, g2: int) -> FactoredRat:
    """Cycle integral of the one-point entry of doubled order g2."""
    ctx = cache.ctx
    a = ctx.fresh_point("_c")
    value = cache.value_at(g2, 1, [a])
    return cycle_integral(cache.curve, value, a)
