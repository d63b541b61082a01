"""Laurent expansion, residues and antiderivatives in one point variable.

Everything is exact: expansion points are elements of the coefficient
field (or infinity, handled through the u = 1/z chart), and a denominator
factor involving the expansion variable must be linear in it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .context import Context, Symbol, SymbolKind
from .poly import ParamPoly
from .ratfun import FactoredRat

INFINITY = "inf"


class ExpansionError(Exception):
    pass


@dataclass
class LaurentSeries:
    ctx: Context
    variable: Symbol
    center: object  # FactoredRat or INFINITY
    coefficients: dict[int, FactoredRat] = field(default_factory=dict)
    truncation: int = 0

    def coeff(self, order: int) -> FactoredRat:
        if order > self.truncation:
            raise ExpansionError(f"coefficient of order {order} beyond truncation")
        got = self.coefficients.get(order)
        return got if got is not None else FactoredRat.zero(self.ctx)

    def min_order(self) -> int:
        live = [k for k, c in self.coefficients.items() if not c.is_zero()]
        return min(live) if live else self.truncation + 1


@dataclass
class LogAntiderivative:
    rational_part: FactoredRat
    log_terms: list[tuple[FactoredRat, FactoredRat]]  # (coefficient, branch point)


def _shift_symbol(ctx: Context) -> Symbol:
    return ctx.fresh_point("_w")


def _chart_symbol(ctx: Context) -> Symbol:
    return ctx.fresh_point("_u")


def _check_linear_factors(f: FactoredRat, v: Symbol) -> None:
    """Reject nonlinear vanishing factors; nonlinear units expand fine."""
    for factor, _ in f.den:
        if factor.degree(v) > 1:
            raise ExpansionError(
                f"denominator factor {factor.canonical_str()} is nonlinear in {v.name}"
            )


def at_infinity(f: FactoredRat, v: Symbol) -> tuple[FactoredRat, Symbol]:
    """Rewrite f(v) as g(u) with v = 1/u; returns (g, u)."""
    u = _chart_symbol(f.ctx)
    if f.involves(u):
        raise ExpansionError("nested infinity charts are not supported")
    inv = FactoredRat(
        ParamPoly.const(f.ctx, 1), [(ParamPoly.var(f.ctx, u), 1)]
    )
    return f.subs(v, inv), u


def laurent(f: FactoredRat, v: Symbol, point, order: int) -> LaurentSeries:
    """Expand the function f around ``point`` up to and including ``order``.

    At infinity the series is in 1/v: the order-k coefficient multiplies
    v^(-k).
    """
    ctx = f.ctx
    if point is INFINITY:
        g, u = at_infinity(f, v)
        inner = laurent(g, u, FactoredRat.zero(ctx), order)
        return LaurentSeries(ctx, v, INFINITY, inner.coefficients, inner.truncation)

    if not isinstance(point, FactoredRat):
        point = FactoredRat.const(ctx, point)
    if point.involves(v):
        raise ExpansionError("expansion point may not involve the expansion variable")
    w = _shift_symbol(ctx)
    if f.involves(w) or point.involves(w):
        raise ExpansionError("nested local expansions are not supported")
    w_val = FactoredRat.var(ctx, w) + point

    # shift the denominator factor by factor; factors are small
    pole_order = 0
    unit_factors: list[tuple[int, dict[int, ParamPoly]]] = []
    coeff_den: list[tuple[ParamPoly, int]] = []
    extra_num = FactoredRat.const(ctx, 1)
    for factor, mult in f.den:
        if not factor.involves(v):
            coeff_den.append((factor, mult))
            continue
        # reciprocal of the shifted factor, renormalized by the constructor
        inv_sh = FactoredRat.from_poly(factor).subs(v, w_val).inv()
        if not inv_sh.num.is_constant() or inv_sh.num.constant_value() != 1:
            # parameter denominators introduced by a rational point flip upward
            extra_num = extra_num * FactoredRat.from_poly(inv_sh.num) ** mult
        for g, m in inv_sh.den:
            if not g.involves(w):
                coeff_den.append((g, m * mult))
                continue
            coeffs = {k: c for k, c in g.coeffs_in(w).items() if not c.is_zero()}
            vanish = min(coeffs)
            if vanish > 0 and g.degree(w) > 1:
                raise ExpansionError(
                    f"denominator factor {factor.canonical_str()} is nonlinear in {v.name}"
                )
            pole_order += m * mult * vanish
            unit_factors.append((m * mult, {k - vanish: c for k, c in coeffs.items()}))

    depth = order + pole_order
    if depth < 0:
        return LaurentSeries(ctx, v, point, {}, order)

    # numerator via a truncated Taylor shift: only orders <= depth matter
    scale = FactoredRat(ParamPoly.const(ctx, 1), coeff_den) * extra_num
    series = []
    der = f.num
    factorial = 1
    for k in range(depth + 1):
        if der.is_zero():
            series.append(FactoredRat.zero(ctx))
            continue
        value = FactoredRat.from_poly(der).subs(v, point)
        series.append(value * scale * Fraction(1, factorial))
        der = der.derivative(v)
        factorial *= k + 1
    for mult, h in unit_factors:
        inverse = _invert_series(ctx, h, depth)
        for _ in range(mult):
            series = _mul_truncated(series, inverse, depth)

    coefficients = {
        k - pole_order: series[k] for k in range(depth + 1) if not series[k].is_zero()
    }
    return LaurentSeries(ctx, v, point, coefficients, order)


def _invert_series(ctx: Context, h: dict[int, ParamPoly], depth: int) -> list[FactoredRat]:
    """Reciprocal of a unit power series given by nonzero coefficients h."""
    lead = FactoredRat(h[0]).inv()
    out = [lead]
    for n in range(1, depth + 1):
        acc = FactoredRat.zero(ctx)
        for j in range(1, n + 1):
            c = h.get(j)
            if c is not None:
                acc = acc + FactoredRat(c) * out[n - j]
        out.append(-lead * acc)
    return out


def _mul_truncated(a: list[FactoredRat], b: list[FactoredRat], depth: int):
    ctx = a[0].ctx
    out = [FactoredRat.zero(ctx) for _ in range(depth + 1)]
    for i, ca in enumerate(a):
        if ca.is_zero():
            continue
        for j, cb in enumerate(b):
            if i + j > depth:
                break
            if cb.is_zero():
                continue
            out[i + j] = out[i + j] + ca * cb
    return out


def residue(f: FactoredRat, v: Symbol, point) -> FactoredRat:
    """Residue of the differential f dv at ``point`` (INFINITY for z = inf)."""
    ctx = f.ctx
    if point is INFINITY:
        g, u = at_infinity(f, v)
        u_rat = FactoredRat.var(ctx, u)
        jacobian = -(u_rat.inv() ** 2)
        return residue(g * jacobian, u, FactoredRat.zero(ctx))
    fast = _residue_linear_pole(f, v, point)
    if fast is not None:
        return fast
    series = laurent(f, v, point, -1)
    return series.coeff(-1)


def _residue_linear_pole(f: FactoredRat, v: Symbol, point) -> FactoredRat | None:
    """Derivative-based residue when a single linear factor vanishes there."""
    ctx = f.ctx
    if not isinstance(point, FactoredRat):
        point = FactoredRat.const(ctx, point)
    if point.involves(v):
        return None
    vanishing = None
    mult = 0
    regular: list[tuple[ParamPoly, int]] = []
    for factor, m in f.den:
        if not factor.involves(v):
            regular.append((factor, m))
            continue
        if factor.degree(v) > 1:
            return None
        coeffs = factor.coeffs_in(v)
        at_point = FactoredRat(coeffs.get(1, ParamPoly.zero(ctx))) * point + FactoredRat(
            coeffs.get(0, ParamPoly.zero(ctx))
        )
        if at_point.is_zero():
            if vanishing is not None:
                return None
            vanishing, mult = factor, m
        else:
            regular.append((factor, m))
    if vanishing is None:
        return FactoredRat.zero(ctx)
    if mult != 1:
        return None
    lead = FactoredRat(vanishing.coeffs_in(v).get(1))
    g = FactoredRat(f.num, regular) * lead.inv()
    return g.subs(v, point)


def limit_at(f: FactoredRat, v: Symbol, point) -> FactoredRat:
    """Exact limit of f as v approaches ``point``; error if singular."""
    series = laurent(f, v, point, 0)
    if series.min_order() < 0:
        raise ExpansionError(f"function is singular at the requested point ({v.name})")
    return series.coeff(0)


def pole_roots(f: FactoredRat, v: Symbol) -> list[tuple[FactoredRat, int]]:
    """Roots (in the coefficient field) and orders of the poles of f in v."""
    _check_linear_factors(f, v)
    ctx = f.ctx
    roots: list[tuple[FactoredRat, int]] = []
    for factor, mult in f.den:
        if not factor.involves(v):
            continue
        coeffs = factor.coeffs_in(v)
        c1 = coeffs.get(1, ParamPoly.zero(ctx))
        c0 = coeffs.get(0, ParamPoly.zero(ctx))
        root = -FactoredRat(c0) / FactoredRat(c1)
        for i, (existing, m) in enumerate(roots):
            if (existing - root).is_zero():
                roots[i] = (existing, m + mult)
                break
        else:
            roots.append((root, mult))
    return roots


def antiderivative(f: FactoredRat, v: Symbol) -> LogAntiderivative:
    """Primitive of the differential f dv, with explicit logarithmic terms."""
    _check_linear_factors(f, v)
    ctx = f.ctx
    rational = FactoredRat.zero(ctx)
    logs: list[tuple[FactoredRat, FactoredRat]] = []
    principal_total = FactoredRat.zero(ctx)
    v_rat = FactoredRat.var(ctx, v)
    for root, mult in pole_roots(f, v):
        series = laurent(f, v, root, -1)
        shifted = v_rat - root
        for k in range(-mult, 0):
            c = series.coeff(k) if k >= series.min_order() else FactoredRat.zero(ctx)
            if c.is_zero():
                continue
            principal_total = principal_total + c * shifted**k
            if k == -1:
                logs.append((c, root))
            else:
                rational = rational + c * shifted ** (k + 1) / (k + 1)
    remainder = f - principal_total
    if remainder.den and any(fac.involves(v) for fac, _ in remainder.den):
        raise ExpansionError("partial fraction decomposition left a pole behind")
    for k, c in remainder.num.coeffs_in(v).items():
        term = FactoredRat(c, remainder.den) * v_rat ** (k + 1) / (k + 1)
        rational = rational + term
    return LogAntiderivative(rational, logs)


def antiderivative_value(phi: LogAntiderivative, v: Symbol, point) -> FactoredRat:
    """Evaluate the rational part of a primitive at a point (INFINITY allowed).

    Requires the primitive to be log-free; endpoint evaluation of kind-III
    paths never meets a logarithm because the integrand is residue-free.
    """
    if phi.log_terms:
        raise ExpansionError("endpoint evaluation requires a log-free primitive")
    f = phi.rational_part
    ctx = f.ctx
    if point is INFINITY:
        g, u = at_infinity(f, v)
        return limit_at(g, u, FactoredRat.zero(ctx))
    return limit_at(f, v, point if isinstance(point, FactoredRat) else FactoredRat.const(ctx, point))


def pairing_residue(phi: LogAntiderivative, omega: FactoredRat, v: Symbol, point) -> FactoredRat:
    """Residue at ``point`` of phi(v) * omega(v) dv for a log-bearing primitive.

    Log terms are expanded analytically around the residue point; the
    constant branch log(point - a) drops because omega is residue-free,
    which is asserted.
    """
    ctx = omega.ctx
    total = residue(phi.rational_part * omega, v, point)
    if not phi.log_terms:
        return total
    if point is INFINITY:
        raise ExpansionError("log-bearing primitive paired at infinity is unsupported")
    if not isinstance(point, FactoredRat):
        point = FactoredRat.const(ctx, point)
    omega_res = residue(omega, v, point)
    if not omega_res.is_zero():
        raise ExpansionError("residue of the paired differential must vanish at the point")
    series = None
    for coeff, branch in phi.log_terms:
        if (point - branch).is_zero():
            raise ExpansionError("residue point coincides with a log branch point")
        if series is None:
            series = laurent(omega, v, point, -1)
        depth = -series.min_order()
        gap = point - branch
        inv_gap = gap.inv()
        power = FactoredRat.const(ctx, 1)
        contribution = FactoredRat.zero(ctx)
        for k in range(1, depth + 1):
            power = power * inv_gap
            log_coeff = power * Fraction((-1) ** (k - 1), k)
            low = -1 - k
            if low >= series.min_order():
                contribution = contribution + log_coeff * series.coeff(low)
        total = total + coeff * contribution
    return total
