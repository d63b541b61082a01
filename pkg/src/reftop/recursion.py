"""The refined recursion engine.

Computes the multidifferentials of the full refined recursion and of its
top-degree sector by exact residue evaluation, with memoization keyed by
(mode, doubled order, variable count).  Also provides the loop-equation
remainder, the property suite, the dilaton identity, and the higher free
energies.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .context import Context, Symbol, SymbolKind
from .curve import (
    CheckResult,
    CurveError,
    CurveFamily,
    PointClassification,
    classify,
    eta_value,
    omega02_value,
    point_eq,
    point_in,
    point_str,
    x_difference_inv_sq,
    NEGATE,
)
from .poly import ParamPoly, poly_div
from .ratfun import FactoredRat, PoleHitError
from .series import (
    INFINITY,
    ExpansionError,
    antiderivative,
    at_infinity,
    laurent,
    pairing_residue,
    pole_roots,
    residue,
)

FULL = "full"
QTOP = "qtop"


class RecursionError_(Exception):
    pass


@dataclass
class MultiDiff:
    """A multidifferential: doubled order, variable count, stripped value."""

    g2: int
    nvars: int
    value: FactoredRat

    def canonical_str(self) -> str:
        return self.value.canonical_str()


def rename(value: FactoredRat, ctx: Context, mapping: list[tuple[Symbol, object]]) -> FactoredRat:
    """Simultaneous substitution via a two-phase temporary rename."""
    staged = []
    for i, (src, dst) in enumerate(mapping):
        tmp = ctx.fresh_point(f"_r{i}")
        if value.involves(tmp):
            raise RecursionError_("temporary rename symbol collision")
        value = value.subs(src, FactoredRat.var(ctx, tmp))
        staged.append((tmp, dst))
    for tmp, dst in staged:
        if isinstance(dst, Symbol):
            dst = FactoredRat.var(ctx, dst)
        value = value.subs(tmp, dst)
    return value


class RecursionCache:
    def __init__(self, curve: CurveFamily, mode: str):
        if mode not in (FULL, QTOP):
            raise ValueError(f"unknown mode {mode!r}")
        self.curve = curve
        self.mode = mode
        self.cls: PointClassification = classify(curve)
        self.ctx = curve.ctx
        self.qsym = self.ctx.get("Q")
        self.entries: dict[tuple[int, int], MultiDiff] = {}
        self._base_cases()

    # -- base cases ----------------------------------------------------

    def _base_cases(self) -> None:
        ctx = self.ctx
        curve = self.curve
        z0 = ctx.point_var(0)
        z1 = ctx.point_var(1)
        w01 = curve.y_at(z0) * curve.dx(z0)
        self.entries[(0, 1)] = MultiDiff(0, 1, w01)
        self.entries[(0, 2)] = MultiDiff(0, 2, omega02_value(curve, z0, z1))

        # -d(dy-difference)/(dy-difference) = -y'/y, kept in declared factors
        log_term = -(curve.y_at(z0).derivative(z0)) * curve.dx(z0) * curve.ydx_inverse(z0)
        total = log_term
        for pp in self.cls.p_plus:
            total = total + FactoredRat.var(ctx, pp.mu) * eta_value(curve, pp.point, z0)
        prefactor = FactoredRat.const(ctx, Fraction(1, 2))
        if self.mode == FULL:
            prefactor = prefactor * FactoredRat.var(ctx, self.qsym)
        self.entries[(1, 1)] = MultiDiff(1, 1, prefactor * total)

    # -- lookup --------------------------------------------------------

    def get(self, g2: int, n1: int) -> MultiDiff:
        key = (g2, n1)
        if key not in self.entries:
            self.entries[key] = self._compute(g2, n1)
        return self.entries[key]

    def value_at(self, g2: int, n1: int, args: list) -> FactoredRat:
        entry = self.get(g2, n1)
        mapping = [(self.ctx.point_var(i), args[i]) for i in range(n1)]
        return rename(entry.value, self.ctx, mapping)

    # -- recursion numerator -------------------------------------------

    def rec_value(self, g2: int, n1: int, p: Symbol, J: list[Symbol]) -> FactoredRat:
        """The recursion numerator at (g2, n1), evaluated at the point p."""
        ctx = self.ctx
        curve = self.curve
        pieces = []

        for g2a in range(g2 + 1):
            g2b = g2 - g2a
            for size in range(len(J) + 1):
                for subset in combinations(range(len(J)), size):
                    S = [J[i] for i in subset]
                    Sc = [J[i] for i in range(len(J)) if i not in subset]
                    if (g2a == 0 and not S) or (g2b == 0 and not Sc):
                        continue
                    a = self.value_at(g2a, len(S) + 1, [p] + S)
                    b = self.value_at(g2b, len(Sc) + 1, [p] + Sc)
                    pieces.append(a * b)

        dxp = curve.dx(p)
        for t in J:
            rest = [u for u in J if u is not t]
            kernel = x_difference_inv_sq(curve, p, t) * dxp * curve.dx(t)
            pieces.append(kernel * self.value_at(g2, n1 - 1, [p] + rest))

        if self.mode == FULL and g2 >= 2:
            diag = ctx.fresh_point("_d")
            val = self.value_at(g2 - 2, n1 + 1, [p, diag] + J)
            try:
                limit = val.subs(diag, FactoredRat.var(ctx, p))
            except PoleHitError:
                series = laurent(val, diag, FactoredRat.var(ctx, p), 0)
                if series.min_order() < 0:
                    raise RecursionError_("singular diagonal limit in the recursion numerator")
                limit = series.coeff(0)
            pieces.append(limit)

        if g2 >= 1:
            h = self.value_at(g2 - 1, n1, [p] + J) * self._dx_inverse(p)
            term = dxp * h.derivative(p)
            if self.mode == FULL:
                term = term * FactoredRat.var(ctx, self.qsym)
            pieces.append(term)
        return FactoredRat.sum_terms(ctx, pieces)

    def _dx_inverse(self, v: Symbol) -> FactoredRat:
        """1/x'(v) via the declared y dx factors to keep factors linear."""
        return self.curve.y_at(v) * self.curve.ydx_inverse(v)

    # -- the residue formula -------------------------------------------

    def _compute(self, g2: int, n1: int) -> MultiDiff:
        if g2 + n1 < 3:
            raise RecursionError_(f"order (2g={g2}, n+1={n1}) is a base case or unstable")
        ctx = self.ctx
        curve = self.curve
        varlist = [ctx.point_var(i) for i in range(n1)]
        J = varlist[1:]

        self._resolve_dependencies(g2, n1)
        p = ctx.fresh_point("_p")
        eta = self._eta_in(p, varlist[0])
        kernel = eta * curve.ydx_inverse(p) * Fraction(1, 4)
        integrand = self._resplit(kernel * self.rec_value(g2, n1, p, J))

        plus_points = [FactoredRat.var(ctx, v) for v in varlist]
        plus_points += [pp.point for pp in self.cls.p_plus]
        minus_points = list(self.cls.ramification)
        minus_points += [curve.sigma.image(ctx, q) for q in plus_points]

        pieces = []
        seen_infinity = False
        candidates = [root for root, _ in pole_roots(integrand, p)] + [INFINITY]
        for root in candidates:
            if root is INFINITY:
                seen_infinity = True
            res = residue(integrand, p, root)
            if point_in(root, plus_points):
                pieces.append(res)
            elif point_in(root, minus_points):
                pieces.append(-res)
            elif not res.is_zero():
                raise RecursionError_(
                    f"pole at {point_str(root)} with nonzero residue lies on neither contour"
                )
        assert seen_infinity
        value = self._resplit(FactoredRat.sum_terms(ctx, pieces))
        return MultiDiff(g2, n1, value)

    def _point_split_candidates(self, v: Symbol) -> list[ParamPoly]:
        """Linear polynomials in v vanishing at the curve's special points."""
        ctx = self.ctx
        vp = ParamPoly.var(ctx, v)
        pts = list(self.cls.ramification)
        for pp in self.cls.p_plus:
            pts.append(pp.point)
            pts.append(self.curve.sigma.image(ctx, pp.point))
        out = []
        for s in pts:
            if s is INFINITY:
                continue
            out.append(vp * s.den_poly() - s.num)
        return out

    def _resplit(self, value: FactoredRat) -> FactoredRat:
        """Split nonlinear denominator factors over the special points.

        Residues taken at involution images can leave products such as
        (z0-1)(z0+1) expanded inside a single denominator factor; the
        downstream pole analysis needs them separated again.
        """
        den_new: dict[ParamPoly, int] = {}
        changed = False
        for factor, mult in value.den:
            stack = [(factor, mult)]
            while stack:
                f, m = stack.pop()
                v = next(
                    (
                        s
                        for s in f.involved_symbols()
                        if s.kind is SymbolKind.POINT and f.degree(s) > 1
                    ),
                    None,
                )
                split = None
                if v is not None:
                    for cand in self._point_split_candidates(v):
                        quotient = poly_div(f, cand)
                        if quotient is not None:
                            split = (quotient, cand)
                            break
                if split is None:
                    den_new[f] = den_new.get(f, 0) + m
                else:
                    changed = True
                    stack.append((split[0], m))
                    stack.append((split[1], m))
        if not changed:
            return value
        return FactoredRat(value.num, den_new.items())

    def _resolve_dependencies(self, g2: int, n1: int) -> None:
        for g2a in range(g2 + 1):
            for k in range(n1):
                key = (g2a, k + 1)
                if key == (g2, n1) or key == (0, 1):
                    continue
                if g2a + k + 1 >= 3 or key in ((0, 2), (1, 1)):
                    self.get(*key)
        if n1 >= 2:
            self.get(g2, n1 - 1)
        if self.mode == FULL and g2 >= 2:
            self.get(g2 - 2, n1 + 1)
        if g2 >= 1 and (g2 - 1, n1) != (0, 1):
            self.get(g2 - 1, n1)

    def _eta_in(self, p: Symbol, v0: Symbol) -> FactoredRat:
        """eta^p(z0) as a rational function of the residue point p."""
        ctx = self.ctx
        z0 = FactoredRat.var(ctx, v0)
        pv = FactoredRat.var(ctx, p)
        if self.curve.sigma.shape == NEGATE:
            return (z0 - pv).inv() - (z0 + pv).inv()
        return (z0 - pv).inv() - pv * (pv * z0 - 1).inv()

    # -- loop equation remainder ---------------------------------------

    def loop_remainder(self, g2: int, n1: int) -> MultiDiff:
        ctx = self.ctx
        z0 = ctx.point_var(0)
        J = [ctx.point_var(i) for i in range(1, n1)]
        omega = self.get(g2, n1).value
        rec = self.rec_value(g2, n1, z0, J)
        value = omega + rec * self.curve.ydx_inverse(z0) * Fraction(1, 2)
        return MultiDiff(g2, n1, value)


# -- property suite ----------------------------------------------------

def computed_orders(max_chi: int) -> list[tuple[int, int]]:
    """Stable orders (2g, n+1) with 0 <= 2g-2+n <= max_chi, by weight."""
    out = []
    for chi in range(max_chi + 1):
        for g2 in range(chi + 3):
            n1 = chi + 3 - g2
            if n1 >= 1:
                out.append((g2, n1))
    return out


def check_properties(cache: RecursionCache, max_chi: int) -> list[CheckResult]:
    results = []
    for g2, n1 in computed_orders(max_chi):
        md = cache.get(g2, n1)
        label = f"(2g={g2},n+1={n1})"
        results.append(_check_symmetry(cache, md, label))
        results.extend(_check_poles(cache, md, label))
        results.append(_check_q_degree(cache, md, label))
        results.append(_check_loop_equation(cache, g2, n1, label))
    return results


def _check_symmetry(cache: RecursionCache, md: MultiDiff, label: str) -> CheckResult:
    ctx = cache.ctx
    varlist = [ctx.point_var(i) for i in range(md.nvars)]
    for i in range(md.nvars):
        for j in range(i + 1, md.nvars):
            swapped = rename(
                md.value, ctx, [(varlist[i], varlist[j]), (varlist[j], varlist[i])]
            )
            if not (swapped - md.value).is_zero():
                return CheckResult(
                    f"symmetry {label}", False, f"swap {varlist[i].name}<->{varlist[j].name}"
                )
    return CheckResult(f"symmetry {label}", True)


def _check_poles(cache: RecursionCache, md: MultiDiff, label: str) -> list[CheckResult]:
    ctx = cache.ctx
    curve = cache.curve
    z0 = ctx.point_var(0)
    J = [ctx.point_var(i) for i in range(1, md.nvars)]
    permitted = list(cache.cls.effective)
    permitted += [curve.sigma.image(ctx, FactoredRat.var(ctx, v)) for v in J]
    permitted += [curve.sigma.image(ctx, p) for p in cache.cls.p_plus_zero]

    results = []
    ok_loc, ok_res = True, True
    witness_loc = witness_res = None
    for root, _ in pole_roots(md.value, z0):
        if not point_in(root, permitted):
            ok_loc = False
            witness_loc = point_str(root)
        res = residue(md.value, z0, root)
        if not res.is_zero():
            ok_res = False
            witness_res = point_str(root)
    inf_order = _infinity_order(md.value, z0)
    if inf_order < 0 and not point_in(INFINITY, permitted):
        ok_loc = False
        witness_loc = "inf"
    res_inf = residue(md.value, z0, INFINITY)
    if not res_inf.is_zero():
        ok_res = False
        witness_res = "inf"
    results.append(CheckResult(f"pole-locations {label}", ok_loc, witness_loc))
    results.append(CheckResult(f"residue-free {label}", ok_res, witness_res))
    return results


def _infinity_order(value: FactoredRat, v: Symbol) -> int:
    g, u = at_infinity(value, v)
    g = g * -(FactoredRat.var(value.ctx, u).inv() ** 2)
    return laurent(g, u, FactoredRat.zero(value.ctx), 4).min_order()


def _check_q_degree(cache: RecursionCache, md: MultiDiff, label: str) -> CheckResult:
    q = cache.qsym
    if any(f.involves(q) for f, _ in md.value.den):
        return CheckResult(f"q-degree {label}", False, "denominator depends on Q")
    degree = md.value.num.degree(q)
    ok = degree <= md.g2 if cache.mode == FULL else not md.value.involves(q)
    return CheckResult(f"q-degree {label}", ok, None if ok else f"degree {degree}")


def _check_loop_equation(cache: RecursionCache, g2: int, n1: int, label: str) -> CheckResult:
    """The remainder definition is an identity; assert exact consistency."""
    md = cache.get(g2, n1)
    remainder = cache.loop_remainder(g2, n1)
    lhs = remainder.value - md.value
    z0 = cache.ctx.point_var(0)
    J = [cache.ctx.point_var(i) for i in range(1, n1)]
    rhs = cache.rec_value(g2, n1, z0, J) * cache.curve.ydx_inverse(z0) * Fraction(1, 2)
    ok = (lhs - rhs).is_zero()
    return CheckResult(f"loop-equation {label}", ok)


def qtop_matches_top_coefficient(
    full_cache: RecursionCache, qtop_cache: RecursionCache, max_chi: int
) -> list[CheckResult]:
    results = []
    q = full_cache.qsym
    for g2, n1 in computed_orders(max_chi):
        full_val = full_cache.get(g2, n1).value
        coeffs = full_val.num.coeffs_in(q)
        top = FactoredRat(coeffs.get(g2, ParamPoly.zero(full_cache.ctx)), full_val.den)
        ok = (top - qtop_cache.get(g2, n1).value).is_zero()
        results.append(CheckResult(f"top-coefficient (2g={g2},n+1={n1})", ok))
    return results


def unrefined_limit_checks(cache: RecursionCache, max_chi: int) -> list[CheckResult]:
    """Setting the refinement to zero kills all half-integer orders."""
    results = []
    q = cache.qsym
    zero = FactoredRat.zero(cache.ctx)
    for g2, n1 in computed_orders(max_chi):
        val = cache.get(g2, n1).value.subs(q, zero)
        if g2 % 2:
            ok = val.is_zero()
            results.append(CheckResult(f"unrefined-kills (2g={g2},n+1={n1})", ok))
    return results


# -- dilaton identity and free energies --------------------------------

def _phi(cache: RecursionCache):
    z0 = cache.ctx.point_var(0)
    return antiderivative(cache.get(0, 1).value, z0), z0


def dilaton_rhs(cache: RecursionCache, g2: int, n1: int) -> FactoredRat:
    """Residue pairing of a primitive of ydx against the next entry."""
    ctx = cache.ctx
    curve = cache.curve
    phi, z0 = _phi(cache)
    varlist = [ctx.point_var(i) for i in range(n1)]
    p = ctx.fresh_point("_q")
    omega_next = cache.value_at(g2, n1 + 1, [p] + varlist)
    phi_p = _reseat_antiderivative(phi, ctx, z0, p)

    points = [r for r in cache.cls.ramification if not _is_x_pole(curve, r)]
    points += [curve.sigma.image(ctx, FactoredRat.var(ctx, v)) for v in varlist]
    points += [curve.sigma.image(ctx, q) for q in cache.cls.p_plus_zero]
    total = FactoredRat.zero(ctx)
    for pt in _dedupe(points):
        if pt is INFINITY:
            if phi_p.log_terms:
                raise ExpansionError("log-bearing primitive paired at infinity")
            total = total + residue(phi_p.rational_part * omega_next, p, INFINITY)
        else:
            total = total + pairing_residue(phi_p, omega_next, p, pt)
    return total


def _is_x_pole(curve: CurveFamily, pt) -> bool:
    ctx = curve.ctx
    z = curve.zsym
    xval = curve.x
    if pt is INFINITY:
        g, u = at_infinity(xval, z)
        return laurent(g, u, FactoredRat.zero(ctx), 2).min_order() < 0
    return laurent(xval, z, pt, 2).min_order() < 0


def _dedupe(points: list) -> list:
    out = []
    for pt in points:
        if not point_in(pt, out):
            out.append(pt)
    return out


def _reseat_antiderivative(phi, ctx, src: Symbol, dst: Symbol):
    from .series import LogAntiderivative

    rational = phi.rational_part.subs(src, FactoredRat.var(ctx, dst))
    return LogAntiderivative(rational, list(phi.log_terms))


def dilaton_check(cache: RecursionCache, g2: int, n1: int) -> CheckResult:
    md = cache.get(g2, n1)
    coefficient = 2 - g2 - n1
    rhs = dilaton_rhs(cache, g2, n1)
    ok = (rhs - coefficient * md.value).is_zero()
    return CheckResult(
        f"dilaton (2g={g2},n+1={n1})", ok, None if ok else rhs.canonical_str()
    )


def free_energy(cache: RecursionCache, g2: int) -> FactoredRat:
    """Free energy of order 2g > 2 from the primitive pairing against (g,1)."""
    if g2 <= 2:
        raise RecursionError_("free energy by residue pairing needs 2g > 2")
    value = dilaton_rhs(cache, g2, 0)
    return value * FactoredRat.const(cache.ctx, Fraction(1, 2 - g2))
