"""Genus-zero spectral curve families on the rational line.

A curve family carries a rational parameterization (x(z), y(z)), a
hyperelliptic involution, a declared factorization of y dx, the chosen
half of the unramified zeros and poles of y dx with their residue
parameters, a time map, and optional generalized cycles.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .context import Context, Symbol, SymbolKind
from .poly import AlgebraError, ParamPoly, poly_div
from .ratfun import FactoredRat
from .series import INFINITY, at_infinity, laurent


class CurveError(Exception):
    pass


# -- points on P1 ------------------------------------------------------

def point_eq(a, b) -> bool:
    if a is INFINITY or b is INFINITY:
        return a is b
    return (a - b).is_zero()


def point_str(p) -> str:
    return "inf" if p is INFINITY else p.canonical_str()


def point_in(p, collection) -> bool:
    return any(point_eq(p, q) for q in collection)


# -- involutions -------------------------------------------------------

NEGATE = "negate"
INVERT = "invert"


@dataclass(frozen=True)
class Involution:
    """One of the two shipped involution shapes: z -> -z or z -> 1/z."""

    shape: str

    def apply_expr(self, f: FactoredRat, v: Symbol) -> FactoredRat:
        ctx = f.ctx
        zv = FactoredRat.var(ctx, v)
        return f.subs(v, -zv if self.shape == NEGATE else zv.inv())

    def apply_point(self, p):
        if self.shape == NEGATE:
            return INFINITY if p is INFINITY else -p
        if p is INFINITY:
            return None  # caller substitutes the zero of the chart
        if p.is_zero():
            return INFINITY
        return p.inv()

    def image(self, ctx: Context, p):
        out = self.apply_point(p)
        return FactoredRat.zero(ctx) if out is None else out

    def fixed_points(self, ctx: Context) -> list:
        if self.shape == NEGATE:
            return [FactoredRat.zero(ctx), INFINITY]
        return [FactoredRat.const(ctx, 1), FactoredRat.const(ctx, -1)]


def involution_from_expr(expr: FactoredRat, v: Symbol) -> Involution:
    """Recognize a declared involution, checking involutivity first."""
    ctx = expr.ctx
    zv = FactoredRat.var(ctx, v)
    if (expr - zv).is_zero():
        raise CurveError("sigma must differ from the identity")
    composed = expr.subs(v, expr)
    if not (composed - zv).is_zero():
        raise CurveError("sigma is not an involution")
    if (expr + zv).is_zero():
        return Involution(NEGATE)
    if (expr - zv.inv()).is_zero():
        return Involution(INVERT)
    raise CurveError("only the involutions -z and 1/z are supported")


# -- curve data --------------------------------------------------------

@dataclass
class PPlusPoint:
    point: object  # FactoredRat or INFINITY
    mu: Symbol


@dataclass
class GeneralizedCycle:
    kind: str  # "II" or "III"
    location: object  # FactoredRat or INFINITY
    lam: FactoredRat | None  # weight in the curve variable; None means 1
    partner: object = None  # optional second residue point for kind II


@dataclass
class TimeSpec:
    value: FactoredRat  # T(s) in the generator
    cycle: GeneralizedCycle | None


@dataclass
class CurveFamily:
    ctx: Context
    name: str
    zsym: Symbol
    xsym: Symbol
    x: FactoredRat
    y: FactoredRat
    sigma: Involution
    ydx_num: list[tuple[ParamPoly, int]]
    ydx_den: list[tuple[ParamPoly, int]]
    ydx_scalar: FactoredRat
    invariant: FactoredRat  # image of z^2 (negate) or z + 1/z (invert) in x
    generator: Symbol
    time: TimeSpec
    points: list[PPlusPoint] = field(default_factory=list)
    f0: FactoredRat | None = None

    def x_at(self, v: Symbol) -> FactoredRat:
        return self.x.subs(self.zsym, FactoredRat.var(self.ctx, v))

    def y_at(self, v: Symbol) -> FactoredRat:
        return self.y.subs(self.zsym, FactoredRat.var(self.ctx, v))

    def dx(self, v: Symbol) -> FactoredRat:
        return self.x_at(v).derivative(v)

    def ydx_value(self, v: Symbol) -> FactoredRat:
        """y dx / dz as a factored rational function of v."""
        out = self.ydx_scalar
        zv = FactoredRat.var(self.ctx, v)
        for f, m in self.ydx_num:
            out = out * FactoredRat(f).subs(self.zsym, zv) ** m
        for f, m in self.ydx_den:
            out = out * FactoredRat(f).subs(self.zsym, zv).inv() ** m
        return out

    def ydx_inverse(self, v: Symbol) -> FactoredRat:
        """1/(y dx/dz) with the declared factors as the denominator."""
        zv = FactoredRat.var(self.ctx, v)
        out = self.ydx_scalar.inv()
        for f, m in self.ydx_den:
            out = out * FactoredRat(f).subs(self.zsym, zv) ** m
        for f, m in self.ydx_num:
            out = out * FactoredRat(f).subs(self.zsym, zv).inv() ** m
        return out


# -- differential building blocks -------------------------------------

def bidifferential(ctx: Context, v0: Symbol, v1: Symbol) -> FactoredRat:
    """B(z0, z1) = dz0 dz1/(z0-z1)^2 with the differentials stripped."""
    diff = FactoredRat.var(ctx, v0) - FactoredRat.var(ctx, v1)
    return diff.inv() ** 2


def omega02_value(curve: CurveFamily, v0: Symbol, v1: Symbol) -> FactoredRat:
    """-B(z0, sigma(z1)) including the sigma-pullback Jacobian."""
    ctx = curve.ctx
    z0 = FactoredRat.var(ctx, v0)
    z1 = FactoredRat.var(ctx, v1)
    if curve.sigma.shape == NEGATE:
        return (z0 + z1).inv() ** 2
    return (z0 * z1 - 1).inv() ** 2


def eta_value(curve: CurveFamily, p, v0: Symbol) -> FactoredRat:
    """Third-kind differential with residues +1 at p and -1 at sigma(p)."""
    ctx = curve.ctx
    if point_in(p, curve.sigma.fixed_points(ctx)):
        raise CurveError(f"eta is degenerate at the ramification point {point_str(p)}")
    z0 = FactoredRat.var(ctx, v0)
    sp = curve.sigma.apply_point(p)
    out = FactoredRat.zero(ctx)
    if p is not INFINITY:
        out = out + (z0 - p).inv()
    if sp is INFINITY:
        return out
    sp = FactoredRat.zero(ctx) if sp is None else sp
    return out - (z0 - sp).inv()


def x_difference_inv_sq(curve: CurveFamily, a: Symbol, b: Symbol) -> FactoredRat:
    """1/(x(a)-x(b))^2 built from the known zeros a = b and a = sigma(b).

    Keeps the denominator as explicit factors linear in each variable,
    which whole-factor cancellation and the residue engine both need.
    """
    ctx = curve.ctx
    diff = curve.x_at(a) - curve.x_at(b)
    av = ParamPoly.var(ctx, a)
    bv = ParamPoly.var(ctx, b)
    if curve.sigma.shape == NEGATE:
        known = [av - bv, av + bv]
    else:
        known = [av - bv, av * bv - ParamPoly.const(ctx, 1)]
    rest = diff.num
    for f in known:
        quotient = poly_div(rest, f)
        if quotient is None:
            raise CurveError("x-difference does not factor through the sheet map")
        rest = quotient
    den = [(f, 2) for f in known]
    if not rest.is_constant():
        den.append((rest, 2))
        rest = ParamPoly.const(ctx, 1)
    num = rest.constant_value() ** -2 if rest.is_constant() and rest.constant_value() != 1 else 1
    out = FactoredRat(diff.den_poly() ** 2 * num, den)
    return out


# -- push-forward to the x-line ----------------------------------------

def _coeffs_symmetric(p: ParamPoly, v: Symbol, center: int) -> dict[int, ParamPoly] | None:
    """Read p as z^center * (sum over k of c_k (z^k + z^-k)); None if asymmetric."""
    by_deg = p.coeffs_in(v)
    out: dict[int, ParamPoly] = {}
    seen = set()
    for d, c in by_deg.items():
        k = d - center
        if k < 0:
            continue
        mirror = by_deg.get(center - k)
        if k > 0 and (mirror is None or not (mirror - c).is_zero()):
            return None
        out[k] = c
        seen.add(center - k)
    for d in by_deg:
        if d < center and d not in seen:
            return None
    return out


def pushforward_to_x(curve: CurveFamily, f: FactoredRat, v: Symbol) -> FactoredRat:
    """Rewrite a sigma-invariant function of the curve variable in x.

    The result uses the declared invariant generator (the image of z^2 or
    z' + 1/z' in x); denominators are re-split over the curve's special
    x-values so downstream pole analysis stays factor-based.
    """
    ctx = curve.ctx
    if not (curve.sigma.apply_expr(f, v) - f).is_zero():
        raise CurveError("push-forward requires a sigma-invariant function")
    num = f.num
    den = f.den_poly()
    if curve.sigma.shape == NEGATE:
        neg = FactoredRat.var(ctx, v)
        den_flip = FactoredRat(den).subs(v, -neg).num
        num = num * den_flip
        den = den * den_flip
        num_x = _even_to_x(curve, num, v)
        den_x = _even_to_x(curve, den, v)
    else:
        d = den.degree(v)
        rev = _reverse_poly(ctx, den, v, d)
        num = num * rev
        den = den * rev
        num_x = _palindromic_to_x(curve, num, v, d)
        den_x = _palindromic_to_x(curve, den, v, d)
    if num_x is None or den_x is None:
        raise CurveError("push-forward left a residual odd part")
    out = num_x * den_x.inv()
    return _refactor_special(curve, out)


def _even_to_x(curve: CurveFamily, p: ParamPoly, v: Symbol, ) -> FactoredRat | None:
    by_deg = p.coeffs_in(v)
    if any(d % 2 for d, c in by_deg.items() if not c.is_zero()):
        return None
    ctx = curve.ctx
    w = curve.invariant
    out = FactoredRat.zero(ctx)
    for d, c in by_deg.items():
        out = out + FactoredRat(c) * w ** (d // 2)
    return out


def _reverse_poly(ctx: Context, p: ParamPoly, v: Symbol, d: int) -> ParamPoly:
    by_deg = p.coeffs_in(v)
    out = ParamPoly.zero(ctx)
    vp = ParamPoly.var(ctx, v)
    for k, c in by_deg.items():
        out = out + c * vp ** (d - k)
    return out


def _palindromic_to_x(curve: CurveFamily, p: ParamPoly, v: Symbol, center: int):
    """Convert z^center * W(z + 1/z) to W evaluated at the invariant in x."""
    sym = _coeffs_symmetric(p, v, center)
    if sym is None:
        return None
    ctx = curve.ctx
    w = curve.invariant
    out = FactoredRat.zero(ctx)
    for k in sorted(sym):
        c = sym[k]
        if k == 0:
            out = out + FactoredRat(c)
        else:
            # basis p_k(w) = z^k + z^-k with p_0 = 2, p_1 = w
            out = out + FactoredRat(c) * _pk(ctx, w, k)
    return out


def _pk(ctx: Context, w: FactoredRat, k: int) -> FactoredRat:
    prev = FactoredRat.const(ctx, 2)
    cur = w
    if k == 0:
        return prev
    for _ in range(k - 1):
        prev, cur = cur, w * cur - prev
    return cur


def special_x_values(curve: CurveFamily) -> list:
    """Finite x-images of ramification and declared special points."""
    ctx = curve.ctx
    out = []

    def add(p):
        if p is INFINITY:
            return
        try:
            val = curve.x.subs(curve.zsym, p)
        except Exception:
            return
        if not point_in(val, out):
            out.append(val)

    for r in curve.sigma.fixed_points(ctx):
        add(r)
    for pp in curve.points:
        add(pp.point)
    return out


def _refactor_special(curve: CurveFamily, f: FactoredRat) -> FactoredRat:
    """Split nonlinear x-denominator factors over the special x-values."""
    ctx = curve.ctx
    xv = ParamPoly.var(ctx, curve.xsym)
    candidates = [
        xv * val.den_poly() - val.num for val in special_x_values(curve)
    ]
    den_new: dict[ParamPoly, int] = {}
    num = f.num
    for factor, mult in f.den:
        if factor.degree(curve.xsym) <= 1:
            den_new[factor] = den_new.get(factor, 0) + mult
            continue
        remaining = factor
        for cand in candidates:
            while remaining.degree(curve.xsym) > 1:
                quotient = poly_div(remaining, cand)
                if quotient is None:
                    break
                remaining = quotient
                den_new[cand] = den_new.get(cand, 0) + mult
        den_new[remaining] = den_new.get(remaining, 0) + mult
    return FactoredRat(num, den_new.items())


# -- differential order and classification -----------------------------

def differential_order(curve: CurveFamily, value: FactoredRat, v: Symbol, point) -> int:
    """Order of vanishing of (value dv) at the point, poles negative."""
    ctx = curve.ctx
    if point is INFINITY:
        g, u = at_infinity(value, v)
        g = g * -(FactoredRat.var(ctx, u).inv() ** 2)
        series = laurent(g, u, FactoredRat.zero(ctx), 6)
        return series.min_order()
    series = laurent(value, v, point, 6)
    return series.min_order()


@dataclass
class PointClassification:
    ramification: list
    effective: list
    p_plus: list[PPlusPoint]
    p_plus_zero: list
    p_plus_pole: list

    def p_plus_points(self) -> list:
        return [pp.point for pp in self.p_plus]


def classify(curve: CurveFamily) -> PointClassification:
    ctx = curve.ctx
    ydx = curve.ydx_value(curve.zsym)
    ram = curve.sigma.fixed_points(ctx)
    effective = [
        r for r in ram if differential_order(curve, ydx, curve.zsym, r) >= 0
    ]

    special: list = []
    for f, _ in list(curve.ydx_num) + list(curve.ydx_den):
        if not f.involves(curve.zsym):
            continue
        if f.degree(curve.zsym) != 1:
            raise CurveError(
                f"declared factor {f.canonical_str()} is nonlinear in the curve variable"
            )
        by_deg = f.coeffs_in(curve.zsym)
        root = -FactoredRat(by_deg.get(0, ParamPoly.zero(ctx))) / FactoredRat(by_deg[1])
        if not point_in(root, special):
            special.append(root)
    if differential_order(curve, ydx, curve.zsym, INFINITY) != 0:
        special.append(INFINITY)
    unram = [p for p in special if not point_in(p, ram)]

    chosen = [pp.point for pp in curve.points]
    images = [curve.sigma.image(ctx, p) for p in chosen]
    covered = chosen + images
    for p in chosen:
        if point_in(p, images):
            raise CurveError(
                f"selection is not a transversal: {point_str(p)} meets its own image"
            )
    for p in unram:
        if not point_in(p, covered):
            raise CurveError(
                f"unramified special point {point_str(p)} is not covered by the selection"
            )
    for p in chosen:
        if not point_in(p, unram):
            raise CurveError(f"selected point {point_str(p)} is not a special point")

    p_zero, p_pole = [], []
    for pp in curve.points:
        order = differential_order(curve, ydx, curve.zsym, pp.point)
        (p_zero if order > 0 else p_pole).append(pp.point)
    return PointClassification(ram, effective, list(curve.points), p_zero, p_pole)


# -- validation --------------------------------------------------------

@dataclass
class CheckResult:
    name: str
    ok: bool
    witness: str | None = None


def validate(curve: CurveFamily) -> list[CheckResult]:
    ctx = curve.ctx
    z = curve.zsym
    results = []

    x_flip = curve.sigma.apply_expr(curve.x, z)
    ok = (x_flip - curve.x).is_zero()
    results.append(CheckResult("x-sigma-invariant", ok, None if ok else (x_flip - curve.x).canonical_str()))

    y_flip = curve.sigma.apply_expr(curve.y, z)
    ok = (y_flip + curve.y).is_zero()
    results.append(CheckResult("y-sigma-antiinvariant", ok, None if ok else (y_flip + curve.y).canonical_str()))

    declared = curve.ydx_value(z)
    actual = curve.y * curve.x.derivative(z)
    ok = (declared - actual).is_zero()
    results.append(CheckResult("ydx-factorization", ok, None if ok else (declared - actual).canonical_str()))

    zv = FactoredRat.var(ctx, z)
    target = zv * zv if curve.sigma.shape == NEGATE else zv + zv.inv()
    inv_back = curve.invariant.subs(curve.xsym, curve.x)
    ok = (inv_back - target).is_zero()
    results.append(CheckResult("invariant-generator", ok, None if ok else inv_back.canonical_str()))

    try:
        q0 = pushforward_to_x(curve, curve.y * curve.y, z)
        back = q0.subs(curve.xsym, curve.x)
        ok = (back - curve.y * curve.y).is_zero()
        results.append(CheckResult("defining-equation", ok, None if ok else q0.canonical_str()))
    except CurveError as err:
        results.append(CheckResult("defining-equation", False, str(err)))

    try:
        classify(curve)
        results.append(CheckResult("point-selection", True))
    except CurveError as err:
        results.append(CheckResult("point-selection", False, str(err)))
    return results


def curve_q0(curve: CurveFamily) -> FactoredRat:
    """The defining rational function: y^2 as a function of x."""
    return pushforward_to_x(curve, curve.y * curve.y, curve.zsym)
