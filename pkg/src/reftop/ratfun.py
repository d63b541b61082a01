"""Rational functions with factored denominators.

The denominator is kept as a multiset of monic factors; cancellation is by
whole factors only, which is complete for the linear-in-point-variable
factors the recursion produces.  No general factorization is ever invoked.
"""

from __future__ import annotations

from fractions import Fraction

from .context import Context, Symbol
from .poly import AlgebraError, ParamPoly, poly_div


class PoleHitError(Exception):
    """A substitution made a denominator factor vanish identically."""


class DivisionByZeroExpr(Exception):
    pass


class FactoredRat:
    """num / prod(factor^mult) with monic, pairwise distinct factors."""

    __slots__ = ("ctx", "num", "den")

    def __init__(self, num: ParamPoly, den=()):  # den: iterable of (ParamPoly, int)
        self.ctx = num.ctx
        scale = Fraction(1)
        merged: dict[ParamPoly, int] = {}
        if not num.is_zero():
            for factor, mult in den:
                if mult <= 0:
                    raise AlgebraError("denominator multiplicity must be positive")
                if factor.is_zero():
                    raise DivisionByZeroExpr("zero denominator factor")
                if factor.is_constant():
                    scale *= factor.constant_value() ** mult
                    continue
                _, lead = factor.leading()
                if lead != 1:
                    factor = factor * (1 / lead)
                    scale *= lead**mult
                factor, monomial = _split_monomial(factor)
                for sym_index, e in monomial:
                    var = ParamPoly.var(num.ctx, num.ctx.symbols[sym_index])
                    merged[var] = merged.get(var, 0) + e * mult
                if not factor.is_constant():
                    merged[factor] = merged.get(factor, 0) + mult
            if scale != 1:
                num = num * (1 / scale)
            # whole-factor cancellation against the numerator
            for factor in list(merged):
                while merged[factor] > 0:
                    try:
                        quotient = poly_div(num, factor)
                    except AlgebraError:
                        quotient = None
                    if quotient is None:
                        break
                    num = quotient
                    merged[factor] -= 1
                if merged[factor] == 0:
                    del merged[factor]
        self.num = num
        self.den = tuple(sorted(merged.items(), key=lambda fm: fm[0].canonical_str()))

    # -- constructors -------------------------------------------------

    @classmethod
    def from_poly(cls, p: ParamPoly) -> "FactoredRat":
        return cls(p)

    @classmethod
    def const(cls, ctx: Context, value) -> "FactoredRat":
        return cls(ParamPoly.const(ctx, value))

    @classmethod
    def zero(cls, ctx: Context) -> "FactoredRat":
        return cls(ParamPoly.zero(ctx))

    @classmethod
    def var(cls, ctx: Context, sym: Symbol) -> "FactoredRat":
        return cls(ParamPoly.var(ctx, sym))

    # -- queries ------------------------------------------------------

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return not self.den and self.num.is_constant()

    def constant_value(self) -> Fraction:
        if self.den:
            raise AlgebraError("not a constant")
        return self.num.constant_value()

    def involves(self, sym: Symbol) -> bool:
        return self.num.involves(sym) or any(f.involves(sym) for f, _ in self.den)

    def den_poly(self) -> ParamPoly:
        out = ParamPoly.const(self.ctx, 1)
        for factor, mult in self.den:
            out = out * factor**mult
        return out

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = FactoredRat.const(self.ctx, other)
        if not isinstance(other, FactoredRat):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        raise TypeError("FactoredRat is not hashable; compare via canonical_str")

    # -- arithmetic ---------------------------------------------------

    def _coerce(self, other) -> "FactoredRat":
        if isinstance(other, FactoredRat):
            return other
        if isinstance(other, ParamPoly):
            return FactoredRat(other)
        if isinstance(other, (int, Fraction)):
            return FactoredRat.const(self.ctx, other)
        raise TypeError(f"cannot combine FactoredRat with {type(other)!r}")

    @staticmethod
    def sum_terms(ctx: Context, terms: list) -> "FactoredRat":
        """Sum over a single common denominator with one normalization pass."""
        terms = [t for t in terms if not t.is_zero()]
        if not terms:
            return FactoredRat.zero(ctx)
        # balanced pairwise reduction keeps intermediate numerators small
        while len(terms) > 1:
            terms = [
                terms[i] + terms[i + 1] if i + 1 < len(terms) else terms[i]
                for i in range(0, len(terms), 2)
            ]
        return terms[0]

    def __add__(self, other) -> "FactoredRat":
        other = self._coerce(other)
        common: dict[ParamPoly, int] = dict(self.den)
        for f, m in other.den:
            common[f] = max(common.get(f, 0), m)
        left = self.num
        right = other.num
        mine = dict(self.den)
        theirs = dict(other.den)
        for f, m in common.items():
            da = m - mine.get(f, 0)
            db = m - theirs.get(f, 0)
            if da:
                left = left * f**da
            if db:
                right = right * f**db
        return FactoredRat(left + right, common.items())

    __radd__ = __add__

    def __neg__(self) -> "FactoredRat":
        out = FactoredRat.__new__(FactoredRat)
        out.ctx = self.ctx
        out.num = -self.num
        out.den = self.den
        return out

    def __sub__(self, other) -> "FactoredRat":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "FactoredRat":
        return self._coerce(other) + (-self)

    def __mul__(self, other) -> "FactoredRat":
        if isinstance(other, (int, Fraction)):
            out = FactoredRat.__new__(FactoredRat)
            out.ctx = self.ctx
            out.num = self.num * Fraction(other)
            out.den = self.den if not out.num.is_zero() else ()
            return out
        other = self._coerce(other)
        den: dict[ParamPoly, int] = dict(self.den)
        for f, m in other.den:
            den[f] = den.get(f, 0) + m
        return FactoredRat(self.num * other.num, den.items())

    __rmul__ = __mul__

    def inv(self) -> "FactoredRat":
        if self.is_zero():
            raise DivisionByZeroExpr("division by the zero expression")
        num = ParamPoly.const(self.ctx, 1)
        for f, m in self.den:
            num = num * f**m
        return FactoredRat(num, [(self.num, 1)])

    def __truediv__(self, other) -> "FactoredRat":
        return self * self._coerce(other).inv()

    def __rtruediv__(self, other) -> "FactoredRat":
        return self._coerce(other) * self.inv()

    def __pow__(self, n: int) -> "FactoredRat":
        if n < 0:
            return self.inv() ** (-n)
        out = FactoredRat.const(self.ctx, 1)
        for _ in range(n):
            out = out * self
        return out

    # -- calculus -----------------------------------------------------

    def derivative(self, sym: Symbol) -> "FactoredRat":
        if not self.involves(sym):
            return FactoredRat.zero(self.ctx)
        factors = [f for f, _ in self.den]
        prod_all = ParamPoly.const(self.ctx, 1)
        for f in factors:
            prod_all = prod_all * f
        num = self.num.derivative(sym) * prod_all
        for i, (f, m) in enumerate(self.den):
            rest = ParamPoly.const(self.ctx, 1)
            for j, g in enumerate(factors):
                if j != i:
                    rest = rest * g
            num = num - self.num * f.derivative(sym) * rest * m
        den = [(f, m + 1) for f, m in self.den]
        return FactoredRat(num, den)

    def subs(self, sym: Symbol, value) -> "FactoredRat":
        """Exact substitution ``sym -> value`` (value may be rational in other symbols)."""
        value = self._coerce(value)
        if not self.involves(sym):
            return self
        num_s = _poly_subs(self.num, sym, value)
        den_new: dict[ParamPoly, int] = {}
        num_poly = num_s.num
        # exponents of value's denominator soaked up by numerator vs factors
        val_den_budget = {f: -m for f, m in num_s.den}
        for factor, mult in self.den:
            if not factor.involves(sym):
                den_new[factor] = den_new.get(factor, 0) + mult
                continue
            f_s = _poly_subs(factor, sym, value)
            if f_s.num.is_zero():
                raise PoleHitError(
                    f"substitution {sym.name} -> given value zeroes factor "
                    f"{factor.canonical_str()}"
                )
            den_new[f_s.num] = den_new.get(f_s.num, 0) + mult
            for f, m in f_s.den:
                val_den_budget[f] = val_den_budget.get(f, 0) + m * mult
        for f, m in val_den_budget.items():
            if m > 0:
                num_poly = num_poly * f**m
            elif m < 0:
                den_new[f] = den_new.get(f, 0) - m
        return FactoredRat(num_poly, den_new.items())

    def evaluate(self, values: dict[str, complex]) -> complex:
        out = self.num.evaluate(values)
        for f, m in self.den:
            out /= f.evaluate(values) ** m
        return out

    # -- serialization ------------------------------------------------

    def canonical_str(self) -> str:
        num = self.num.canonical_str()
        if not self.den:
            return num
        if len(self.num.terms) > 1:
            num = f"({num})"
        factors = "*".join(f"({f.canonical_str()})^{m}" for f, m in self.den)
        return f"{num}/({factors})"

    def __repr__(self) -> str:
        return f"FactoredRat({self.canonical_str()})"


def _split_monomial(factor: ParamPoly) -> tuple[ParamPoly, list[tuple[int, int]]]:
    """Pull the common monomial out of a monic factor.

    Returns the primitive part together with (symbol index, exponent) pairs
    of the extracted monomial; splitting a power of a single variable off a
    factor is not factorization, just exponent bookkeeping.
    """
    exps = list(factor.terms.keys())
    width = max(len(e) for e in exps)
    padded = [e + (0,) * (width - len(e)) for e in exps]
    mins = [min(e[i] for e in padded) for i in range(width)]
    if not any(mins):
        return factor, []
    terms = {
        tuple(x - m for x, m in zip(e, mins)): c
        for e, c in zip(padded, factor.terms.values())
    }
    return ParamPoly(factor.ctx, terms), [(i, m) for i, m in enumerate(mins) if m]


def _poly_subs(p: ParamPoly, sym: Symbol, value: FactoredRat) -> FactoredRat:
    """Substitute into a polynomial, clearing the value's denominators."""
    coeffs = p.coeffs_in(sym)
    degree = max(coeffs) if coeffs else 0
    q_expanded = value.den_poly()
    acc = ParamPoly.zero(p.ctx)
    p_pow = ParamPoly.const(p.ctx, 1)
    # build sum c_k * P^k * Q^(d-k) incrementally in ascending k
    q_pows = [ParamPoly.const(p.ctx, 1)]
    for _ in range(degree):
        q_pows.append(q_pows[-1] * q_expanded)
    for k in range(degree + 1):
        c = coeffs.get(k)
        if c is not None and not c.is_zero():
            acc = acc + c * p_pow * q_pows[degree - k]
        if k < degree:
            p_pow = p_pow * value.num
    return FactoredRat(acc, [(f, m * degree) for f, m in value.den] if degree else ())


def arith(a: FactoredRat, b: FactoredRat, op: str) -> FactoredRat:
    """Named arithmetic entry point mirroring the operator protocol."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown operation {op!r}")
