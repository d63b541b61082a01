"""Exact multivariate polynomials over the rationals.

Terms map exponent vectors (aligned with the context's symbol order) to
``Fraction`` coefficients.  Powers of adjoined algebraic symbols are kept
below the degree of their minimal polynomial by rewriting on the fly, so
every stored polynomial is in normal form.
"""

from __future__ import annotations

import heapq
from fractions import Fraction
from typing import Iterable, Mapping

from .context import Context, Symbol, SymbolKind

Exponents = tuple[int, ...]


class AlgebraError(Exception):
    pass


def _pad(exp: Exponents, size: int) -> Exponents:
    return exp if len(exp) == size else exp + (0,) * (size - len(exp))


def _order_key(exp: Exponents):
    return (sum(exp), exp)


class ParamPoly:
    """Multivariate polynomial over Q in the context's declared symbols."""

    __slots__ = ("ctx", "terms", "_str", "_hash", "_ucache")

    def __init__(self, ctx: Context, terms: Mapping[Exponents, Fraction] | None = None):
        self.ctx = ctx
        self._str = None
        self._hash = None
        self._ucache = None
        combined: dict[Exponents, Fraction] = {}
        if terms:
            size = ctx.size
            pending = [(_pad(e, size), Fraction(c)) for e, c in terms.items()]
            while pending:
                exp, coeff = pending.pop()
                if coeff == 0:
                    continue
                reduced = self._reduce_algebraic(exp, coeff)
                if reduced is None:
                    acc = combined.get(exp, Fraction(0)) + coeff
                    if acc:
                        combined[exp] = acc
                    else:
                        combined.pop(exp, None)
                else:
                    pending.extend(reduced)
        self.terms = combined

    def _reduce_algebraic(self, exp: Exponents, coeff: Fraction):
        for idx, rule in self.ctx.algebraic_rules.items():
            if idx < len(exp) and exp[idx] >= rule.degree:
                out = []
                for k, c in enumerate(rule.rewrite):
                    if c == 0:
                        continue
                    new = list(exp)
                    new[idx] = exp[idx] - rule.degree + k
                    out.append((tuple(new), coeff * c))
                return out
        return None

    # -- constructors -------------------------------------------------

    @classmethod
    def _raw(cls, ctx: Context, terms: dict) -> "ParamPoly":
        """Internal: adopt already-normalized terms without re-reduction."""
        out = cls.__new__(cls)
        out.ctx = ctx
        out.terms = terms
        out._str = None
        out._hash = None
        out._ucache = None
        return out

    @classmethod
    def zero(cls, ctx: Context) -> "ParamPoly":
        return cls(ctx)

    @classmethod
    def const(cls, ctx: Context, value) -> "ParamPoly":
        return cls(ctx, {(0,) * ctx.size: Fraction(value)})

    @classmethod
    def var(cls, ctx: Context, sym: Symbol) -> "ParamPoly":
        exp = [0] * ctx.size
        exp[sym.index] = 1
        return cls(ctx, {tuple(exp): Fraction(1)})

    # -- queries ------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self.terms)

    def constant_value(self) -> Fraction:
        if self.is_zero():
            return Fraction(0)
        if not self.is_constant():
            raise AlgebraError("polynomial is not constant")
        return next(iter(self.terms.values()))

    def degree(self, sym: Symbol) -> int:
        if not self.terms:
            return -1
        i = sym.index
        return max((e[i] if i < len(e) else 0) for e in self.terms)

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def involves(self, sym: Symbol) -> bool:
        i = sym.index
        return any(i < len(e) and e[i] for e in self.terms)

    def involved_symbols(self) -> set[Symbol]:
        out: set[Symbol] = set()
        for e in self.terms:
            for i, k in enumerate(e):
                if k:
                    out.add(self.ctx.symbols[i])
        return out

    def leading(self) -> tuple[Exponents, Fraction]:
        exp = max(self.terms, key=_order_key)
        return exp, self.terms[exp]

    def __eq__(self, other) -> bool:
        if not isinstance(other, ParamPoly):
            return NotImplemented
        size = max(self.ctx.size, other.ctx.size)
        a = {_pad(e, size): c for e, c in self.terms.items()}
        b = {_pad(e, size): c for e, c in other.terms.items()}
        return a == b

    def __hash__(self):
        if self._hash is None:
            size = self.ctx.size
            key = tuple(sorted((_pad(e, size), c) for e, c in self.terms.items()))
            self._hash = hash(key)
        return self._hash

    # -- arithmetic ---------------------------------------------------

    def __add__(self, other: "ParamPoly") -> "ParamPoly":
        size = max(len(e) for e in (*self.terms, *other.terms)) if (self.terms or other.terms) else 0
        merged: dict[Exponents, Fraction] = {_pad(e, size): c for e, c in self.terms.items()}
        for e, c in other.terms.items():
            e = _pad(e, size)
            acc = merged.get(e)
            if acc is None:
                merged[e] = c
            elif acc + c:
                merged[e] = acc + c
            else:
                del merged[e]
        return ParamPoly._raw(self.ctx, merged)

    def __neg__(self) -> "ParamPoly":
        return ParamPoly._raw(self.ctx, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "ParamPoly") -> "ParamPoly":
        return self + (-other)

    def __mul__(self, other) -> "ParamPoly":
        if isinstance(other, (int, Fraction)):
            other = Fraction(other)
            if not other:
                return ParamPoly.zero(self.ctx)
            return ParamPoly._raw(self.ctx, {e: c * other for e, c in self.terms.items()})
        if not isinstance(other, ParamPoly):
            return NotImplemented
        if not self.terms or not other.terms:
            return ParamPoly.zero(self.ctx)
        size = max(max(len(e) for e in self.terms), max(len(e) for e in other.terms))
        prod: dict[Exponents, Fraction] = {}
        a_items = [(_pad(e, size), c) for e, c in self.terms.items()]
        b_items = [(_pad(e, size), c) for e, c in other.terms.items()]
        for ea, ca in a_items:
            for eb, cb in b_items:
                e = tuple(x + y for x, y in zip(ea, eb))
                acc = prod.get(e)
                prod[e] = ca * cb if acc is None else acc + ca * cb
        rules = self.ctx.algebraic_rules
        if rules and any(
            idx < len(e) and e[idx] >= rule.degree
            for e in prod
            for idx, rule in rules.items()
        ):
            return ParamPoly(self.ctx, prod)
        return ParamPoly._raw(self.ctx, {e: c for e, c in prod.items() if c})

    __rmul__ = __mul__

    def scale(self, value) -> "ParamPoly":
        return self * Fraction(value)

    def __pow__(self, n: int) -> "ParamPoly":
        if n < 0:
            raise AlgebraError("negative power of a polynomial")
        result = ParamPoly.const(self.ctx, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base_needed = n >> 1
            if base_needed:
                base = base * base
            n = base_needed
        return result

    def derivative(self, sym: Symbol) -> "ParamPoly":
        i = sym.index
        out: dict[Exponents, Fraction] = {}
        for e, c in self.terms.items():
            k = e[i] if i < len(e) else 0
            if not k:
                continue
            new = list(e)
            new[i] = k - 1
            out[tuple(new)] = c * k
        return ParamPoly._raw(self.ctx, out)

    def coeffs_in(self, sym: Symbol) -> dict[int, "ParamPoly"]:
        """Collect as a univariate polynomial in ``sym`` with ParamPoly coefficients."""
        i = sym.index
        buckets: dict[int, dict[Exponents, Fraction]] = {}
        for e, c in self.terms.items():
            k = e[i] if i < len(e) else 0
            new = list(e) + [0] * (i + 1 - len(e))
            new[i] = 0
            buckets.setdefault(k, {})[tuple(new)] = c
        return {k: ParamPoly(self.ctx, t) for k, t in buckets.items()}

    def content(self) -> Fraction:
        """Positive rational content times the sign of the leading coefficient."""
        if not self.terms:
            return Fraction(0)
        from math import gcd

        num = 0
        den = 1
        for c in self.terms.values():
            num = gcd(num, c.numerator)
            den = den * c.denominator // gcd(den, c.denominator)
        cont = Fraction(num, den) if num else Fraction(1)
        _, lead = self.leading()
        return cont if lead > 0 else -cont

    def evaluate(self, values: dict[str, complex]) -> complex:
        total = 0j
        for e, c in self.terms.items():
            term = complex(c)
            for i, k in enumerate(e):
                if k:
                    name = self.ctx.symbols[i].name
                    if name not in values:
                        raise AlgebraError(f"no numeric value supplied for {name!r}")
                    term *= values[name] ** k
            total += term
        return total

    # -- serialization ------------------------------------------------

    def canonical_str(self) -> str:
        if self._str is not None:
            return self._str
        if not self.terms:
            self._str = "0"
            return self._str
        pieces = []
        for e in sorted(self.terms, key=_order_key, reverse=True):
            c = self.terms[e]
            mono = "*".join(
                f"{self.ctx.symbols[i].name}" + (f"^{k}" if k > 1 else "")
                for i, k in enumerate(e)
                if k
            )
            if not mono:
                body = str(abs(c))
            elif abs(c) == 1:
                body = mono
            else:
                body = f"{abs(c)}*{mono}"
            sign = "-" if c < 0 else "+"
            pieces.append((sign, body))
        first_sign, first = pieces[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in pieces[1:]:
            out += sign + body
        self._str = out
        return out

    def __repr__(self) -> str:
        return f"ParamPoly({self.canonical_str()})"


def poly_div(num: ParamPoly, div: ParamPoly) -> ParamPoly | None:
    """Exact division ``num / div``; returns None when ``div`` does not divide.

    ``div`` must be free of adjoined algebraic symbols so that cancellation
    of leading terms never triggers a rewrite.
    """
    if div.is_zero():
        raise AlgebraError("division by the zero polynomial")
    for idx in div.ctx.algebraic_rules:
        for e in div.terms:
            if idx < len(e) and e[idx]:
                raise AlgebraError("division by a factor involving an algebraic symbol")
    if num.is_zero():
        return ParamPoly.zero(num.ctx)
    if len(div.terms) == 1:
        size_m = num.ctx.size
        (d_exp, d_coeff), = div.terms.items()
        d_exp = _pad(d_exp, size_m)
        quo_m: dict[Exponents, Fraction] = {}
        for e, c in num.terms.items():
            q = tuple(a - b for a, b in zip(_pad(e, size_m), d_exp))
            if any(k < 0 for k in q):
                return None
            quo_m[q] = c / d_coeff
        return ParamPoly._raw(num.ctx, quo_m)
    lead_exp, lead_coeff = div.leading()
    size = num.ctx.size
    lead_exp = _pad(lead_exp, size)

    # graded-lex leading and trailing monomials are multiplicative, so both
    # must divide their counterparts in the numerator; cheap rejection
    num_lead = _pad(max(num.terms, key=_order_key), size)
    if any(a < b for a, b in zip(num_lead, lead_exp)):
        return None
    div_trail = _pad(min(div.terms, key=_order_key), size)
    num_trail = _pad(min(num.terms, key=_order_key), size)
    if any(a < b for a, b in zip(num_trail, div_trail)):
        return None

    if not _univariate_image_divides(num, div, size):
        return None

    def heap_key(e):
        return (-sum(e), tuple(-x for x in e))

    rem = {_pad(e, size): c for e, c in num.terms.items()}
    heap = [(heap_key(e), e) for e in rem]
    heapq.heapify(heap)
    div_items = [(_pad(e, size), c) for e, c in div.terms.items()]
    quo: dict[Exponents, Fraction] = {}
    while rem:
        while heap:
            _, exp = heapq.heappop(heap)
            if exp in rem:
                break
        else:
            break
        coeff = rem[exp]
        q_exp = tuple(a - b for a, b in zip(exp, lead_exp))
        if any(k < 0 for k in q_exp):
            return None
        q_coeff = coeff / lead_coeff
        quo[q_exp] = q_coeff
        for e, c in div_items:
            e = tuple(a + b for a, b in zip(e, q_exp))
            old = rem.get(e)
            acc = (old if old is not None else Fraction(0)) - q_coeff * c
            if acc:
                if old is None:
                    heapq.heappush(heap, (heap_key(e), e))
                rem[e] = acc
            else:
                rem.pop(e, None)
    return ParamPoly._raw(num.ctx, {e: c for e, c in quo.items() if c})


_FILTER_SEEDS = (3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53)
_FILTER_PRIME = (1 << 61) - 1


def _uimage(poly: ParamPoly, main: int, offset: int):
    """Univariate image mod a large prime with all symbols but ``main``
    specialized to fixed seeds; None when degenerate or not specializable."""
    if poly._ucache is None:
        poly._ucache = {}
    key = (main, offset)
    if key in poly._ucache:
        return poly._ucache[key]
    p = _FILTER_PRIME
    inv_cache: dict[int, int] = {}
    out: dict[int, int] = {}
    result = None
    try:
        for e, c in poly.terms.items():
            den = c.denominator
            inv = inv_cache.get(den)
            if inv is None:
                inv = pow(den, -1, p)
                inv_cache[den] = inv
            v = c.numerator % p * inv % p
            for i, m in enumerate(e):
                if m and i != main:
                    v = v * pow(_FILTER_SEEDS[(i + offset) % len(_FILTER_SEEDS)], m, p) % p
            k = e[main] if main < len(e) else 0
            out[k] = (out.get(k, 0) + v) % p
        deg = max(out)
        if out[deg]:
            result = [out.get(k, 0) for k in range(deg + 1)]
    except ValueError:
        result = None
    poly._ucache[key] = result
    return result


def _univariate_image_divides(num: ParamPoly, div: ParamPoly, size: int) -> bool:
    """Cheap modular rejection test; a zero remainder does not prove
    divisibility, a nonzero one disproves it.  Conservatively accepts when
    the specialization degenerates or algebraic symbols are involved."""
    if len(num.terms) < 48:
        return True
    if num.ctx.algebraic_rules and any(
        idx < len(e) and e[idx]
        for e in num.terms
        for idx in num.ctx.algebraic_rules
    ):
        return True
    main = -1
    for e in div.terms:
        for i, k in enumerate(e):
            if k and i > main:
                main = i
    if main < 0:
        return True
    p = _FILTER_PRIME
    for offset in (0, 4):
        a = _uimage(num, main, offset)
        b = _uimage(div, main, offset)
        if a is None or b is None:
            continue
        if len(a) < len(b):
            return False
        a = list(a)
        lead_inv = pow(b[-1], -1, p)
        for k in range(len(a) - len(b), -1, -1):
            f = a[k + len(b) - 1] * lead_inv % p
            if f:
                for i, bc in enumerate(b):
                    a[k + i] = (a[k + i] - f * bc) % p
        return not any(a)
    return True


def poly_gcd_univariate(polys: Iterable[ParamPoly], sym: Symbol):
    """Monic gcd of polynomials viewed as univariate in ``sym``.

    Coefficients live in the rational function field of the remaining
    symbols; returned as a list of FactoredRat coefficients of ascending
    powers of ``sym``.  Used by the constraint solver for polynomial
    conditions on a single parameter.
    """
    from .ratfun import FactoredRat

    def to_coeffs(p: ParamPoly):
        cs = p.coeffs_in(sym)
        deg = max(cs) if cs else 0
        return [FactoredRat.from_poly(cs.get(k, ParamPoly.zero(p.ctx))) for k in range(deg + 1)]

    def trim(cs):
        while cs and cs[-1].is_zero():
            cs.pop()
        return cs

    def rem(a, b):
        a = list(a)
        while len(a) >= len(b):
            k = len(a) - len(b)
            factor = a[-1] / b[-1]
            for i, bc in enumerate(b):
                a[i + k] = a[i + k] - factor * bc
            trim(a)
            if not a:
                break
        return a

    g: list = []
    for p in polys:
        if p.is_zero():
            continue
        cur = trim(to_coeffs(p))
        if not g:
            g = cur
            continue
        a, b = g, cur
        while b:
            a, b = b, rem(a, b)
        g = a
    if g:
        lead = g[-1]
        g = [c / lead for c in g]
    return g
