"""Symbol tables shared by every exact expression in a computation.

All polynomials and rational functions in one run refer to the same
``Context``, which fixes the symbol order used by the graded-lex canonical
form.  Symbols are append-only: registering a new point variable never
invalidates existing expressions.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction


class SymbolKind(enum.Enum):
    POINT = "point"
    REFINEMENT = "refinement"
    PARAM = "param"
    GENERATOR = "generator"
    ALGEBRAIC = "algebraic"


@dataclass(frozen=True)
class Symbol:
    name: str
    kind: SymbolKind
    index: int

    def __repr__(self) -> str:
        return f"Symbol({self.name})"


@dataclass
class AlgebraicRule:
    """Rewrite rule ``x^degree = sum(rewrite[k] * x^k)`` for an adjoined symbol."""

    degree: int
    rewrite: tuple[Fraction, ...]


class ContextError(Exception):
    pass


@dataclass
class Context:
    """Ordered symbol table; the declaration order is the canonical term order."""

    symbols: list[Symbol] = field(default_factory=list)
    _by_name: dict[str, Symbol] = field(default_factory=dict)
    algebraic_rules: dict[int, AlgebraicRule] = field(default_factory=dict)

    @property
    def size(self) -> int:
        return len(self.symbols)

    def declare(self, name: str, kind: SymbolKind) -> Symbol:
        if name in self._by_name:
            existing = self._by_name[name]
            if existing.kind is not kind:
                raise ContextError(
                    f"symbol {name!r} already declared with kind {existing.kind.value}"
                )
            return existing
        sym = Symbol(name, kind, len(self.symbols))
        self.symbols.append(sym)
        self._by_name[name] = sym
        return sym

    def declare_algebraic(self, name: str, minimal_poly: list[Fraction]) -> Symbol:
        """Adjoin an algebraic constant with monic minimal polynomial.

        ``minimal_poly`` lists the coefficients of ``x^0 .. x^d`` with the
        leading coefficient normalised away by the caller or here; powers of
        the symbol at or above ``d`` are rewritten using the relation.
        Irreducibility is the caller's assertion and is not checked.
        """
        coeffs = [Fraction(c) for c in minimal_poly]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        if len(coeffs) < 2:
            raise ContextError(f"minimal polynomial for {name!r} must have degree >= 1")
        lead = coeffs[-1]
        degree = len(coeffs) - 1
        rewrite = tuple(-c / lead for c in coeffs[:-1])
        sym = self.declare(name, SymbolKind.ALGEBRAIC)
        if sym.index in self.algebraic_rules:
            if self.algebraic_rules[sym.index].rewrite != rewrite:
                raise ContextError(f"conflicting minimal polynomial for {name!r}")
        else:
            self.algebraic_rules[sym.index] = AlgebraicRule(degree, rewrite)
        return sym

    def get(self, name: str) -> Symbol:
        try:
            return self._by_name[name]
        except KeyError:
            raise ContextError(f"unknown symbol {name!r}") from None

    def has(self, name: str) -> bool:
        return name in self._by_name

    def point_var(self, i: int) -> Symbol:
        """The canonical i-th point variable ``z<i>``."""
        return self.declare(f"z{i}", SymbolKind.POINT)

    def fresh_point(self, base: str) -> Symbol:
        """A reserved helper variable (integration, shift, chart changes)."""
        return self.declare(base, SymbolKind.POINT)
