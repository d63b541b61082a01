"""Exact solving of small parameter constraint systems.

Two shapes arise when pinning residue parameters: affine systems, solved
by Gaussian elimination over the rational function field, and univariate
polynomial constraints, reduced through a monic gcd.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .context import Symbol
from .poly import AlgebraError, ParamPoly, poly_gcd_univariate
from .ratfun import FactoredRat


class SolveError(Exception):
    pass


@dataclass
class AffineSolution:
    """Outcome of an affine solve: inconsistent, pinned values, or free."""

    consistent: bool
    assignments: dict[str, FactoredRat] = field(default_factory=dict)
    free: list[str] = field(default_factory=list)


def _affine_rows(equations: list[FactoredRat], unknowns: list[Symbol]):
    rows = []
    for eq in equations:
        for f, _ in eq.den:
            if any(f.involves(u) for u in unknowns):
                raise SolveError("equation denominator involves an unknown")
        poly = eq.num
        for u in unknowns:
            if poly.degree(u) > 1:
                raise SolveError(f"equation is nonlinear in {u.name}")
        coeffs = []
        rest = poly
        for u in unknowns:
            by_deg = rest.coeffs_in(u)
            coeffs.append(FactoredRat(by_deg.get(1, ParamPoly.zero(eq.ctx)), eq.den))
            rest = by_deg.get(0, ParamPoly.zero(eq.ctx))
        for u in unknowns:
            if rest.involves(u):
                raise SolveError("cross terms between unknowns are not affine")
        rows.append((coeffs, FactoredRat(rest, eq.den)))
    return rows


def solve_affine(equations: list[FactoredRat], unknowns: list[Symbol]) -> AffineSolution:
    """Solve ``eq = 0`` for each equation, affine in the unknowns."""
    if not unknowns:
        for eq in equations:
            if not eq.is_zero():
                return AffineSolution(False)
        return AffineSolution(True)
    rows = _affine_rows(equations, unknowns)
    n = len(unknowns)
    pivots: dict[int, tuple[list[FactoredRat], FactoredRat]] = {}
    for coeffs, const in rows:
        coeffs = list(coeffs)
        for col, (pc, pconst) in sorted(pivots.items()):
            if not coeffs[col].is_zero():
                factor = coeffs[col]
                coeffs = [a - factor * b for a, b in zip(coeffs, pc)]
                const = const - factor * pconst
        lead = next((i for i in range(n) if not coeffs[i].is_zero()), None)
        if lead is None:
            if not const.is_zero():
                return AffineSolution(False)
            continue
        inv = coeffs[lead].inv()
        coeffs = [c * inv for c in coeffs]
        const = const * inv
        for col, (pc, pconst) in list(pivots.items()):
            if not pc[lead].is_zero():
                factor = pc[lead]
                pivots[col] = (
                    [a - factor * b for a, b in zip(pc, coeffs)],
                    pconst - factor * const,
                )
        pivots[lead] = (coeffs, const)
    assignments: dict[str, FactoredRat] = {}
    free: list[str] = []
    for i, u in enumerate(unknowns):
        if i in pivots:
            coeffs, const = pivots[i]
            if any(not coeffs[j].is_zero() for j in range(n) if j != i and j not in pivots):
                free.append(u.name)  # pivot tied to a free unknown stays unresolved
            else:
                assignments[u.name] = -const
        else:
            free.append(u.name)
    return AffineSolution(True, assignments, free)


def common_roots_univariate(polys: list[ParamPoly], sym: Symbol):
    """Common zero locus in one symbol, via the monic gcd of the constraints.

    Returns ``None`` for the full line (all constraints vanish), a list of
    roots when the gcd splits into linear factors we can read off (degree
    zero or one), and raises when the gcd is an unresolvable higher-degree
    condition.
    """
    live = [p for p in polys if not p.is_zero()]
    if not live:
        return None
    g = poly_gcd_univariate(live, sym)
    d = len(g) - 1
    if d == 0:
        return []
    if d == 1:
        return [-g[0] / g[1]]
    raise SolveError(
        f"constraint gcd has degree {d} in {sym.name}; roots are not rational"
    )
