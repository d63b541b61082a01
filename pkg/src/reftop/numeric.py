"""Floating-point contour oracle for the exact residue calculus.

Re-evaluates a one-boundary recursion step with complex arithmetic:
poles of the integrand are located, each residue is extracted by
trapezoidal quadrature on a small circle, and the signed sum is compared
with the exact result at random parameter points.  Used as an
independent cross-check, never as a substitute for exact computation.
"""

from __future__ import annotations

import cmath
import random
from dataclasses import dataclass
from fractions import Fraction

from .context import Context
from .poly import ParamPoly
from .ratfun import FactoredRat
from .recursion import RecursionCache
from .series import INFINITY, pole_roots


class NumericError(Exception):
    pass


TWO_PI = 2 * cmath.pi


def algebraic_roots(ctx: Context) -> dict[int, complex]:
    """A consistent complex root for each adjoined algebraic constant."""
    out: dict[int, complex] = {}
    for idx, rule in ctx.algebraic_rules.items():
        if rule.degree != 2:
            raise NumericError(
                "numeric evaluation supports quadratic algebraic constants only"
            )
        c0 = complex(rule.rewrite[0])
        c1 = complex(rule.rewrite[1])
        out[idx] = (c1 + cmath.sqrt(c1 * c1 + 4 * c0)) / 2
    return out


def evaluate_poly(p: ParamPoly, values: list[complex | None]) -> complex:
    total = 0j
    for exp, coeff in p.terms.items():
        term = complex(coeff)
        for i, e in enumerate(exp):
            if e:
                v = values[i]
                if v is None:
                    raise NumericError(
                        f"no numeric value for symbol {p.ctx.symbols[i].name}"
                    )
                term *= v**e
        total += term
    return total


def evaluate(f: FactoredRat, values: list[complex | None]) -> complex:
    out = evaluate_poly(f.num, values)
    for factor, mult in f.den:
        out /= evaluate_poly(factor, values) ** mult
    return out


def _circle_residue(fn, center: complex, radius: float, nodes: int = 512) -> complex:
    total = 0j
    for k in range(nodes):
        w = radius * cmath.exp(1j * TWO_PI * k / nodes)
        total += fn(center + w) * w
    return total / nodes


@dataclass
class CrossCheckSample:
    assignment: dict[str, complex]
    exact: complex
    numeric: complex
    rel_error: float
    ok: bool


def crosscheck_one_boundary(
    cache: RecursionCache,
    g2: int,
    seed: int = 0,
    samples: int = 10,
    rtol: float = 1e-8,
) -> list[CrossCheckSample]:
    """Compare the exact (g2, 1) entry with numeric residue extraction."""
    curve = cache.curve
    ctx = curve.ctx
    z0 = ctx.point_var(0)
    exact_value = cache.get(g2, 1).value

    p = ctx.fresh_point("_p")
    eta = cache._eta_in(p, z0)
    kernel = eta * curve.ydx_inverse(p) * Fraction(1, 4)
    integrand = kernel * cache.rec_value(g2, 1, p, [])

    plus_points = [FactoredRat.var(ctx, z0)]
    plus_points += [pp.point for pp in cache.cls.p_plus]
    minus_points = list(cache.cls.ramification)
    minus_points += [curve.sigma.image(ctx, q) for q in plus_points]

    from .curve import point_in

    def _sign(root) -> int:
        if point_in(root, plus_points):
            return 1
        if point_in(root, minus_points):
            return -1
        return 0

    signed_roots = [(root, _sign(root)) for root, _ in pole_roots(integrand, p)]
    infinity_sign = _sign(INFINITY)

    alg = algebraic_roots(ctx)
    rng = random.Random(seed)
    out: list[CrossCheckSample] = []
    for _ in range(samples):
        values: list[complex | None] = [None] * ctx.size
        assignment: dict[str, complex] = {}
        for sym in ctx.symbols:
            if sym.index in alg:
                values[sym.index] = alg[sym.index]
                assignment[sym.name] = alg[sym.index]
            elif sym.name.startswith("_") or sym.name.startswith("z"):
                continue
            else:
                val = complex(rng.uniform(0.8, 1.9), rng.uniform(-0.4, 0.4))
                values[sym.index] = val
                assignment[sym.name] = val

        # place the marked point away from every pole of the integrand
        for _attempt in range(50):
            z0_val = complex(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0))
            values[z0.index] = z0_val
            centers = []
            degenerate = False
            for root, sign in signed_roots:
                try:
                    centers.append((evaluate(root, values), sign))
                except ZeroDivisionError:
                    degenerate = True
                    break
            if degenerate:
                continue
            separation = min(
                (abs(a - b) for (a, _s), (b, _t) in _pairs(centers)), default=2.0
            )
            if separation > 0.05:
                break
        else:
            raise NumericError("could not place a sample point away from the poles")
        assignment[z0.name] = z0_val

        def fn(pv: complex) -> complex:
            local = list(values)
            local[p.index] = pv
            return evaluate(integrand, local)

        radius = separation / 4.0
        numeric = 0j
        finite_sum = 0j
        for center, sign in centers:
            res = _circle_residue(fn, center, radius)
            finite_sum += res
            numeric += sign * res
        numeric += infinity_sign * -finite_sum

        exact = evaluate(exact_value, values)
        err = abs(numeric - exact) / max(1.0, abs(exact))
        out.append(CrossCheckSample(assignment, exact, numeric, err, err <= rtol))
    return out


def _pairs(items):
    for i in range(len(items)):
        for j in range(i + 1, len(items)):
            yield items[i], items[j]
