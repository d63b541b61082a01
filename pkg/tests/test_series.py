from fractions import Fraction

import pytest

from reftop.context import Context, SymbolKind
from reftop.ratfun import FactoredRat
from reftop.series import (
    INFINITY,
    ExpansionError,
    antiderivative,
    antiderivative_value,
    laurent,
    limit_at,
    pole_roots,
    residue,
)


def make_ctx():
    ctx = Context()
    z = ctx.declare("z", SymbolKind.POINT)
    a = ctx.declare("a", SymbolKind.PARAM)
    return ctx, z, a


def test_laurent_simple_pole():
    ctx, z, a = make_ctx()
    zv = FactoredRat.var(ctx, z)
    av = FactoredRat.var(ctx, a)
    s = laurent(1 / (zv - av), z, av, 2)
    assert s.coeff(-1) == 1
    assert s.coeff(0) == 0
    assert s.min_order() == -1


def test_laurent_geometric_tail():
    ctx, z, a = make_ctx()
    zv = FactoredRat.var(ctx, z)
    av = FactoredRat.var(ctx, a)
    # 1/z around a: sum (-1)^k (z-a)^k / a^(k+1)
    s = laurent(1 / zv, z, av, 2)
    assert s.coeff(0) == 1 / av
    assert s.coeff(1) == -1 / av ** 2
    assert s.coeff(2) == 1 / av ** 3


def test_laurent_at_infinity():
    ctx, z, a = make_ctx()
    zv = FactoredRat.var(ctx, z)
    av = FactoredRat.var(ctx, a)
    # z^2/(z-a) = z + a + a^2/z + ...; orders are powers of 1/z
    s = laurent(zv ** 2 / (zv - av), z, INFINITY, 1)
    assert s.coeff(-1) == 1
    assert s.coeff(0) == av
    assert s.coeff(1) == av ** 2


def test_laurent_nonlinear_vanishing_factor_rejected():
    ctx, z, a = make_ctx()
    zv = FactoredRat.var(ctx, z)
    av = FactoredRat.var(ctx, a)
    f = FactoredRat.const(ctx, 1) / (zv ** 2 - av)
    with pytest.raises(ExpansionError):
        pole_roots(f, z)


def test_residues_sum_to_zero():
    ctx, z, a = make_ctx()
    zv = FactoredRat.var(ctx, z)
    f = 1 / (zv * (zv - 1))
    assert residue(f, z, FactoredRat.zero(ctx)) == -1
    assert residue(f, z, FactoredRat.const(ctx, 1)) == 1
    assert residue(f, z, INFINITY) == 0


def test_residue_at_infinity_of_linear_term():
    ctx, z, a = make_ctx()
    zv = FactoredRat.var(ctx, z)
    av = FactoredRat.var(ctx, a)
    # res_inf f dz = -[coefficient of 1/z]
    assert residue(av / zv, z, INFINITY) == -av


def test_limit_with_cancellation():
    ctx, z, a = make_ctx()
    zv = FactoredRat.var(ctx, z)
    av = FactoredRat.var(ctx, a)
    f = (zv ** 2 - av ** 2) / (zv - av)
    assert limit_at(f, z, av) == 2 * av


def test_pole_roots_merges_equal_roots():
    ctx, z, a = make_ctx()
    zv = FactoredRat.var(ctx, z)
    av = FactoredRat.var(ctx, a)
    f = (zv - av).inv() * (2 * zv - 2 * av).inv() * zv.inv()
    roots = pole_roots(f, z)
    assert sorted(m for _, m in roots) == [1, 2]


def test_antiderivative_rational():
    ctx, z, a = make_ctx()
    zv = FactoredRat.var(ctx, z)
    av = FactoredRat.var(ctx, a)
    f = (zv - av).inv() ** 2 + 3 * zv ** 2
    phi = antiderivative(f, z)
    assert not phi.log_terms
    assert phi.rational_part.derivative(z) == f
    # definite integral over [0, inf) of 1/(z-a)^2 dz = -1/a
    g = antiderivative((zv - av).inv() ** 2, z)
    upper = antiderivative_value(g, z, INFINITY)
    lower = antiderivative_value(g, z, FactoredRat.zero(ctx))
    assert upper - lower == -1 / av


def test_antiderivative_records_log_terms():
    ctx, z, a = make_ctx()
    zv = FactoredRat.var(ctx, z)
    av = FactoredRat.var(ctx, a)
    phi = antiderivative(1 / (zv - av), z)
    assert len(phi.log_terms) == 1
    coeff, branch = phi.log_terms[0]
    assert coeff == 1
    assert branch == av
    with pytest.raises(ExpansionError):
        antiderivative_value(phi, z, INFINITY)
