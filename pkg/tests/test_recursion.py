from fractions import Fraction

import pytest

from conftest import var
from reftop.ratfun import FactoredRat
from reftop.recursion import (
    FULL,
    QTOP,
    RecursionCache,
    RecursionError_,
    check_properties,
    computed_orders,
    qtop_matches_top_coefficient,
    unrefined_limit_checks,
)
from reftop.series import INFINITY, residue


def test_computed_orders_enumeration():
    assert computed_orders(0) == [(0, 3), (1, 2), (2, 1)]
    assert (1, 3) in computed_orders(1)
    assert (0, 5) in computed_orders(2)
    assert all(g2 + n1 <= 5 for g2, n1 in computed_orders(2))


def test_mode_validation(painleve):
    with pytest.raises(ValueError):
        RecursionCache(painleve, "other")


def test_base_cases_present(painleve_full):
    assert painleve_full.get(0, 1).value.is_zero() is False
    assert painleve_full.get(0, 2) is not None
    assert painleve_full.get(1, 1) is not None
    with pytest.raises(RecursionError_):
        painleve_full._compute(0, 2)


def test_half_order_one_point_residues(painleve_full):
    ctx = painleve_full.ctx
    z0 = ctx.point_var(0)
    qz = var(ctx, "qz")
    q = FactoredRat.var(ctx, painleve_full.qsym)
    mu = var(ctx, "mu")
    w = painleve_full.get(1, 1).value
    assert residue(w, z0, FactoredRat.zero(ctx)) == -q / 2
    assert residue(w, z0, INFINITY) == 3 * q / 2
    assert residue(w, z0, qz) == q / 2 * (mu - 1)
    assert residue(w, z0, -qz) == q / 2 * (-mu - 1)


def test_half_order_one_point_closed_form(painleve_full):
    ctx = painleve_full.ctx
    z0 = FactoredRat.var(ctx, ctx.point_var(0))
    qz = var(ctx, "qz")
    q = FactoredRat.var(ctx, painleve_full.qsym)
    mu = var(ctx, "mu")
    expected = q * (
        -(2 * z0).inv()
        + (mu - 1) / (2 * (z0 - qz))
        + (-mu - 1) / (2 * (qz + z0))
    )
    assert (painleve_full.get(1, 1).value - expected).is_zero()


def test_half_order_one_point_weber(weber_full):
    ctx = weber_full.ctx
    z0 = FactoredRat.var(ctx, ctx.point_var(0))
    q = FactoredRat.var(ctx, weber_full.qsym)
    mu = var(ctx, "mu")
    one = FactoredRat.const(ctx, 1)
    expected = q / 2 * (
        -(z0 ** 2 + 1) * ((z0 - one) * z0 * (z0 + one)).inv() - mu / z0
    )
    assert (weber_full.get(1, 1).value - expected).is_zero()


def test_planar_three_point(painleve_full):
    ctx = painleve_full.ctx
    qz = var(ctx, "qz")
    zs = [FactoredRat.var(ctx, ctx.point_var(i)) for i in range(3)]
    expected = (4 * qz ** 2 * zs[0] ** 2 * zs[1] ** 2 * zs[2] ** 2).inv()
    assert (painleve_full.get(0, 3).value - expected).is_zero()


def test_value_at_renames(painleve_full):
    ctx = painleve_full.ctx
    p = ctx.fresh_point("_t")
    w = painleve_full.value_at(1, 1, [p])
    assert w.involves(p)
    assert not w.involves(ctx.point_var(0))


def test_qtop_mode_drops_refinement(painleve_qtop):
    q = painleve_qtop.qsym
    for g2, n1 in [(1, 1), (0, 3), (2, 1), (1, 2)]:
        assert not painleve_qtop.get(g2, n1).value.involves(q)


def test_property_suite_chi_zero(painleve_full, painleve_qtop):
    for cache in (painleve_full, painleve_qtop):
        results = check_properties(cache, 0)
        assert results
        assert all(r.ok for r in results), [r.name for r in results if not r.ok]


def test_qtop_is_top_refinement_coefficient(painleve_full, painleve_qtop):
    results = qtop_matches_top_coefficient(painleve_full, painleve_qtop, 0)
    assert results
    assert all(r.ok for r in results), [r.name for r in results if not r.ok]


def test_unrefined_limit(painleve_full):
    results = unrefined_limit_checks(painleve_full, 0)
    assert results
    assert all(r.ok for r in results), [r.name for r in results if not r.ok]


def test_denominators_stay_split_under_involution_images(weber_full):
    # residues at images under z -> 1/z tend to fuse (z0-1)(z0+1); the
    # stored entries must keep those factors separate
    md = weber_full.get(3, 1)
    z0 = weber_full.ctx.point_var(0)
    for factor, _ in md.value.den:
        assert factor.degree(z0) <= 1
