from fractions import Fraction

import pytest

from conftest import load_curve, var
from reftop.ratfun import FactoredRat
from reftop.recursion import FULL, RecursionCache
from reftop.variation import (
    VariationError,
    cycle_integral,
    d2F_half_dt2,
    dF0_dt,
    dF_half_dt,
    deformation_check,
    delta_t,
    time_consistency,
    variational_check,
    variational_difference,
)


@pytest.fixture(scope="module")
def whittaker_full(whittaker):
    return RecursionCache(whittaker, FULL)


@pytest.fixture(scope="module")
def bessel_full(bessel):
    return RecursionCache(bessel, FULL)


def test_time_consistency_all_curves(all_curves):
    for name, curve in all_curves.items():
        results = time_consistency(curve)
        assert all(r.ok for r in results), name


def half_order_deformation(cache):
    """delta_t of the half-order one-point entry, as a function of z0."""
    return delta_t(cache.curve, cache.get(1, 1).value, 1)


def test_weber_half_order_deformation(weber_full):
    ctx = weber_full.ctx
    z0 = FactoredRat.var(ctx, ctx.point_var(0))
    q = FactoredRat.var(ctx, weber_full.qsym)
    mu = var(ctx, "mu")
    s = var(ctx, "s")
    t = s ** 2
    one = FactoredRat.const(ctx, 1)
    expected = -q * z0 * (-mu + mu * z0 ** 2 + 2 * z0 ** 2 + 2) * (
        (z0 - one).inv() ** 3 * (z0 + one).inv() ** 3
    ) / t
    assert (half_order_deformation(weber_full) - expected).is_zero()
    # the cycle integral of the half-order two-point entry gives the same form
    extra = ctx.fresh_point("_c")
    bigger = weber_full.value_at(1, 2, [ctx.point_var(0), extra])
    got = cycle_integral(weber_full.curve, bigger, extra)
    assert (got - expected).is_zero()


def test_whittaker_half_order_deformation(whittaker_full):
    ctx = whittaker_full.ctx
    z0 = FactoredRat.var(ctx, ctx.point_var(0))
    q = FactoredRat.var(ctx, whittaker_full.qsym)
    mu = var(ctx, "mu")
    t = var(ctx, "s")
    one = FactoredRat.const(ctx, 1)
    expected = -q * (-mu + mu * z0 + z0 + 1) * (z0 - one).inv() ** 3 / t
    assert (half_order_deformation(whittaker_full) - expected).is_zero()


def test_bessel_half_order_deformation(bessel_full):
    ctx = bessel_full.ctx
    z0 = FactoredRat.var(ctx, ctx.point_var(0))
    q = FactoredRat.var(ctx, bessel_full.qsym)
    mu = var(ctx, "mu")
    t = var(ctx, "s")
    one = FactoredRat.const(ctx, 1)
    # same shape as the whittaker value but with the opposite orientation of
    # the deformation vector field, hence the opposite overall sign
    expected = 2 * q * (-mu + mu * z0 + z0 + 1) * (z0 - one).inv() ** 3 / t
    assert (half_order_deformation(bessel_full) - expected).is_zero()


def painleve_cycle_side(cache):
    ctx = cache.ctx
    extra = ctx.fresh_point("_c")
    bigger = cache.value_at(1, 2, [ctx.point_var(0), extra])
    return cycle_integral(cache.curve, bigger, extra)


def test_painleve_half_order_cycle_integral(painleve_full):
    ctx = painleve_full.ctx
    z0 = FactoredRat.var(ctx, ctx.point_var(0))
    qz = var(ctx, "qz")
    q = FactoredRat.var(ctx, painleve_full.qsym)
    mu = var(ctx, "mu")
    expected = -q * (
        2 * (mu + 2) * z0 * qz ** 2
        + 2 * (2 * mu + 1) * z0 ** 2 * qz
        + 2 * qz ** 3
        + (2 * mu + 1) * z0 ** 3
    ) * (8 * z0 ** 3 * qz ** 3).inv() * (qz + z0).inv() ** 2
    assert (painleve_cycle_side(painleve_full) - expected).is_zero()


def test_painleve_half_order_deformation_mismatch(painleve_full):
    ctx = painleve_full.ctx
    z0 = FactoredRat.var(ctx, ctx.point_var(0))
    qz = var(ctx, "qz")
    q = FactoredRat.var(ctx, painleve_full.qsym)
    mu = var(ctx, "mu")
    gap = q * (mu - 1) * (qz ** 2 + z0 ** 2) * (
        8 * qz ** 3
    ).inv() * (qz ** 2 - z0 ** 2).inv() ** 2
    lhs = half_order_deformation(painleve_full)
    rhs = painleve_cycle_side(painleve_full)
    assert (lhs - rhs - gap).is_zero()
    # the gap closes exactly at mu = 1
    one = FactoredRat.const(ctx, 1)
    assert variational_check(painleve_full, 1, 1, {"mu": one}).ok
    assert not variational_check(painleve_full, 1, 1).ok


def test_deformation_pins_painleve_weight(painleve_full):
    sol = deformation_check(painleve_full, 1, 1)
    assert sol.consistent
    assert sol.assignments["mu"] == 1
    assert not sol.free


def test_deformation_leaves_weber_weight_free(weber_full):
    sol = deformation_check(weber_full, 1, 1)
    assert sol.consistent
    assert sol.free == ["mu"]
    assert not sol.assignments


def test_variational_identity_low_orders_weber(weber_full):
    for g2, n1 in [(0, 1), (0, 2), (1, 1), (0, 3), (1, 2), (2, 1)]:
        assert variational_check(weber_full, g2, n1).ok, (g2, n1)


def test_variational_identity_low_orders_painleve(painleve_full):
    one = FactoredRat.const(painleve_full.ctx, 1)
    for g2, n1 in [(0, 1), (0, 2), (1, 1), (0, 3), (1, 2), (2, 1)]:
        assert variational_check(painleve_full, g2, n1, {"mu": one}).ok, (g2, n1)


def test_dF0_dt_painleve(painleve):
    qz = var(painleve.ctx, "qz")
    # 4 q0^3 with q0 = qz^2/3
    assert dF0_dt(painleve) == Fraction(4, 27) * qz ** 6


def test_dF0_dt_requires_declared_f0(weber):
    with pytest.raises(VariationError):
        dF0_dt(weber)


def test_half_order_free_energy_painleve(painleve_full):
    ctx = painleve_full.ctx
    qz = var(ctx, "qz")
    q = FactoredRat.var(ctx, painleve_full.qsym)
    mu = var(ctx, "mu")
    second = d2F_half_dt2(painleve_full)
    assert second == -q * (2 * mu + 1) * (8 * qz ** 3).inv()
    first = dF_half_dt(painleve_full)
    assert first == q * qz * (2 * mu + 1) * Fraction(1, 3)
    # consistency: d/dt of the first derivative returns the second
    s = painleve_full.curve.generator
    dt_ds = painleve_full.curve.time.value.derivative(s)
    assert (first.derivative(s) * dt_ds.inv() - second).is_zero()
