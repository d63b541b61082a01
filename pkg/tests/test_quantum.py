from fractions import Fraction

import pytest

from conftest import var
from reftop.quantum import (
    QuantumError,
    qtop_Qk,
    qtop_quantum_curve,
    quantisation_check,
    theorem_qc_check,
)
from reftop.ratfun import FactoredRat
from reftop.recursion import QTOP, RecursionCache


@pytest.fixture(scope="module")
def weber_qtop(weber):
    return RecursionCache(weber, QTOP)


@pytest.fixture(scope="module")
def whittaker_qtop(whittaker):
    return RecursionCache(whittaker, QTOP)


@pytest.fixture(scope="module")
def bessel_qtop(bessel):
    return RecursionCache(bessel, QTOP)


def test_rejects_unreduced_cache(painleve_full):
    with pytest.raises(QuantumError):
        qtop_Qk(painleve_full, 1)


def test_first_coefficient_painleve(painleve_qtop):
    ctx = painleve_qtop.ctx
    qz = var(ctx, "qz")
    mu = var(ctx, "mu")
    assert qtop_Qk(painleve_qtop, 1) == 2 * qz * mu


def test_even_coefficients_painleve_at_unit_weight(painleve_qtop):
    ctx = painleve_qtop.ctx
    qz = var(ctx, "qz")
    mu = ctx.get("mu")
    one = FactoredRat.const(ctx, 1)
    q2 = qtop_Qk(painleve_qtop, 2).subs(mu, one)
    # Q2 = -11/(24t) with t = -2 qz^4/3
    assert q2 == Fraction(11, 16) * qz.inv() ** 4
    q4 = qtop_Qk(painleve_qtop, 4).subs(mu, one)
    assert q4 == Fraction(39709, 16384) * qz.inv() ** 14


def test_odd_coefficient_painleve_at_unit_weight(painleve_qtop):
    ctx = painleve_qtop.ctx
    qz = var(ctx, "qz")
    mu = ctx.get("mu")
    one = FactoredRat.const(ctx, 1)
    q3 = qtop_Qk(painleve_qtop, 3).subs(mu, one)
    assert q3 == -Fraction(465, 512) * qz.inv() ** 9


def test_quantum_curve_assembly(painleve_qtop, painleve):
    qc = qtop_quantum_curve(painleve_qtop, order=4)
    assert qc.order == 4
    assert sorted(qc.qk) == [1, 2, 3, 4]
    ctx = painleve.ctx
    qz = var(ctx, "qz")
    xv = FactoredRat.var(ctx, painleve.xsym)
    expected_q0 = 4 * xv ** 3 - Fraction(4, 3) * qz ** 4 * xv + Fraction(8, 27) * qz ** 6
    assert (qc.q0 - expected_q0).is_zero()


def test_quantisation_pins_painleve_weight(painleve_qtop):
    qc = qtop_quantum_curve(painleve_qtop, order=4)
    sol = quantisation_check(qc)
    assert sol.consistent
    assert sol.assignments["mu"] == 1
    assert not sol.free


def test_quantisation_leaves_hypergeometric_weights_free(
    weber_qtop, whittaker_qtop, bessel_qtop
):
    for cache in (weber_qtop, whittaker_qtop, bessel_qtop):
        sol = quantisation_check(qtop_quantum_curve(cache, order=4))
        assert sol.consistent
        assert sol.free == ["mu"]
        assert not sol.assignments


def test_free_energy_form_painleve(painleve_qtop):
    results = theorem_qc_check(painleve_qtop, order=4)
    assert results
    assert all(r.ok for r in results), [r.name for r in results if not r.ok]
    names = {r.name for r in results}
    assert "q0-constant-term" in names
    assert "q2-free-energy" in names
    assert "q3-free-energy" in names
