import pytest

from reftop.numeric import crosscheck_one_boundary
from reftop.recursion import QTOP, RecursionCache


def test_crosscheck_full_mode(painleve_full):
    samples = crosscheck_one_boundary(painleve_full, 2, seed=0, samples=10)
    assert len(samples) == 10
    assert all(s.ok for s in samples)
    assert all(s.rel_error < 1e-8 for s in samples)


def test_crosscheck_qtop_mode(painleve_qtop):
    samples = crosscheck_one_boundary(painleve_qtop, 2, seed=1, samples=10)
    assert all(s.ok for s in samples)


def test_crosscheck_deterministic_per_seed(painleve_full):
    a = crosscheck_one_boundary(painleve_full, 2, seed=7, samples=3)
    b = crosscheck_one_boundary(painleve_full, 2, seed=7, samples=3)
    assert [s.assignment for s in a] == [s.assignment for s in b]
    assert [s.exact for s in a] == [s.exact for s in b]


def test_crosscheck_weber(weber_full):
    samples = crosscheck_one_boundary(weber_full, 2, seed=3, samples=5)
    assert all(s.ok for s in samples)
