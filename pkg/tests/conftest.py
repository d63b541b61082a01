import pathlib

import pytest

from reftop.dsl import parse_curve
from reftop.ratfun import FactoredRat
from reftop.recursion import FULL, QTOP, RecursionCache

CURVE_DIR = pathlib.Path(__file__).resolve().parents[1] / "src" / "reftop" / "curves"

CURVE_NAMES = ("painleve1", "weber", "whittaker", "bessel")


def load_curve(name: str):
    return parse_curve((CURVE_DIR / f"{name}.curve").read_text(), name)


def var(ctx, name: str) -> FactoredRat:
    return FactoredRat.var(ctx, ctx.get(name))


def const(ctx, value) -> FactoredRat:
    return FactoredRat.const(ctx, value)


@pytest.fixture(scope="session")
def painleve():
    return load_curve("painleve1")


@pytest.fixture(scope="session")
def weber():
    return load_curve("weber")


@pytest.fixture(scope="session")
def whittaker():
    return load_curve("whittaker")


@pytest.fixture(scope="session")
def bessel():
    return load_curve("bessel")


@pytest.fixture(scope="session")
def painleve_full(painleve):
    return RecursionCache(painleve, FULL)


@pytest.fixture(scope="session")
def painleve_qtop(painleve):
    return RecursionCache(painleve, QTOP)


@pytest.fixture(scope="session")
def weber_full(weber):
    return RecursionCache(weber, FULL)


@pytest.fixture(scope="session")
def all_curves(painleve, weber, whittaker, bessel):
    return {
        "painleve1": painleve,
        "weber": weber,
        "whittaker": whittaker,
        "bessel": bessel,
    }
