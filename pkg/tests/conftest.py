"""Shared fixtures: precision contexts, reference problems, cached solver runs."""

from fractions import Fraction

import pytest

from fdjacobi import (
    OperatorParams,
    PolynomialPotential,
    PrecisionContext,
    build_overlap_matrix,
    run,
    run_general,
)

CTX50 = PrecisionContext(digits=50, verify_digits=100)
CTX32 = PrecisionContext(digits=32, verify_digits=100)
CTX30 = PrecisionContext(digits=30, verify_digits=100)

# the three packaged reference problems (see cli.PRESETS)
EX1_PARAMS = OperatorParams(Fraction(1, 2), Fraction(0), Fraction(3, 4))
EX1_POLY = PolynomialPotential.from_spec("0,0,0,1/4")
EX2_PARAMS = OperatorParams(Fraction(-1, 8), Fraction(-1, 2), Fraction(3, 4))
EX2_POLY = PolynomialPotential.from_spec("1/12,1/12,1/12,1/12")
EX3_PARAMS = OperatorParams(Fraction(0), Fraction(0), Fraction(3, 4))

EX_N_SET = (0, 1, 2, 3, 4, 10)


@pytest.fixture(scope="session")
def ctx50():
    return CTX50


@pytest.fixture(scope="session")
def ctx32():
    return CTX32


@pytest.fixture(scope="session")
def ctx30():
    return CTX30


@pytest.fixture(scope="session")
def example1_runs():
    """Rank-20 leading-one runs of the cubic problem, keyed by n."""
    return {
        n: run(n, 20, EX1_PARAMS, EX1_POLY, CTX50, normalization="leading-one")
        for n in EX_N_SET
    }


@pytest.fixture(scope="session")
def example2_runs():
    """Rank-30 leading-one runs of the negative-alpha-branch problem."""
    return {
        n: run(n, 30, EX2_PARAMS, EX2_POLY, CTX50, normalization="leading-one")
        for n in EX_N_SET
    }


@pytest.fixture(scope="session")
def step_closed_run():
    """Step potential, closed-form overlap route, N=64, rank 16."""
    B = build_overlap_matrix("step", 64, CTX32, method="closed-form")
    return run_general(0, 16, 64, B, EX3_PARAMS, CTX32)


@pytest.fixture(scope="session")
def step_exact_run():
    """Step potential, exact overlap route, N=64, rank 16."""
    B = build_overlap_matrix("step", 64, CTX32, method="exact")
    return run_general(0, 16, 64, B, EX3_PARAMS, CTX32)
