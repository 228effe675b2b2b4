import numpy as np
import pytest

from hypoel import BoxDomain, SymbolPolynomial, VariableOperator


@pytest.fixture
def laplacian():
    return SymbolPolynomial(2, {(2, 0): 1.0, (0, 2): 1.0})


@pytest.fixture
def heat_symbol():
    return SymbolPolynomial(2, {(2, 0): 1.0, (0, 1): 1j})


@pytest.fixture
def wave_symbol():
    return SymbolPolynomial(2, {(2, 0): 1.0, (0, 2): -1.0})


@pytest.fixture
def drift_operator():
    x1 = SymbolPolynomial.variable(2, 0)
    return VariableOperator(
        2, {(2, 0): 1.0, (0, 2): 1.0, (1, 0): x1}, BoxDomain((-1.0, -1.0), (1.0, 1.0))
    )


def random_symbol(rng: np.random.Generator, dimension: int, order: int) -> SymbolPolynomial:
    """Random sparse symbol with moderate complex coefficients."""
    terms = {}
    num_terms = rng.integers(1, 6)
    for _ in range(num_terms):
        alpha = tuple(int(v) for v in rng.integers(0, order + 1, size=dimension))
        if sum(alpha) > order:
            continue
        terms[alpha] = complex(rng.uniform(-5, 5), rng.uniform(-5, 5))
    if not terms:
        terms[(0,) * dimension] = 1.0
    return SymbolPolynomial(dimension, terms)
