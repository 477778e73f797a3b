"""Closed-form integrals, constants, and the moduli/fiber bridge."""

import random
from fractions import Fraction

import pytest

from tautring.hodge import (
    bernoulli,
    bridge_check,
    bridge_constant,
    double_factorial,
    faber_constant,
    fiber_socle_of_psi,
    hodge_psi_integral,
    valid_alpha_vectors,
)


def test_bernoulli_values():
    assert bernoulli(2) == Fraction(1, 6)
    assert bernoulli(4) == Fraction(-1, 30)
    assert bernoulli(6) == Fraction(1, 42)
    assert bernoulli(12) == Fraction(-691, 2730)


def test_bernoulli_rejects_odd_or_small_arguments():
    for bad in (-2, 0, 1, 3, 7):
        with pytest.raises(ValueError):
            bernoulli(bad)


def test_double_factorial_values():
    assert double_factorial(-1) == 1
    assert double_factorial(0) == 1
    assert double_factorial(1) == 1
    assert double_factorial(5) == 15
    assert double_factorial(7) == 105
    with pytest.raises(ValueError):
        double_factorial(-2)


def test_faber_constants():
    assert faber_constant(2) == Fraction(1, 2880)
    assert faber_constant(3) == Fraction(1, 120960)
    assert 2 * faber_constant(2) == Fraction(1, 1440)
    with pytest.raises(ValueError):
        faber_constant(1)


def test_integral_values_for_genus_two():
    assert hodge_psi_integral([1]) == Fraction(1, 2880)
    assert hodge_psi_integral([1, 1]) == Fraction(1, 960)
    assert hodge_psi_integral([1, 1, 1]) == Fraction(1, 240)


def test_integral_domain_validation():
    with pytest.raises(ValueError):
        hodge_psi_integral([])  # no points
    with pytest.raises(ValueError):
        hodge_psi_integral([0, 2])  # alpha below one
    with pytest.raises(ValueError):
        hodge_psi_integral([1, 2])  # degree mismatch for g=2, n=2


def test_integral_is_symmetric_in_the_exponents():
    rng = random.Random(99)
    for _ in range(10):
        n = rng.randrange(4, 8)
        alphas = valid_alpha_vectors(n, g=3)
        if not alphas:
            continue
        base = list(rng.choice(alphas))
        value = hodge_psi_integral(base, g=3)
        for _ in range(3):
            rng.shuffle(base)
            assert hodge_psi_integral(base, g=3) == value


def test_valid_alpha_vectors_for_genus_two_are_all_ones():
    for n in range(1, 6):
        assert valid_alpha_vectors(n) == [tuple([1] * n)]


def test_bridge_constant_calibration():
    assert bridge_constant() == Fraction(1, 5760)
    assert fiber_socle_of_psi(1, [1]) == 2


@pytest.mark.parametrize(
    "n,fiber", [(1, 2), (2, 6), (3, 24)],
)
def test_fiber_socle_values(n, fiber):
    assert fiber_socle_of_psi(n, [1] * n) == fiber


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_bridge_identity_holds_exactly(n):
    lhs, rhs, ok = bridge_check(n, [1] * n)
    assert ok
    assert lhs == rhs == hodge_psi_integral([1] * n)
