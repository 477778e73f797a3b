"""Closed-form Hodge-integral evaluation and the fiber-side bridge check.

The moduli-side socle evaluation sends a degree-n polynomial in cotangent
(psi) classes to its integral against lambda_{g-1} lambda_g.  For psi
monomials this has a closed form: a ratio of factorials and double
factorials times a genus constant expressed through a Bernoulli number.

The same numbers are computed a second, independent way: pull the psi
classes back to the compactified fiber ring and read off the socle
coefficient there.  The two paths agree up to one global constant, which is
calibrated once on the one-point instance and then becomes a genuine
cross-check for every larger instance.
"""

import itertools
import math
from fractions import Fraction
from functools import lru_cache

from .algebra import ring_for
from .fm import fm_presentation, psi_pullback

GENUS = 2


@lru_cache(maxsize=None)
def _bernoulli_row(k):
    """Exact Bernoulli numbers B_0..B_k (B_1 = -1/2 convention)."""
    row = [Fraction(1)]
    for m in range(1, k + 1):
        acc = Fraction(0)
        for j in range(m):
            acc += math.comb(m + 1, j) * row[j]
        row.append(-acc / (m + 1))
    return tuple(row)


def bernoulli(k):
    """The Bernoulli number B_k for even k >= 2, exactly."""
    if k % 2 != 0 or k < 2:
        raise ValueError("Bernoulli arguments here must be even and >= 2")
    return _bernoulli_row(k)[k]


def double_factorial(k):
    """k!! over the integers, with (-1)!! = 1 by convention."""
    if k < -1:
        raise ValueError("double factorial needs k >= -1")
    result = 1
    while k > 1:
        result *= k
        k -= 2
    return result


def faber_constant(g):
    """The one-point genus constant:

        1 / (2^(2g-1) (2g-1)!!) * |B_{2g}| / (2g).
    """
    if g < 2:
        raise ValueError("genus must be at least 2")
    return (
        Fraction(1, 2 ** (2 * g - 1) * double_factorial(2 * g - 1))
        * abs(bernoulli(2 * g))
        / (2 * g)
    )


def hodge_psi_integral(alphas, g=GENUS):
    """Exact integral of psi_1^a1 ... psi_n^an lambda_{g-1} lambda_g.

    Valid for all a_i >= 1 with sum a_i = g - 2 + n:

        (2g+n-3)! (2g-1)!! / ((2g-1)! prod (2 a_i - 1)!!) * faber_constant(g)
    """
    alphas = list(alphas)
    n = len(alphas)
    if n < 1:
        raise ValueError("need at least one marked point")
    if any(a < 1 for a in alphas):
        raise ValueError(
            "closed form requires every exponent >= 1 "
            "(no string/dilaton extension)"
        )
    if sum(alphas) != g - 2 + n:
        raise ValueError(
            f"exponents must sum to g - 2 + n = {g - 2 + n} "
            "for a degree-matching integrand"
        )
    numerator = math.factorial(2 * g + n - 3) * double_factorial(2 * g - 1)
    denominator = math.factorial(2 * g - 1)
    for a in alphas:
        denominator *= double_factorial(2 * a - 1)
    return Fraction(numerator, denominator) * faber_constant(g)


def fiber_socle_of_psi(n, alphas, *, ring=None):
    """Socle evaluation, in the compactified fiber ring on n points, of the
    product of pulled-back psi classes with the given exponents."""
    alphas = list(alphas)
    if len(alphas) != n:
        raise ValueError("need one exponent per point")
    if ring is None:
        ring = ring_for(fm_presentation(n))
    product = None
    for i, a in enumerate(alphas, start=1):
        psi = psi_pullback(n, i)
        for _ in range(a):
            product = psi if product is None else ring.nf_poly(product * psi)
    return ring.socle_eval(product)


@lru_cache(maxsize=1)
def bridge_constant():
    """The moduli-to-fiber proportionality constant, calibrated on n = 1.

    On one point the moduli side is faber_constant(2) = 1/2880 and the fiber
    side (socle of 2 a_1 in the one-point ring) is 2, so the constant is
    1/5760.  Calibrated, not asserted.
    """
    moduli = hodge_psi_integral([1])
    fiber = fiber_socle_of_psi(1, [1])
    return moduli / fiber


def bridge_check(n, alphas, *, ring=None):
    """Compare the closed-form integral with the fiber-side evaluation.

    Returns (lhs, rhs, verdict): lhs the closed form, rhs the calibrated
    constant times the fiber socle value, verdict their exact equality.
    For n = 1 this holds by calibration; for n >= 2 it is a genuine check
    of two independent computation paths.
    """
    alphas = list(alphas)
    lhs = hodge_psi_integral(alphas)
    rhs = bridge_constant() * fiber_socle_of_psi(n, alphas, ring=ring)
    return lhs, rhs, lhs == rhs


def valid_alpha_vectors(n, g=GENUS):
    """All exponent vectors (a_1..a_n), a_i >= 1, summing to g - 2 + n."""
    total = g - 2 + n
    out = []
    for cuts in itertools.combinations(range(1, total), n - 1):
        parts = []
        prev = 0
        for c in list(cuts) + [total]:
            parts.append(c - prev)
            prev = c
        if all(p >= 1 for p in parts):
            out.append(tuple(parts))
    return out
