"""The graded-quotient engine against an independent brute-force oracle."""

import itertools
import random
from fractions import Fraction

import pytest

from tautring.algebra import (
    Monomial,
    Poly,
    Presentation,
    PresentationError,
    SizeCeilingError,
    gen_a,
    gen_b,
    ring_for,
)
from tautring.fm import fm_presentation
from tautring.xn import a_poly, b_poly, xn_presentation


# ----- independent oracle ----------------------------------------------------
#
# Re-derives graded dimensions with none of the engine's machinery: plain
# polynomial products, an explicit monomial list, and textbook Gaussian
# elimination over Fraction.  Slow, simple, and a genuinely separate path.


def _all_monomials(generators, degree):
    out = [
        Monomial.from_factors(combo)
        for combo in itertools.combinations_with_replacement(generators, degree)
    ]
    return sorted(out, key=lambda m: m.exps)


def _fraction_rank(rows):
    rows = [list(r) for r in rows if any(r)]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    col = 0
    while rows and col < ncols:
        pivot = next((i for i, r in enumerate(rows) if r[col]), None)
        if pivot is None:
            col += 1
            continue
        rows[0], rows[pivot] = rows[pivot], rows[0]
        head = rows.pop(0)
        inv = Fraction(1) / head[col]
        head = [v * inv for v in head]
        rows = [
            [rv - r[col] * hv for rv, hv in zip(r, head)] if r[col] else r
            for r in rows
        ]
        rows = [r for r in rows if any(r)]
        rank += 1
        col += 1
    return rank


def oracle_dimension(presentation, degree):
    monomials = _all_monomials(presentation.generators, degree)
    index = {m: i for i, m in enumerate(monomials)}
    rows = []
    for rel in presentation.relations:
        k = rel.degree()
        if k > degree:
            continue
        for mult in _all_monomials(presentation.generators, degree - k):
            product = rel * Poly.monomial(mult)
            row = [Fraction(0)] * len(monomials)
            for m, c in product.terms.items():
                row[index[m]] = c
            rows.append(row)
    return len(monomials) - (_fraction_rank(rows) if rows else 0)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_power_ring_dimensions_match_oracle(n):
    presentation = xn_presentation(n)
    ring = ring_for(presentation)
    for d in range(n + 2):
        assert ring.basis(d).dimension == oracle_dimension(presentation, d)


@pytest.mark.parametrize("n", [2, 3])
def test_compactified_ring_dimensions_match_oracle(n):
    presentation = fm_presentation(n)
    ring = ring_for(presentation)
    for d in range(n + 2):
        assert ring.basis(d).dimension == oracle_dimension(presentation, d)


def test_four_point_low_degrees_match_oracle():
    presentation = xn_presentation(4)
    ring = ring_for(presentation)
    for d in (0, 1, 2):
        assert ring.basis(d).dimension == oracle_dimension(presentation, d)


# ----- engine behavior --------------------------------------------------------


def test_hilbert_functions_are_palindromic():
    for n in range(1, 5):
        ring = ring_for(xn_presentation(n))
        dims = ring.hilbert(n)
        assert dims == dims[::-1]
        assert dims[0] == 1 and dims[n] == 1


def test_normal_form_kills_relation_multiples():
    rng = random.Random(424242)
    presentation = xn_presentation(3)
    ring = ring_for(presentation)
    monomials = _all_monomials(presentation.generators, 1)
    for _ in range(20):
        rel = rng.choice(presentation.relations)
        mult = rng.choice(monomials)
        product = rel * Poly.monomial(mult)
        if product.degree() > presentation.socle_degree:
            continue
        assert ring.nf_poly(product).is_zero


def test_normal_form_is_idempotent_on_random_polys():
    rng = random.Random(7)
    presentation = xn_presentation(3)
    ring = ring_for(presentation)
    monomials = _all_monomials(presentation.generators, 2)
    for _ in range(10):
        q = Poly.zero()
        for m in rng.sample(monomials, 5):
            q = q + Poly.monomial(m).scale(rng.randrange(-3, 4) or 1)
        nf = ring.nf_poly(q)
        assert ring.nf_poly(nf) == nf


def test_products_above_socle_vanish():
    ring = ring_for(xn_presentation(2))
    q = ring.multiply(a_poly(1) * a_poly(2), b_poly(1, 2))
    assert q.is_zero


def test_socle_evaluation_of_socle_monomial_is_one():
    ring = ring_for(xn_presentation(3))
    socle = a_poly(1) * a_poly(2) * a_poly(3)
    assert ring.socle_eval(socle) == 1


def test_two_point_gram_matrix_in_degree_one():
    ring = ring_for(xn_presentation(2))
    gram = ring.gram_matrix(1)
    assert gram.to_dense() == [
        [Fraction(0), Fraction(1), Fraction(0)],
        [Fraction(1), Fraction(0), Fraction(0)],
        [Fraction(0), Fraction(0), Fraction(-4)],
    ]


def test_size_ceiling_refusal():
    presentation = xn_presentation(4)
    ring = ring_for(presentation, size_ceiling=100)
    with pytest.raises(SizeCeilingError) as info:
        ring.basis(3)
    assert info.value.ceiling == 100
    assert info.value.count > 100


def test_ring_registry_reuses_instances():
    r1 = ring_for(xn_presentation(3))
    r2 = ring_for(xn_presentation(3))
    assert r1 is r2
    r3 = ring_for(xn_presentation(3), size_ceiling=10**9)
    assert r3 is not r1


def test_presentation_hash_is_stable_and_distinguishing():
    p3 = xn_presentation(3)
    assert p3.content_hash == xn_presentation(3).content_hash
    assert p3.content_hash != xn_presentation(4).content_hash
    assert p3.content_hash != fm_presentation(3).content_hash


def test_mixed_degree_polynomials_are_rejected():
    q = a_poly(1) + a_poly(1) * a_poly(2)
    with pytest.raises(ValueError):
        q.degree()


def test_defective_presentation_is_reported():
    # a1^2 = a2^2 = a1 a2 = 0 kills all of degree 2, so the declared socle
    # is unreachable and the verdict must not be "gorenstein"
    gens = [gen_a(1), gen_a(2)]
    rels = [
        a_poly(1) * a_poly(1),
        a_poly(2) * a_poly(2),
        a_poly(1) * a_poly(2),
    ]
    pres = Presentation(
        label="defective-demo",
        ground=(1, 2),
        generators=gens,
        relations=rels,
        socle_degree=2,
        socle_monomial=Monomial(((gen_a(1), 1), (gen_a(2), 1))),
    )
    report = ring_for(pres).gorenstein_check()
    assert report.verdict == "defective"
    assert not report.socle_ok


def test_monomial_payload_round_trip():
    m = Monomial(((gen_a(1), 1), (gen_b(2, 3), 2)))
    assert m.degree == 3
    payload = m.to_payload()
    rebuilt = Monomial.from_payload(payload)
    assert rebuilt == m


def test_poly_arithmetic_basics():
    p = (a_poly(1) + b_poly(1, 2)) * a_poly(2)
    assert p.degree() == 2
    assert (p - p).is_zero
    assert p.scale(0).is_zero
