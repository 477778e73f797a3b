"""Power-ring combinatorics: rewriting, standard monomials, matchings."""

import random
from fractions import Fraction

import pytest

from tautring.algebra import SizeCeilingError, _integer_rank, ring_for
from tautring.linalg import SparseMatrix, rank_and_kernel
from tautring.xn import (
    StandardMonomialXn,
    a_poly,
    b_poly,
    d_poly,
    derive_six_point,
    dual_xn,
    enumerate_standard_xn,
    matching_cycle_count,
    matching_gram,
    perfect_matchings,
    quadratic_normal_form,
    six_point_poly,
    six_point_relations,
    socle_coefficient,
    standard_from_monomial,
    verify_faber_relation,
    xn_presentation,
)

FROZEN_HILBERT = {
    1: [1, 1],
    2: [1, 3, 1],
    3: [1, 6, 6, 1],
    4: [1, 10, 21, 10, 1],
    5: [1, 15, 55, 55, 15, 1],
}


@pytest.mark.parametrize("n", sorted(FROZEN_HILBERT))
def test_power_ring_hilbert_functions(n):
    ring = ring_for(xn_presentation(n))
    assert ring.hilbert(n) == FROZEN_HILBERT[n]


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_standard_monomials_are_a_basis_without_six_subsets(n):
    # below six points there are no matching-sum relations, so the standard
    # monomials must count the dimensions exactly
    ring = ring_for(xn_presentation(n))
    for d in range(n + 1):
        assert len(enumerate_standard_xn(n, d)) == ring.basis(d).dimension


def test_six_point_relations_complete_the_presentation():
    # independent Hilbert derivation at n=6: standard-monomial count minus
    # the rank of the matching-sum relation vectors, degree by degree
    ring = ring_for(xn_presentation(6))
    for d in range(7):
        vectors, standard = six_point_relations(6, d)
        if vectors:
            entries = {}
            for i, vec in enumerate(vectors):
                for j, c in vec.items():
                    entries[(i, j)] = c
            rank = _integer_rank(
                SparseMatrix(len(vectors), len(standard), entries)
            )
        else:
            rank = 0
        assert ring.basis(d).dimension == len(standard) - rank


def test_six_point_relation_count_at_degree_three():
    vectors, standard = six_point_relations(6, 3)
    assert len(standard) == 215
    assert len(vectors) == 1
    # the vector is exactly the sum of the 15 matching monomials
    matchings = perfect_matchings(range(1, 7))
    matching_idx = {
        standard.index(StandardMonomialXn.make((), m)) for m in matchings
    }
    assert set(vectors[0]) == matching_idx
    assert all(c == 1 for c in vectors[0].values())


def test_presentation_relation_count_at_six_points():
    assert len(xn_presentation(6).relations) == 112


# ----- rewriting -------------------------------------------------------------


def test_faber_relation_reduces_to_the_quadratic_pair():
    reduced = verify_faber_relation()
    expected = (b_poly(1, 2) * b_poly(1, 3) - a_poly(1) * b_poly(2, 3)).scale(2)
    assert reduced == expected


def test_six_point_derivation_gives_minus_the_matching_sum():
    assert derive_six_point() == -six_point_poly(range(1, 7))


def test_normal_form_is_confluent_under_random_redex_choices():
    rng = random.Random(13579)
    gens = [a_poly(i) for i in range(1, 5)] + [
        b_poly(i, j) for i in range(1, 5) for j in range(i + 1, 5)
    ]
    for trial in range(15):
        q = gens[rng.randrange(len(gens))]
        for _ in range(3):
            q = q * gens[rng.randrange(len(gens))]
        reference = quadratic_normal_form(q)
        for _ in range(5):
            assert quadratic_normal_form(q, picker=rng.choice) == reference


def test_normal_forms_are_standard_monomials():
    rng = random.Random(8642)
    for _ in range(20):
        n = rng.randrange(2, 6)
        pairs = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
        q = a_poly(rng.randrange(1, n + 1))
        for _ in range(rng.randrange(1, 3)):
            q = q * b_poly(*pairs[rng.randrange(len(pairs))])
        nf = quadratic_normal_form(q)
        for monomial in nf.terms:
            standard_from_monomial(monomial)  # raises if not standard


def test_socle_coefficient_matches_engine():
    ring = ring_for(xn_presentation(3))
    ground = (1, 2, 3)
    polys = [
        a_poly(1) * a_poly(2) * a_poly(3),
        b_poly(1, 2) * b_poly(1, 3) * b_poly(2, 3),
        d_poly(1, 2) * d_poly(1, 3) * d_poly(2, 3),
        a_poly(1) * b_poly(2, 3) * b_poly(2, 3),
    ]
    for q in polys:
        assert socle_coefficient(q, ground) == ring.socle_eval(q)


# ----- duality ---------------------------------------------------------------


@pytest.mark.parametrize("n", list(range(1, 9)))
def test_duality_is_an_involution(n):
    for d in range(n + 1):
        for v in enumerate_standard_xn(n, d):
            w = dual_xn(v, n)
            assert w.degree == n - d
            assert dual_xn(w, n) == v


def test_dual_pairs_socle_to_one():
    # v . v* must hit the socle with a nonzero coefficient... not required;
    # but the diagonal of the standard/dual pairing at the matching sector
    # is (-4)^m, never zero
    for m in (1, 2):
        ground = tuple(range(1, 2 * m + 1))
        for matching in perfect_matchings(ground):
            v = StandardMonomialXn.make((), matching)
            w = dual_xn(v, 2 * m)
            value = socle_coefficient(v.to_poly() * w.to_poly(), ground)
            assert value == Fraction(-4) ** m


# ----- matching Gram ----------------------------------------------------------


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_matching_gram_entries_follow_the_cycle_count(m):
    gram = matching_gram(m)
    matchings = perfect_matchings(range(1, 2 * m + 1))
    for i, u in enumerate(matchings):
        for j, v in enumerate(matchings):
            cycles = matching_cycle_count(u, v)
            assert gram.entry(i, j) == Fraction(-4) ** cycles


def test_matching_gram_three_pairs_has_corank_one():
    gram = matching_gram(3)
    rank, kernel = rank_and_kernel(gram)
    assert rank == 14
    assert len(kernel) == 1
    vec = kernel[0]
    # kernel = the six-point vector: all 15 coordinates equal
    nonzero = [c for c in vec if c]
    assert len(nonzero) == 15
    assert len(set(nonzero)) == 1


def test_matching_gram_refuses_oversized_instances():
    with pytest.raises(SizeCeilingError):
        matching_gram(6)


def test_cycle_count_examples():
    u = ((1, 2), (3, 4))
    v = ((1, 3), (2, 4))
    assert matching_cycle_count(u, u) == 2  # two shared pairs
    assert matching_cycle_count(u, v) == 1  # one 4-cycle


# ----- enumeration hygiene ----------------------------------------------------


def test_enumeration_is_sorted_and_duplicate_free():
    for n in (3, 5):
        for d in range(n + 1):
            std = enumerate_standard_xn(n, d)
            assert len(set(std)) == len(std)
            assert std == sorted(std, key=lambda s: s.sort_key)


def test_standard_monomial_serialization_round_trip():
    v = StandardMonomialXn.make((2,), ((3, 4),))
    payload = v.serialize()
    assert payload == {"A": [2], "B": [[3, 4]]}
    assert StandardMonomialXn.deserialize(payload) == v
