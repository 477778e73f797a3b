"""Tautological ring of the n-th power of a fixed genus-2 curve.

Generators are, per marked point, the class ``a_i`` of a Weierstrass point
on the i-th factor (so the canonical class is ``K_i = 2 a_i``) and, per pair
of points, the corrected diagonal ``b_{i,j} = d_{i,j} - a_i - a_j`` where
``d_{i,j}`` is the diagonal class.  The relations are quadratic --

    a_i^2 = 0,   a_i b_{i,j} = 0,   b_{i,j}^2 = -4 a_i a_j,
    b_{i,j} b_{i,k} = a_i b_{j,k}

-- plus, for every six distinct indices, the degree-three matching sum

    sum over perfect matchings {{i1,i2},{i3,i4},{i5,i6}}  of
    b_{i1,i2} b_{i3,i4} b_{i5,i6}  =  0.

The quadratic relations form a confluent rewrite system whose normal forms
are the *standard monomials* (a squarefree product of a's times disjoint
b-pairs avoiding the a-indices); most of this module is bookkeeping around
that combinatorial skeleton.
"""

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .algebra import (
    Monomial,
    Poly,
    Presentation,
    SizeCeilingError,
    gen_a,
    gen_b,
)
from .linalg import SparseMatrix

#: Perfect-matching Gram matrices grow as (2m-1)!!; past this the engine
#: refuses rather than grind (945 matchings at m=5 is the largest sensible).
MATCHING_GRAM_LIMIT = 5


def default_ground(n):
    if n < 0:
        raise ValueError("need a nonnegative number of points")
    return tuple(range(1, n + 1))


def a_poly(i):
    return Poly.generator(gen_a(i))


def b_poly(i, j):
    return Poly.generator(gen_b(i, j))


def d_poly(i, j):
    """The diagonal class d_{i,j} = a_i + a_j + b_{i,j}."""
    return a_poly(i) + a_poly(j) + b_poly(i, j)


def k_poly(i):
    """The canonical class of the i-th factor, K_i = 2 a_i."""
    return a_poly(i).scale(2)


# ----- quadratic rewrite system ------------------------------------------


def _split_ab(monomial):
    """Monomial -> (a_exps, b_exps) dicts; rejects non-a/b generators."""
    a_exps = {}
    b_exps = {}
    for g, e in monomial.exps:
        if g.kind == "a":
            a_exps[g.data[0]] = e
        elif g.kind == "b":
            b_exps[g.data] = e
        else:
            raise ValueError(f"not an a/b monomial: {monomial}")
    return a_exps, b_exps


def _join_ab(a_exps, b_exps):
    factors = [(gen_a(i), e) for i, e in sorted(a_exps.items())]
    factors += [(gen_b(*p), e) for p, e in sorted(b_exps.items())]
    return Monomial(tuple(factors))


def _collect_redexes(a_exps, b_exps, contract_shared):
    redexes = []
    for i in sorted(a_exps):
        if a_exps[i] >= 2:
            redexes.append(("a_square", i))
    pairs = sorted(b_exps)
    for p in pairs:
        if p[0] in a_exps or p[1] in a_exps:
            redexes.append(("a_meets_b", p))
    for p in pairs:
        if b_exps[p] >= 2:
            redexes.append(("b_square", p))
    if contract_shared:
        for p, q in itertools.combinations(pairs, 2):
            shared = set(p) & set(q)
            if shared:
                redexes.append(("b_shared", p, q))
    return redexes


def _rewrite_monomial(a_exps, b_exps, contract_shared=True, picker=None):
    """Run the quadratic rewrite chain on one monomial.

    Returns ``(coeff, a_exps, b_exps)`` or ``None`` when the monomial
    rewrites to zero.  ``picker`` selects among available redexes (used by
    the confluence tests); the default takes the first in a fixed scan
    order, which makes the result deterministic.
    """
    coeff = Fraction(1)
    while True:
        redexes = _collect_redexes(a_exps, b_exps, contract_shared)
        if not redexes:
            return coeff, a_exps, b_exps
        choice = redexes[0] if picker is None else picker(redexes)
        tag = choice[0]
        if tag in ("a_square", "a_meets_b"):
            return None
        if tag == "b_square":
            p = choice[1]
            coeff *= -4
            b_exps[p] -= 2
            if not b_exps[p]:
                del b_exps[p]
            for i in p:
                a_exps[i] = a_exps.get(i, 0) + 1
        else:  # b_shared: b_{s,j} b_{s,k} -> a_s b_{j,k}
            p, q = choice[1], choice[2]
            (shared,) = set(p) & set(q)
            j = p[0] if p[1] == shared else p[1]
            k = q[0] if q[1] == shared else q[1]
            for pair in (p, q):
                b_exps[pair] -= 1
                if not b_exps[pair]:
                    del b_exps[pair]
            a_exps[shared] = a_exps.get(shared, 0) + 1
            new = (j, k) if j < k else (k, j)
            b_exps[new] = b_exps.get(new, 0) + 1


def quadratic_normal_form(q, *, contract_shared=True, picker=None):
    """Normal form of an a/b polynomial under the quadratic relations.

    With ``contract_shared`` the full system is used and every term lands on
    a standard monomial; without it the shared-index contraction
    ``b_{i,j} b_{i,k} -> a_i b_{j,k}`` is skipped, which is what the divisor
    computation in :func:`verify_faber_relation` needs (the contraction is
    exactly the relation that computation is supposed to exhibit).
    """
    out = {}
    for m, c in q.terms.items():
        a_exps, b_exps = _split_ab(m)
        res = _rewrite_monomial(dict(a_exps), dict(b_exps), contract_shared, picker)
        if res is None:
            continue
        factor, a_exps, b_exps = res
        mono = _join_ab(a_exps, b_exps)
        v = out.get(mono, 0) + c * factor
        if v:
            out[mono] = v
        elif mono in out:
            del out[mono]
    return Poly(out)


# ----- standard monomials --------------------------------------------------


@dataclass(frozen=True)
class StandardMonomialXn:
    """A squarefree a-part times disjoint b-pairs avoiding the a-indices."""

    A: frozenset
    B: frozenset  # of increasing pairs

    def __post_init__(self):
        seen = set(self.A)
        for p in self.B:
            i, j = p
            if not i < j:
                raise ValueError(f"pair {p} must be increasing")
            if i in seen or j in seen:
                raise ValueError("a-indices and b-pairs must be disjoint")
            seen.add(i)
            seen.add(j)

    @classmethod
    def make(cls, A=(), B=()):
        return cls(frozenset(A), frozenset(tuple(sorted(p)) for p in B))

    @property
    def degree(self):
        return len(self.A) + len(self.B)

    @property
    def support(self):
        out = set(self.A)
        for p in self.B:
            out.update(p)
        return frozenset(out)

    @property
    def sort_key(self):
        return (tuple(sorted(self.A)), tuple(sorted(self.B)))

    def to_monomial(self):
        factors = [(gen_a(i), 1) for i in sorted(self.A)]
        factors += [(gen_b(*p), 1) for p in sorted(self.B)]
        return Monomial(tuple(factors))

    def to_poly(self):
        return Poly.monomial(self.to_monomial())

    def serialize(self):
        return {
            "A": sorted(self.A),
            "B": [list(p) for p in sorted(self.B)],
        }

    @classmethod
    def deserialize(cls, payload):
        return cls.make(payload.get("A", ()), payload.get("B", ()))

    def __str__(self):
        return str(self.to_monomial())

    __repr__ = __str__


def standard_from_monomial(m):
    """Interpret a squarefree a/b Monomial as a StandardMonomialXn."""
    a_exps, b_exps = _split_ab(m)
    if any(e != 1 for e in a_exps.values()) or any(e != 1 for e in b_exps.values()):
        raise ValueError(f"not a standard monomial: {m}")
    return StandardMonomialXn.make(a_exps.keys(), b_exps.keys())


def perfect_matchings(elements):
    """All perfect matchings of an even-sized collection, as sorted tuples
    of increasing pairs.  Deterministic order: the smallest element pairs
    with each partner in turn, recursively."""
    elems = sorted(elements)
    if len(elems) % 2:
        raise ValueError("cannot match an odd number of elements")
    if not elems:
        return [()]
    first = elems[0]
    out = []
    for idx in range(1, len(elems)):
        partner = elems[idx]
        rest = elems[1:idx] + elems[idx + 1:]
        for sub in perfect_matchings(rest):
            out.append(((first, partner),) + sub)
    return out


def enumerate_standard_xn(n, degree, ground=None):
    """All standard monomials of the given degree, sorted by (A, B)."""
    ground = default_ground(n) if ground is None else tuple(sorted(ground))
    if degree < 0:
        raise ValueError("degree must be nonnegative")
    out = []
    for npairs in range(degree + 1):
        na = degree - npairs
        if na + 2 * npairs > len(ground):
            continue
        for A in itertools.combinations(ground, na):
            rest = [x for x in ground if x not in A]
            for supp in itertools.combinations(rest, 2 * npairs):
                for matching in perfect_matchings(supp):
                    out.append(StandardMonomialXn.make(A, matching))
    out.sort(key=lambda v: v.sort_key)
    return out


def dual_xn(v, n, ground=None):
    """The dual standard monomial: complementary a-part, same b-part."""
    ground = default_ground(n) if ground is None else tuple(sorted(ground))
    if not v.support <= set(ground):
        raise ValueError("monomial uses indices outside the ground set")
    A_dual = frozenset(ground) - v.A - v.support
    return StandardMonomialXn(A_dual, v.B)


# ----- presentation ---------------------------------------------------------

_PRESENTATION_MEMO = {}


def xn_presentation(n, ground=None):
    """Presentation of the ring for ``n`` points (memoized per ground set)."""
    ground = default_ground(n) if ground is None else tuple(sorted(ground))
    hit = _PRESENTATION_MEMO.get(ground)
    if hit is not None:
        return hit
    relations = []
    for i in ground:
        relations.append(a_poly(i) * a_poly(i))
    pairs = list(itertools.combinations(ground, 2))
    for i, j in pairs:
        relations.append(a_poly(i) * b_poly(i, j))
        relations.append(a_poly(j) * b_poly(i, j))
    for i, j in pairs:
        relations.append(b_poly(i, j) * b_poly(i, j) + (a_poly(i) * a_poly(j)).scale(4))
    for i in ground:
        others = [x for x in ground if x != i]
        for j, k in itertools.combinations(others, 2):
            relations.append(b_poly(i, j) * b_poly(i, k) - a_poly(i) * b_poly(j, k))
    for six in itertools.combinations(ground, 6):
        relations.append(six_point_poly(six))
    socle_monomial = Monomial(tuple((gen_a(i), 1) for i in ground))
    pres = Presentation(
        label=f"xn:{len(ground)}",
        ground=ground,
        generators=[gen_a(i) for i in ground] + [gen_b(i, j) for i, j in pairs],
        relations=relations,
        socle_degree=len(ground),
        socle_monomial=socle_monomial,
    )
    _PRESENTATION_MEMO[ground] = pres
    return pres


def six_point_poly(indices):
    """The matching sum over six distinct indices (15 cubic terms)."""
    idx = tuple(sorted(indices))
    if len(idx) != 6 or len(set(idx)) != 6:
        raise ValueError("need exactly six distinct indices")
    total = Poly.zero()
    for matching in perfect_matchings(idx):
        term = Poly.constant(1)
        for i, j in matching:
            term = term * b_poly(i, j)
        total = total + term
    return total


def six_point_relations(n, degree, ground=None):
    """Degree-``degree`` relation vectors spanned by the matching sums.

    Every product (six-index matching sum) x (standard monomial of degree
    ``degree - 3``) is quadratic-normal-formed and written in coordinates
    over ``enumerate_standard_xn(n, degree)``.  Vectors are sparse dicts
    ``{standard index: coefficient}``; identically-zero products are
    omitted.  Returns ``(vectors, standard_list)``.
    """
    ground = default_ground(n) if ground is None else tuple(sorted(ground))
    standard = enumerate_standard_xn(n, degree, ground)
    index = {v: i for i, v in enumerate(standard)}
    vectors = []
    if degree < 3 or len(ground) < 6:
        return vectors, standard
    for six in itertools.combinations(ground, 6):
        base = six_point_poly(six)
        for mult in enumerate_standard_xn(n, degree - 3, ground):
            nf = quadratic_normal_form(base * mult.to_poly())
            if nf.is_zero:
                continue
            vec = {}
            for m, c in nf.terms.items():
                vec[index[standard_from_monomial(m)]] = c
            vectors.append(vec)
    return vectors, standard


# ----- socle evaluation without the generic engine -------------------------


def socle_coefficient(q, ground):
    """Socle evaluation via the rewrite system alone.

    Rewrites ``q`` to standard form and reads off the coefficient of the
    product of all point classes over ``ground``.  Matches the generic
    engine's normalized socle evaluation (the engine cross-checks this), but
    needs no echelonization, so it scales to the large matching Grams.
    """
    nf = quadratic_normal_form(q)
    target = Monomial(tuple((gen_a(i), 1) for i in sorted(ground)))
    return nf.terms.get(target, Fraction(0))


def matching_cycle_count(u, v):
    """Number of cycles in the union multigraph of two perfect matchings.

    Every vertex has one edge from each matching, so the union is a
    disjoint set of even cycles (a shared pair counts as a 2-cycle).  The
    Gram entry of the two matching monomials is (-4) to this count.
    """
    next_u = {}
    next_v = {}
    for i, j in u:
        next_u[i], next_u[j] = j, i
    for i, j in v:
        next_v[i], next_v[j] = j, i
    if set(next_u) != set(next_v):
        raise ValueError("matchings must cover the same points")
    unseen = set(next_u)
    cycles = 0
    while unseen:
        start = min(unseen)
        node, use_u = start, True
        while True:
            unseen.discard(node)
            node = next_u[node] if use_u else next_v[node]
            use_u = not use_u
            if node == start and use_u:
                break
        cycles += 1
    return cycles


def matching_gram(m):
    """Gram matrix of all m-pair perfect matchings on 2m points.

    Row/column order is ``perfect_matchings(range(1, 2m+1))``.  Entries are
    socle evaluations of products of the corresponding standard monomials,
    computed through the rewrite system.  Refuses for ``m > 5`` (the matrix
    side is the double factorial (2m-1)!!).
    """
    if m < 1:
        raise ValueError("need at least one pair")
    if m > MATCHING_GRAM_LIMIT:
        count = 1
        for k in range(3, 2 * m, 2):
            count *= k
        raise SizeCeilingError("matching-gram", m, count * count,
                               MATCHING_GRAM_LIMIT)
    ground = default_ground(2 * m)
    matchings = perfect_matchings(ground)
    polys = [
        StandardMonomialXn.make((), matching).to_poly() for matching in matchings
    ]
    entries = {}
    for i, vp in enumerate(polys):
        for j, wp in enumerate(polys):
            if j < i:
                value = entries.get((j, i), Fraction(0))
            else:
                value = socle_coefficient(vp * wp, ground)
            if value:
                entries[(i, j)] = value
    return SparseMatrix(len(matchings), len(matchings), entries)


# ----- derivations of the named relations ----------------------------------


def verify_faber_relation():
    """Pull the known divisor relation on three points back to this ring.

    Expands
        K1 d12 + K1 d13 + K2 d23 - K1 d23 - K2 d13 - K3 d12 + 2 d12 d13
    (a relation among divisor classes on the 3-point universal curve) and
    reduces it with the obvious rules only -- a^2, a_i b_{i,j}, b^2; *not*
    the shared-index contraction, which is precisely what this relation
    proves.  The result is 2 (b12 b13 - a1 b23).
    """
    q = (
        k_poly(1) * d_poly(1, 2)
        + k_poly(1) * d_poly(1, 3)
        + k_poly(2) * d_poly(2, 3)
        - k_poly(1) * d_poly(2, 3)
        - k_poly(2) * d_poly(1, 3)
        - k_poly(3) * d_poly(1, 2)
        + (d_poly(1, 2) * d_poly(1, 3)).scale(2)
    )
    return quadratic_normal_form(q, contract_shared=False)


def fiber_pushforward(q, n):
    """Push a class on n points forward along the projection dropping the
    last point (an X-fiber bundle of relative dimension one).

    After rewriting to standard form, a term maps by: drop a factor ``a_n``
    (a point evaluates to 1 against the fiber); kill terms with a ``b_{i,n}``
    factor (the corrected diagonal pushes to zero); kill terms not involving
    the last point at all (they are pull-backs, one dimension short).
    """
    nf = quadratic_normal_form(q)
    out = {}
    for m, c in nf.terms.items():
        a_exps, b_exps = _split_ab(m)
        if any(n in p for p in b_exps):
            continue
        if n not in a_exps:
            continue
        del a_exps[n]
        mono = _join_ab(a_exps, b_exps)
        v = out.get(mono, 0) + c
        if v:
            out[mono] = v
        elif mono in out:
            del out[mono]
    return Poly(out)


def derive_six_point():
    """Derive the six-index matching relation from a Chern class identity.

    On seven points, the bundle of third-order jets along the length-7
    divisor has total Chern class  prod_d (1 + 3 K_d - Delta_d)  with
    Delta_d the sum of the diagonals with earlier points; comparison with
    the (trivially pulled back) rank-5 source bundle forces its third Chern
    class to vanish in codimension 3.  Multiplying by the point class a_7
    and pushing forward along the last projection lands the identity on six
    points, where it reads as *minus* the matching sum.
    """
    ground7 = default_ground(7)
    factors = []
    for d in ground7:
        u = a_poly(d).scale(6)
        for i in range(1, d):
            u = u - d_poly(i, d)
        factors.append(u)
    # Elementary symmetric polynomial e_3 of the degree-one factor parts.
    e = [Poly.constant(1), Poly.zero(), Poly.zero(), Poly.zero()]
    for u in factors:
        for k in (3, 2, 1):
            e[k] = e[k] + e[k - 1] * u
    q = e[3] * a_poly(7)
    return fiber_pushforward(q, 7)
