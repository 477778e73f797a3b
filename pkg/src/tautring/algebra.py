"""Generic graded quotient-ring engine over exact rationals.

A :class:`Presentation` lists generators (all in degree one), homogeneous
relation polynomials, and a socle degree.  The engine computes each graded
piece of the quotient ring by brute force: enumerate every degree-``d``
monomial, span the degree-``d`` slice of the ideal (relation times
complementary monomial), echelonize exactly, and read the quotient off the
non-pivot columns.  No Groebner machinery -- ranks of explicit integer
matrices decide everything, which keeps the verification auditable.

Monomials are encoded as packed integers (one bit field per generator
exponent) so that multiplying two monomials is a single integer addition;
column indices are positions in the fixed enumeration order of
``degree_keys``.
"""

import hashlib
import itertools
import json
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, gcd, lcm

from ._kernel import SpanReducer, degree_keys
from .linalg import SparseMatrix

#: Default per-degree ceiling on the number of monomials the engine will
#: enumerate before refusing (guards against accidental combinatorial blowup).
SIZE_CEILING_DEFAULT = 5_000_000

#: Bumped whenever the on-disk basis/gram payload format or the engine's
#: column conventions change; part of every cache key.
ENGINE_VERSION = "1"


class SizeCeilingError(RuntimeError):
    """Raised when a graded piece would exceed the monomial ceiling."""

    def __init__(self, label, degree, count, ceiling):
        super().__init__(
            f"degree {degree} of {label!r} needs {count} monomials, "
            f"above the ceiling of {ceiling}"
        )
        self.label = label
        self.degree = degree
        self.count = count
        self.ceiling = ceiling


class PresentationError(ValueError):
    """A presentation failed validation or behaves inconsistently."""


class SocleError(PresentationError):
    """The socle is not one-dimensional (or its witness class vanishes)."""


@dataclass(frozen=True)
class Generator:
    """A degree-one generator: a point class, a diagonal correction, or a
    boundary divisor indexed by a subset of the marked points."""

    kind: str  # "a", "b" or "D"
    data: tuple

    def __post_init__(self):
        if self.kind == "a":
            (i,) = self.data
            if i < 1:
                raise ValueError("point index must be >= 1")
        elif self.kind == "b":
            i, j = self.data
            if not 1 <= i < j:
                raise ValueError("pair must be increasing and >= 1")
        elif self.kind == "D":
            subset = self.data
            if tuple(sorted(set(subset))) != subset or len(subset) < 3:
                raise ValueError("subset must be sorted, distinct, size >= 3")
        else:
            raise ValueError(f"unknown generator kind {self.kind!r}")

    @property
    def sort_key(self):
        order = {"a": 0, "b": 1, "D": 2}
        return (order[self.kind], len(self.data), self.data)

    def __lt__(self, other):
        return self.sort_key < other.sort_key

    def to_payload(self):
        return [self.kind, list(self.data)]

    @classmethod
    def from_payload(cls, payload):
        kind, data = payload
        return cls(kind, tuple(data))

    def __str__(self):
        if self.kind == "a":
            return f"a{self.data[0]}"
        if self.kind == "b":
            return "b(%d,%d)" % self.data
        return "D(%s)" % ",".join(map(str, self.data))

    __repr__ = __str__


def gen_a(i):
    return Generator("a", (i,))


def gen_b(i, j):
    if i > j:
        i, j = j, i
    return Generator("b", (i, j))


def gen_D(subset):
    return Generator("D", tuple(sorted(subset)))


@dataclass(frozen=True)
class Monomial:
    """A product of generators with positive integer exponents.

    ``exps`` is a tuple of ``(Generator, exponent)`` pairs sorted by the
    generator order; the empty tuple is the unit monomial.
    """

    exps: tuple = ()

    def __post_init__(self):
        if any(e <= 0 for _, e in self.exps):
            raise ValueError("exponents must be positive")
        keys = [g.sort_key for g, _ in self.exps]
        if keys != sorted(keys) or len(set(keys)) != len(keys):
            raise ValueError("factors must be sorted and distinct")

    @classmethod
    def from_factors(cls, factors):
        """Build from an iterable of generators (repeats multiply up)."""
        acc = {}
        for g in factors:
            acc[g] = acc.get(g, 0) + 1
        return cls(tuple(sorted(acc.items(), key=lambda t: t[0].sort_key)))

    @property
    def degree(self):
        return sum(e for _, e in self.exps)

    def __mul__(self, other):
        acc = dict(self.exps)
        for g, e in other.exps:
            acc[g] = acc.get(g, 0) + e
        return Monomial(tuple(sorted(acc.items(), key=lambda t: t[0].sort_key)))

    def exponent(self, g):
        for h, e in self.exps:
            if h == g:
                return e
        return 0

    def to_payload(self):
        return [[g.to_payload(), e] for g, e in self.exps]

    @classmethod
    def from_payload(cls, payload):
        return cls(
            tuple((Generator.from_payload(g), e) for g, e in payload)
        )

    def __str__(self):
        if not self.exps:
            return "1"
        return "*".join(
            str(g) if e == 1 else f"{g}^{e}" for g, e in self.exps
        )

    __repr__ = __str__


ONE = Monomial()


class Poly:
    """A finite rational linear combination of monomials."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        data = {}
        if terms:
            items = terms.items() if isinstance(terms, dict) else terms
            for m, c in items:
                c = Fraction(c)
                if not c:
                    continue
                prev = data.get(m)
                c = c if prev is None else prev + c
                if c:
                    data[m] = c
                elif prev is not None:
                    del data[m]
        self.terms = data

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def monomial(cls, m, coeff=1):
        return cls({m: Fraction(coeff)})

    @classmethod
    def generator(cls, g, coeff=1):
        return cls.monomial(Monomial(((g, 1),)), coeff)

    @classmethod
    def constant(cls, c):
        return cls.monomial(ONE, c)

    @property
    def is_zero(self):
        return not self.terms

    def degree(self):
        """Common degree of all terms; None for zero, error if mixed."""
        degs = {m.degree for m in self.terms}
        if not degs:
            return None
        if len(degs) > 1:
            raise ValueError(f"polynomial is not homogeneous: degrees {sorted(degs)}")
        return degs.pop()

    def is_homogeneous(self):
        return len({m.degree for m in self.terms}) <= 1

    def __add__(self, other):
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            elif m in out:
                del out[m]
        p = Poly.__new__(Poly)
        p.terms = out
        return p

    def __neg__(self):
        p = Poly.__new__(Poly)
        p.terms = {m: -c for m, c in self.terms.items()}
        return p

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, Poly):
            out = {}
            for m1, c1 in self.terms.items():
                for m2, c2 in other.terms.items():
                    m = m1 * m2
                    v = out.get(m, 0) + c1 * c2
                    if v:
                        out[m] = v
                    elif m in out:
                        del out[m]
            p = Poly.__new__(Poly)
            p.terms = out
            return p
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, c):
        c = Fraction(c)
        if not c:
            return Poly.zero()
        p = Poly.__new__(Poly)
        p.terms = {m: v * c for m, v in self.terms.items()}
        return p

    def __eq__(self, other):
        return isinstance(other, Poly) and self.terms == other.terms

    def sorted_terms(self):
        """Terms sorted by monomial (generator order, then exponents)."""
        return sorted(
            self.terms.items(),
            key=lambda t: [(g.sort_key, e) for g, e in t[0].exps],
        )

    def to_payload(self):
        return [
            [m.to_payload(), str(c)] for m, c in self.sorted_terms()
        ]

    @classmethod
    def from_payload(cls, payload):
        return cls(
            (Monomial.from_payload(m), Fraction(c)) for m, c in payload
        )

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            parts.append(f"{c}*{m}" if m.exps else f"{c}")
        return " + ".join(parts)

    __repr__ = __str__


def canonical_json(payload):
    """Deterministic JSON used for hashing and cache bodies."""
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


class Presentation:
    """A graded ring presentation: generators, relations, socle data.

    All generators sit in degree one; relations must be homogeneous of
    degree at least one.  ``ground`` is the tuple of point labels the
    presentation is built over (used by enumeration code and reports).
    """

    def __init__(self, label, ground, generators, relations, socle_degree, socle_monomial):
        self.label = label
        self.ground = tuple(ground)
        self.generators = tuple(generators)
        self.relations = tuple(relations)
        self.socle_degree = socle_degree
        self.socle_monomial = socle_monomial
        self._validate()
        self._hash = None

    def _validate(self):
        if len(set(self.generators)) != len(self.generators):
            raise PresentationError("duplicate generators")
        genset = set(self.generators)
        for rel in self.relations:
            if rel.is_zero:
                raise PresentationError("zero relation")
            d = rel.degree()  # raises if mixed degrees
            if d < 1:
                raise PresentationError("relations must have positive degree")
            for m in rel.terms:
                if any(g not in genset for g, _ in m.exps):
                    raise PresentationError(f"relation uses unknown generator: {m}")
        if self.socle_degree < 0:
            raise PresentationError("socle degree must be nonnegative")
        if self.socle_monomial.degree != self.socle_degree:
            raise PresentationError("socle monomial degree mismatch")

    def to_payload(self):
        return {
            "schema": "tautring-presentation/1",
            "label": self.label,
            "ground": list(self.ground),
            "generators": [g.to_payload() for g in self.generators],
            "relations": [r.to_payload() for r in self.relations],
            "socle_degree": self.socle_degree,
            "socle_monomial": self.socle_monomial.to_payload(),
        }

    @property
    def content_hash(self):
        if self._hash is None:
            self._hash = hashlib.sha256(
                canonical_json(self.to_payload()).encode()
            ).hexdigest()
        return self._hash

    def __repr__(self):
        return (
            f"Presentation({self.label!r}, {len(self.generators)} generators, "
            f"{len(self.relations)} relations, socle degree {self.socle_degree})"
        )


class GradedBasis:
    """One graded piece of a quotient ring.

    Records the monomial enumeration, the echelonized relation slice, and
    the quotient data.  ``dimension == monomial_count - rank`` always; the
    quotient basis is the set of non-pivot columns, which is canonical for
    the row space (independent of relation order).
    """

    def __init__(self, ring, degree, keys, pivot_cols, echelon, dimension):
        self.ring = ring
        self.degree = degree
        self._keys = keys
        self.monomial_count = len(keys)
        self.pivot_cols = pivot_cols  # sorted tuple
        self.rank = len(pivot_cols)
        self.dimension = dimension
        self._echelon = echelon  # [(lead, cols, coeffs)] sorted; None if elided
        self.quotient_cols = _complement(pivot_cols, self.monomial_count)
        self._rref = None
        self._qpos = None
        self._pivot_set = None
        self._lock = threading.Lock()

    @property
    def keys(self):
        return self._keys

    def monomial_at(self, col):
        return self.ring.decode_key(self._keys[col])

    @property
    def monomial_list(self):
        """All degree-``degree`` monomials in enumeration (column) order."""
        return [self.ring.decode_key(k) for k in self._keys]

    @property
    def quotient_basis(self):
        """Monomials whose classes form a basis of this graded piece."""
        return [self.monomial_at(c) for c in self.quotient_cols]

    @property
    def relation_echelon(self):
        """The echelonized relation slice as a SparseMatrix (one row per
        pivot, canonical RREF)."""
        rref = self.rref()
        entries = {}
        for i, lead in enumerate(self.pivot_cols):
            cols, coeffs = rref[lead]
            for j, v in zip(cols, coeffs):
                entries[(i, j)] = Fraction(v)
        return SparseMatrix(self.rank, self.monomial_count, entries)

    def has_echelon(self):
        return self._echelon is not None

    def rref(self):
        """Canonical integer RREF rows, keyed by pivot column.

        Built lazily from the raw echelon by back-substitution (descending
        pivot order, so tails only reference already-reduced rows).
        """
        with self._lock:
            if self._rref is None:
                if self._echelon is None:
                    raise PresentationError(
                        "echelon data unavailable (basis loaded dimension-only)"
                    )
                pivot_rows = {lead: (cols, coeffs) for lead, cols, coeffs in self._echelon}
                from .linalg import _rref_from_echelon

                self._rref = _rref_from_echelon(pivot_rows)
            return self._rref

    def quotient_pos(self, col):
        """Position of a non-pivot column inside the quotient basis."""
        if self._qpos is None:
            self._qpos = {c: i for i, c in enumerate(self.quotient_cols)}
        return self._qpos[col]

    def pivot_set(self):
        if self._pivot_set is None:
            self._pivot_set = frozenset(self.pivot_cols)
        return self._pivot_set

    def echelon_rows(self):
        return self._echelon

    def to_payload(self, include_echelon=True):
        payload = {
            "schema": "tautring-basis/1",
            "degree": self.degree,
            "monomial_count": self.monomial_count,
            "rank": self.rank,
            "dimension": self.dimension,
            "pivot_cols": list(self.pivot_cols),
        }
        if include_echelon and self._echelon is not None:
            payload["echelon"] = [
                [lead, list(cols), [str(c) for c in coeffs]]
                for lead, cols, coeffs in self._echelon
            ]
        return payload


def _complement(sorted_cols, total):
    """Ascending tuple of the columns not in ``sorted_cols``."""
    out = []
    it = iter(sorted_cols)
    nxt = next(it, None)
    for c in range(total):
        if c == nxt:
            nxt = next(it, None)
        else:
            out.append(c)
    return tuple(out)


class GradedRing:
    """Engine wrapper around a Presentation: bases, products, pairings."""

    def __init__(self, presentation, *, size_ceiling=SIZE_CEILING_DEFAULT,
                 cache=None, jobs=1):
        self.presentation = presentation
        self.size_ceiling = size_ceiling
        self.cache = cache
        self.jobs = max(1, jobs)
        gens = presentation.generators
        self._gen_index = {g: i for i, g in enumerate(gens)}
        # Bit width per exponent slot: big enough for any degree we can
        # afford to enumerate; checked again in basis().
        self._bits = max(6, (presentation.socle_degree + 2).bit_length())
        self._gen_keys = [1 << (self._bits * i) for i in range(len(gens))]
        self._mask = (1 << self._bits) - 1
        self._degree_cap = self._mask
        self._mono_keys_memo = {}
        self._key_to_col_memo = {}
        self._basis_memo = {}
        self._socle_coord = None
        self._socle_table_memo = None
        self._gram_rank_memo = {}
        self._master_lock = threading.Lock()
        self._degree_locks = {}
        self._prepped = self._prepare_relations()
        self.cache_hits = 0
        self.cache_misses = 0

    # ----- encoding ---------------------------------------------------

    def monomial_key(self, m):
        key = 0
        for g, e in m.exps:
            idx = self._gen_index.get(g)
            if idx is None:
                raise PresentationError(f"monomial uses unknown generator: {m}")
            key += e << (self._bits * idx)
        return key

    def decode_key(self, key):
        exps = []
        gens = self.presentation.generators
        i = 0
        while key:
            e = key & self._mask
            if e:
                exps.append((gens[i], e))
            key >>= self._bits
            i += 1
        return Monomial(tuple(exps))

    def _exp_vector(self, m):
        vec = [0] * len(self.presentation.generators)
        for g, e in m.exps:
            vec[self._gen_index[g]] = e
        return tuple(vec)

    # ----- relation preparation ----------------------------------------

    def _prepare_relations(self):
        """Relations as integer term rows, presorted for the kernel.

        Terms are ordered by descending lexicographic exponent vector --
        the same order that assigns column indices -- so that translated
        columns come out strictly increasing without per-row sorting.
        Relations themselves are sorted shortest first: single-term rows
        make tail-free pivots, which keeps fill-in low for everything
        inserted afterwards.
        """
        prepped = []
        for rel in self.presentation.relations:
            terms = list(rel.terms.items())
            den = lcm(*(c.denominator for _, c in terms))
            int_terms = [
                (self._exp_vector(m), self.monomial_key(m), int(c * den))
                for m, c in terms
            ]
            g = 0
            for _, _, c in int_terms:
                g = gcd(g, c)
                if g == 1:
                    break
            int_terms.sort(key=lambda t: t[0], reverse=True)
            keys = [k for _, k, _ in int_terms]
            coeffs = [c // g for _, _, c in int_terms]
            if coeffs[0] < 0:
                coeffs = [-c for c in coeffs]
            prepped.append((rel.degree(), keys, coeffs))
        prepped.sort(key=lambda t: (len(t[1]), t[0], t[1], t[2]))
        return prepped

    # ----- monomial enumeration ----------------------------------------

    def monomial_count(self, d):
        ngens = len(self.presentation.generators)
        if ngens == 0:
            return 1 if d == 0 else 0
        return comb(ngens + d - 1, d)

    def _mono_keys(self, d):
        with self._master_lock:
            hit = self._mono_keys_memo.get(d)
        if hit is not None:
            return hit
        keys = degree_keys(self._gen_keys, d)
        with self._master_lock:
            self._mono_keys_memo[d] = keys
        return keys

    def key_to_col(self, d):
        with self._master_lock:
            hit = self._key_to_col_memo.get(d)
        if hit is not None:
            return hit
        mapping = {k: i for i, k in enumerate(self._mono_keys(d))}
        with self._master_lock:
            self._key_to_col_memo[d] = mapping
        return mapping

    # ----- basis construction ------------------------------------------

    def _degree_lock(self, d):
        with self._master_lock:
            lock = self._degree_locks.get(d)
            if lock is None:
                lock = self._degree_locks[d] = threading.Lock()
            return lock

    def basis(self, d):
        """The degree-``d`` graded piece (memoized, cache-aware)."""
        if d < 0:
            raise ValueError("degree must be nonnegative")
        hit = self._basis_memo.get(d)
        if hit is not None:
            return hit
        with self._degree_lock(d):
            hit = self._basis_memo.get(d)
            if hit is not None:
                return hit
            basis = self._load_cached_basis(d)
            if basis is None:
                basis = self._compute_basis(d)
                self._store_cached_basis(basis)
            self._basis_memo[d] = basis
            return basis

    def _compute_basis(self, d):
        if d > self._degree_cap:
            raise SizeCeilingError(
                self.presentation.label, d, float("inf"), self.size_ceiling
            )
        count = self.monomial_count(d)
        if count > self.size_ceiling:
            raise SizeCeilingError(
                self.presentation.label, d, count, self.size_ceiling
            )
        keys = self._mono_keys(d)
        key_to_col = {k: i for i, k in enumerate(keys)}
        reducer = SpanReducer(count)
        for rdeg, tkeys, tcoeffs in self._prepped:
            if rdeg > d:
                continue
            if reducer.rank == count:
                break
            mult = self._mono_keys(d - rdeg)
            reducer.insert_products(tkeys, tcoeffs, mult, key_to_col)
        pivot_cols = tuple(reducer.pivot_cols())
        echelon = reducer.echelon_rows()
        dimension = count - len(pivot_cols)
        return GradedBasis(self, d, keys, pivot_cols, echelon, dimension)

    def _load_cached_basis(self, d):
        if self.cache is None:
            return None
        payload = self.cache.get(self._basis_cache_key(d))
        if payload is None:
            self.cache_misses += 1
            return None
        self.cache_hits += 1
        keys = self._mono_keys(d)
        if payload["monomial_count"] != len(keys):
            return None  # stale entry from an incompatible enumeration
        echelon = None
        if "echelon" in payload:
            echelon = [
                (lead, cols, [int(c) for c in coeffs])
                for lead, cols, coeffs in payload["echelon"]
            ]
        return GradedBasis(
            self, d, keys, tuple(payload["pivot_cols"]), echelon,
            payload["dimension"],
        )

    def _store_cached_basis(self, basis):
        if self.cache is None:
            return
        include = basis.rank <= self.cache.echelon_row_limit
        self.cache.put(
            self._basis_cache_key(basis.degree),
            basis.to_payload(include_echelon=include),
        )

    def _basis_cache_key(self, d):
        return {
            "kind": "basis",
            "engine": ENGINE_VERSION,
            "presentation": self.presentation.content_hash,
            "degree": d,
        }

    # ----- normal forms and products -----------------------------------

    def _ensure_echelon(self, d):
        """Basis with echelon data, recomputing if the cache was dim-only."""
        basis = self.basis(d)
        if basis.dimension and not basis.has_echelon():
            with self._degree_lock(d):
                basis = self._basis_memo.get(d)
                if not basis.has_echelon():
                    basis = self._compute_basis(d)
                    self._store_cached_basis(basis)
                    self._basis_memo[d] = basis
        return basis

    def _check_poly(self, q):
        genset = self._gen_index
        for m in q.terms:
            for g, _ in m.exps:
                if g not in genset:
                    raise PresentationError(f"monomial uses unknown generator: {m}")

    def normal_form(self, q, degree=None):
        """Coordinates of ``q``'s class in the quotient basis of its degree.

        ``q`` must be homogeneous (the zero polynomial is allowed when
        ``degree`` is given explicitly).  Returns a list of Fractions, one
        per quotient-basis monomial, in column order.
        """
        self._check_poly(q)
        qdeg = q.degree()
        if qdeg is None and degree is None:
            raise ValueError("degree of the zero polynomial is ambiguous")
        if degree is None:
            degree = qdeg
        elif qdeg is not None and qdeg != degree:
            raise ValueError(f"polynomial has degree {qdeg}, expected {degree}")
        key_coeffs = {
            self.monomial_key(m): c for m, c in q.terms.items()
        }
        return self._normal_form_keys(key_coeffs, degree)

    def _normal_form_keys(self, key_coeffs, degree):
        basis = self.basis(degree)
        if basis.dimension == 0:
            return []
        basis = self._ensure_echelon(degree)
        key_to_col = self.key_to_col(degree)
        rref = basis.rref()
        pivot_set = basis.pivot_set()
        out = [Fraction(0)] * basis.dimension
        for key, coeff in key_coeffs.items():
            if not coeff:
                continue
            col = key_to_col.get(key)
            if col is None:
                raise ValueError("monomial key outside degree slice")
            if col in pivot_set:
                cols, coeffs = rref[col]
                lead = coeffs[0]
                for c, v in zip(cols[1:], coeffs[1:]):
                    out[basis.quotient_pos(c)] -= coeff * Fraction(v, lead)
            else:
                out[basis.quotient_pos(col)] += coeff
        return out

    def nf_poly(self, q, degree=None):
        """Normal form of ``q`` as a Poly over quotient-basis monomials."""
        qdeg = q.degree() if degree is None else degree
        if qdeg is None:
            return Poly.zero()
        coords = self.normal_form(q, qdeg)
        basis = self.basis(qdeg)
        return Poly(
            (basis.monomial_at(c), v)
            for c, v in zip(basis.quotient_cols, coords)
            if v
        )

    def multiply(self, u, v):
        """Product of two classes, in normal form.

        Degrees above the socle are handled by a vanishing shortcut: once
        the degree-(socle+1) piece is checked to be zero, every higher
        piece is zero too (the ring is generated in degree one), so no
        gigantic monomial slice is ever enumerated.
        """
        self._check_poly(u)
        self._check_poly(v)
        du, dv = u.degree(), v.degree()
        if du is None or dv is None:
            return Poly.zero()
        target = du + dv
        socle = self.presentation.socle_degree
        if target > socle + 1:
            if self.basis(socle + 1).dimension != 0:
                raise PresentationError(
                    "nonzero piece above the socle; cannot truncate product"
                )
            return Poly.zero()
        return self.nf_poly(u * v, target)

    # ----- socle and pairings -------------------------------------------

    def socle_table(self):
        """Socle evaluation as a linear functional on degree-n columns.

        Returns a list of Fractions, one per degree-``socle`` monomial in
        column order, normalized so the socle monomial maps to 1.  Built
        once by back-substitution over the echelon (descending pivots, so
        every tail column is already evaluated); all socle evaluations and
        Gram entries reduce to lookups in this table.
        """
        if self._socle_table_memo is not None:
            return self._socle_table_memo
        n = self.presentation.socle_degree
        basis = self._ensure_echelon(n)
        if basis.dimension != 1:
            raise SocleError(
                f"socle of {self.presentation.label!r} has dimension "
                f"{basis.dimension}, expected 1"
            )
        lam = [None] * basis.monomial_count
        lam[basis.quotient_cols[0]] = Fraction(1)
        for lead, cols, coeffs in reversed(basis.echelon_rows()):
            acc = 0
            for c, v in zip(cols[1:], coeffs[1:]):
                x = lam[c]
                if x:
                    acc += v * x
            lam[lead] = -acc / coeffs[0] if acc else Fraction(0)
        s_col = self.key_to_col(n)[
            self.monomial_key(self.presentation.socle_monomial)
        ]
        s = lam[s_col]
        if not s:
            raise SocleError(
                f"socle monomial of {self.presentation.label!r} evaluates to zero"
            )
        if s != 1:
            lam = [x / s for x in lam]
        self._socle_table_memo = lam
        return lam

    def socle_coordinate(self):
        """Normal-form coordinate of the socle monomial (must be nonzero)."""
        if self._socle_coord is None:
            n = self.presentation.socle_degree
            self.socle_table()  # validates the socle
            coords = self.normal_form(
                Poly.monomial(self.presentation.socle_monomial), n
            )
            self._socle_coord = coords[0]
        return self._socle_coord

    def socle_eval(self, q):
        """Evaluate a degree-``socle`` class against the socle monomial.

        Normalized so the socle monomial itself evaluates to 1.
        """
        n = self.presentation.socle_degree
        qdeg = q.degree()
        if qdeg is not None and qdeg != n:
            raise ValueError(f"socle evaluation needs degree {n}, got {qdeg}")
        lam = self.socle_table()
        key_to_col = self.key_to_col(n)
        total = Fraction(0)
        for m, c in q.terms.items():
            total += c * lam[key_to_col[self.monomial_key(m)]]
        return total

    def _socle_eval_key(self, key):
        """socle_eval of a single degree-n monomial given by its key."""
        return self.socle_table()[self.key_to_col(self.presentation.socle_degree)[key]]

    def gram_matrix(self, d, rows=None, cols=None):
        """Pairing matrix between degree-``d`` and complementary classes.

        Defaults pair the quotient-basis monomials of degree ``d`` against
        those of degree ``socle - d``.  Entries are socle evaluations of the
        products, as exact rationals.
        """
        n = self.presentation.socle_degree
        if not 0 <= d <= n:
            raise ValueError("degree out of range")
        lam = self.socle_table()  # fails early if the socle is defective
        key_to_col = self.key_to_col(n)
        row_polys = rows
        col_polys = cols
        if row_polys is None:
            row_polys = [Poly.monomial(m) for m in self.basis(d).quotient_basis]
        if col_polys is None:
            col_polys = [
                Poly.monomial(m) for m in self.basis(n - d).quotient_basis
            ]
        row_keys = []
        for i, rp in enumerate(row_polys):
            if rp.degree() not in (None, d):
                raise ValueError(f"row {i} has degree {rp.degree()}, expected {d}")
            row_keys.append([(self.monomial_key(m), c) for m, c in rp.terms.items()])
        col_keys = []
        for j, cp in enumerate(col_polys):
            if cp.degree() not in (None, n - d):
                raise ValueError(
                    f"column {j} has degree {cp.degree()}, expected {n - d}"
                )
            col_keys.append([(self.monomial_key(m), c) for m, c in cp.terms.items()])
        entries = {}
        for i, rterms in enumerate(row_keys):
            for j, cterms in enumerate(col_keys):
                value = Fraction(0)
                for k1, c1 in rterms:
                    for k2, c2 in cterms:
                        v = lam[key_to_col[k1 + k2]]
                        if v:
                            value += c1 * c2 * v
                if value:
                    entries[(i, j)] = value
        return SparseMatrix(len(row_polys), len(col_polys), entries)

    def gram_rank(self, d):
        """Rank of the default Gram pairing at degree ``d`` (cache-aware)."""
        n = self.presentation.socle_degree
        dlo = min(d, n - d)
        hit = self._gram_rank_memo.get(dlo)
        if hit is not None:
            return hit
        cache_key = {
            "kind": "gram-rank",
            "engine": ENGINE_VERSION,
            "presentation": self.presentation.content_hash,
            "degree": dlo,
        }
        if self.cache is not None:
            payload = self.cache.get(cache_key)
            if payload is not None:
                self.cache_hits += 1
                self._gram_rank_memo[dlo] = payload["rank"]
                return payload["rank"]
            self.cache_misses += 1
        rank = _integer_rank(self.gram_matrix(dlo))
        self._gram_rank_memo[dlo] = rank
        if self.cache is not None:
            self.cache.put(cache_key, {"rank": rank})
        return rank

    def hilbert(self, max_degree=None):
        """Dimensions of the graded pieces, degrees 0..max_degree."""
        if max_degree is None:
            max_degree = self.presentation.socle_degree
        return [self.basis(d).dimension for d in range(max_degree + 1)]

    def gorenstein_check(self, jobs=None):
        """Full Gorenstein verification; returns a PairingReport.

        Checks, in order: one-dimensional bottom and socle, vanishing just
        above the socle, a symmetric Hilbert function, and a perfect pairing
        (full-rank Gram matrix) in every complementary pair of degrees.
        """
        jobs = self.jobs if jobs is None else max(1, jobs)
        n = self.presentation.socle_degree
        hilbert = self.hilbert(n)
        above = self.basis(n + 1).dimension
        socle_ok = True
        socle_note = ""
        try:
            self.socle_coordinate()
        except SocleError as exc:
            socle_ok = False
            socle_note = str(exc)
        records = []
        degrees = list(range(0, n // 2 + 1))
        ranks = {}
        if socle_ok:
            if jobs > 1 and len(degrees) > 1:
                with ThreadPoolExecutor(max_workers=jobs) as pool:
                    futures = {d: pool.submit(self.gram_rank, d) for d in degrees}
                    ranks = {d: f.result() for d, f in futures.items()}
            else:
                ranks = {d: self.gram_rank(d) for d in degrees}
        for d in range(n + 1):
            dim = hilbert[d]
            codim = hilbert[n - d]
            rank = ranks.get(min(d, n - d))
            ok = (
                socle_ok
                and dim == codim
                and rank is not None
                and rank == dim
                and rank == codim
            )
            records.append(
                {
                    "degree": d,
                    "dimension": dim,
                    "complement_dimension": codim,
                    "gram_rank": rank,
                    "perfect": bool(ok),
                }
            )
        verdict = (
            socle_ok
            and hilbert[0] == 1
            and hilbert[n] == 1
            and above == 0
            and all(r["perfect"] for r in records)
        )
        return PairingReport(
            label=self.presentation.label,
            socle_degree=n,
            hilbert=hilbert,
            above_socle_dimension=above,
            socle_ok=socle_ok,
            socle_note=socle_note,
            records=records,
            verdict="gorenstein" if verdict else "defective",
        )


@dataclass
class PairingReport:
    """Outcome of a Gorenstein verification run."""

    label: str
    socle_degree: int
    hilbert: list
    above_socle_dimension: int
    socle_ok: bool
    socle_note: str
    records: list = field(default_factory=list)
    verdict: str = "defective"

    @property
    def passed(self):
        return self.verdict == "gorenstein"

    def to_payload(self):
        return {
            "schema": "tautring-pairing-report/1",
            "label": self.label,
            "socle_degree": self.socle_degree,
            "hilbert": list(self.hilbert),
            "above_socle_dimension": self.above_socle_dimension,
            "socle_ok": self.socle_ok,
            "socle_note": self.socle_note,
            "records": [dict(r) for r in self.records],
            "verdict": self.verdict,
        }


def _integer_rank(matrix):
    """Rank of a SparseMatrix via the insertion kernel (rows made integral)."""
    from .linalg import _integer_rows

    reducer = SpanReducer(matrix.cols)
    rows = _integer_rows(matrix)
    rows.sort(key=lambda r: (len(r[0]), r[0], r[1]))
    for cols, coeffs in rows:
        if not cols:
            continue
        if reducer.rank == matrix.cols:
            break
        reducer.insert(list(cols), list(coeffs))
    return reducer.rank


# ----- module-level convenience API -------------------------------------

_RING_REGISTRY = {}
_RING_REGISTRY_LOCK = threading.Lock()


def ring_for(presentation, *, size_ceiling=SIZE_CEILING_DEFAULT, cache=None, jobs=1):
    """Shared GradedRing for a presentation (keyed by content hash).

    Reusing the ring lets separate API calls share memoized bases.  A ring
    is reused only when the ceiling/cache/jobs configuration matches.
    """
    key = (
        presentation.content_hash,
        size_ceiling,
        id(cache) if cache is not None else None,
        jobs,
    )
    with _RING_REGISTRY_LOCK:
        ring = _RING_REGISTRY.get(key)
        if ring is None:
            ring = GradedRing(
                presentation, size_ceiling=size_ceiling, cache=cache, jobs=jobs
            )
            _RING_REGISTRY[key] = ring
        return ring


def build_basis(presentation, degree, **kw):
    return ring_for(presentation, **kw).basis(degree)


def normal_form(presentation, q, degree=None, **kw):
    return ring_for(presentation, **kw).normal_form(q, degree)


def multiply(presentation, u, v, **kw):
    return ring_for(presentation, **kw).multiply(u, v)


def hilbert(presentation, max_degree=None, **kw):
    return ring_for(presentation, **kw).hilbert(max_degree)


def socle_eval(presentation, q, **kw):
    return ring_for(presentation, **kw).socle_eval(q)


def gram_matrix(presentation, degree, rows=None, cols=None, **kw):
    return ring_for(presentation, **kw).gram_matrix(degree, rows, cols)


def gorenstein_check(presentation, **kw):
    return ring_for(presentation, **kw).gorenstein_check()
