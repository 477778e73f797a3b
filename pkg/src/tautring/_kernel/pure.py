"""Pure-Python reference implementation of the row-reduction kernel.

The compiled extension in ``_speedups.pyx`` mirrors this module line for
line; any change here must be replicated there (the test suite checks that
both backends produce identical echelon data on random inputs).
"""

import itertools
from math import gcd


def degree_keys(gen_keys, degree):
    """All degree-``degree`` monomial keys over the given generator keys.

    ``gen_keys[g]`` is the packed-integer key of generator ``g``; a monomial
    key is the sum of its factors' keys.  Keys are listed in the order
    produced by ``itertools.combinations_with_replacement`` on generator
    indices, i.e. descending lexicographic order on exponent vectors.  This
    order is load-bearing: column indices everywhere in the engine are
    positions in this list.
    """
    if degree == 0:
        return [0]
    out = []
    append = out.append
    for combo in itertools.combinations_with_replacement(gen_keys, degree):
        append(sum(combo))
    return out


def _normalize(coeffs):
    """Divide a coefficient list by its content, making the lead positive."""
    g = 0
    for c in coeffs:
        g = gcd(g, c)
        if g == 1:
            break
    if coeffs[0] < 0:
        g = -g
    if g != 1:
        for i in range(len(coeffs)):
            coeffs[i] //= g


class SpanReducer:
    """Incremental exact echelonization of integer rows.

    Rows are inserted one at a time and reduced against the pivot rows
    accumulated so far, using fraction-free elimination (cross-multiply,
    subtract, strip content).  Stored pivot rows are content-free with a
    positive leading coefficient, so the internal state is a deterministic
    function of the multiset of inserted rows' span -- insertion order only
    affects which echelon basis is found, never the pivot columns or rank.
    """

    def __init__(self, ncols):
        self.ncols = ncols
        self.rank = 0
        self._pivots = {}  # leading column -> (cols, coeffs)

    def insert(self, cols, coeffs):
        """Reduce one row; adopt it as a pivot row if independent.

        ``cols`` must be strictly increasing and ``coeffs`` nonzero integers
        of the same length.  Both lists are consumed (the reducer may keep or
        mutate them).  Returns the new pivot column, or -1 when the row lies
        in the current span.
        """
        pivots = self._pivots
        while cols:
            lead = cols[0]
            hit = pivots.get(lead)
            if hit is None:
                _normalize(coeffs)
                pivots[lead] = (cols, coeffs)
                self.rank += 1
                return lead
            cols, coeffs = _combine(cols, coeffs, hit[0], hit[1])
        return -1

    def insert_products(self, term_keys, term_coeffs, mult_keys, key_to_col):
        """Insert the rows of one relation times a batch of monomials.

        ``term_keys``/``term_coeffs`` describe the relation, presorted so
        that the translated columns come out strictly increasing (monomial
        keys are translation-invariant under the column order).  One row is
        inserted per key in ``mult_keys``; the loop stops early once the span
        is the full column space, which no further row can enlarge.
        """
        ncols = self.ncols
        for mk in mult_keys:
            if self.rank == ncols:
                return
            cols = [key_to_col[tk + mk] for tk in term_keys]
            self.insert(cols, list(term_coeffs))

    def pivot_cols(self):
        """Sorted list of pivot column indices."""
        return sorted(self._pivots)

    def echelon_rows(self):
        """Echelon rows as ``(lead, cols, coeffs)``, sorted by lead column.

        The returned lists are the reducer's own; callers must not mutate
        them.
        """
        return [
            (lead, row[0], row[1]) for lead, row in sorted(self._pivots.items())
        ]


def _combine(rcols, rcoeffs, pcols, pcoeffs):
    """Return ``a*row - b*pivot`` with the shared leading column cancelled.

    ``a = plead/g`` and ``b = rlead/g`` for ``g = gcd(rlead, plead)``; the
    result is stripped of content.  Assumes both rows share their leading
    column.
    """
    rlead = rcoeffs[0]
    plead = pcoeffs[0]
    g = gcd(rlead, plead)
    a = plead // g
    b = rlead // g
    nr = len(rcols)
    np_ = len(pcols)
    out_cols = []
    out_coeffs = []
    i = 1
    j = 1
    content = 0
    while i < nr and j < np_:
        ci = rcols[i]
        cj = pcols[j]
        if ci == cj:
            v = a * rcoeffs[i] - b * pcoeffs[j]
            i += 1
            j += 1
            if v == 0:
                continue
            col = ci
        elif ci < cj:
            v = a * rcoeffs[i]
            i += 1
            col = ci
        else:
            v = -b * pcoeffs[j]
            j += 1
            col = cj
        out_cols.append(col)
        out_coeffs.append(v)
        content = gcd(content, v)
    while i < nr:
        v = a * rcoeffs[i]
        out_cols.append(rcols[i])
        out_coeffs.append(v)
        content = gcd(content, v)
        i += 1
    while j < np_:
        v = -b * pcoeffs[j]
        out_cols.append(pcols[j])
        out_coeffs.append(v)
        content = gcd(content, v)
        j += 1
    if content > 1:
        for k in range(len(out_coeffs)):
            out_coeffs[k] //= content
    return out_cols, out_coeffs
