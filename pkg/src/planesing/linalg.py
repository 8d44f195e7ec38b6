"""Exact linear algebra over CoeffField: spans, kernels, quotients.

Vectors are sparse dicts {key: FieldElem} with mutually comparable keys.
Prime-field systems are densified to int64 matrices and row-reduced by the
compiled kernel (numpy fallback otherwise); everything else runs through a
generic object-level echelon.
"""

from __future__ import annotations

import numpy as np

from ._kernel import rref_inplace
from .errors import UnstableTruncation


class Echelon:
    """Incremental echelon form over arbitrary sortable keys."""

    def __init__(self, field):
        self.field = field
        self.rows = {}  # pivot key -> normalized dict vector

    @property
    def rank(self):
        return len(self.rows)

    def reduce(self, vec):
        """Residual of vec after eliminating all current pivots."""
        vec = {k: v for k, v in vec.items() if not v.is_zero()}
        # rows are kept fully reduced, so each elimination only introduces
        # non-pivot keys; the loop runs at most rank times
        while True:
            hit = None
            for k in vec:
                if k in self.rows:
                    hit = k
                    break
            if hit is None:
                return vec
            c = vec[hit]
            row = self.rows[hit]
            for k, rv in row.items():
                nv = vec.get(k, self.field.zero) - c * rv
                if nv.is_zero():
                    vec.pop(k, None)
                else:
                    vec[k] = nv

    def add(self, vec):
        """Insert vec; return True if it enlarged the span."""
        res = self.reduce(vec)
        if not res:
            return False
        pivot = min(res.keys())
        inv = res[pivot].inverse()
        self.rows[pivot] = {k: v * inv for k, v in res.items()}
        # keep reduced form: eliminate the new pivot from existing rows
        new_row = self.rows[pivot]
        for pk, row in list(self.rows.items()):
            if pk == pivot:
                continue
            c = row.get(pivot)
            if c is None or c.is_zero():
                continue
            upd = dict(row)
            for k, rv in new_row.items():
                nv = upd.get(k, self.field.zero) - c * rv
                if nv.is_zero():
                    upd.pop(k, None)
                else:
                    upd[k] = nv
            self.rows[pk] = upd
        return True

    def contains(self, vec):
        return not self.reduce(vec)


def span_dim(vectors, field):
    ech = Echelon(field)
    for v in vectors:
        ech.add(v)
    return ech.rank


def span_quotient_dim_raw(V, W, field):
    """dim span(V + W) - dim span(W); requires nothing about containment."""
    ech = Echelon(field)
    for w in W:
        ech.add(w)
    base = ech.rank
    for v in V:
        ech.add(v)
    return ech.rank - base


def densify(vectors, keys=None):
    """Stack sparse vectors into an int64 matrix (prime-field values)."""
    if keys is None:
        keyset = set()
        for v in vectors:
            keyset.update(v.keys())
        keys = sorted(keyset)
    index = {k: i for i, k in enumerate(keys)}
    mat = np.zeros((len(vectors), len(keys)), dtype=np.int64)
    for i, v in enumerate(vectors):
        for k, c in v.items():
            mat[i, index[k]] = c.value[0]
    return mat, keys


def _dense_rank(vectors, field, keys=None):
    if not vectors:
        return 0
    mat, _ = densify(vectors, keys)
    pivots = np.full(min(mat.shape), -1, dtype=np.int64)
    return int(rref_inplace(mat, field.characteristic, pivots))


def fast_span_quotient_dim(V, W, field):
    """Prime-field fast path for span_quotient_dim_raw."""
    keyset = set()
    for v in V:
        keyset.update(v.keys())
    for w in W:
        keyset.update(w.keys())
    keys = sorted(keyset)
    rw = _dense_rank(list(W), field, keys)
    rvw = _dense_rank(list(W) + list(V), field, keys)
    return rvw - rw


def span_quotient_dim(V, W, field):
    if field.is_prime_field:
        return fast_span_quotient_dim(V, W, field)
    return span_quotient_dim_raw(V, W, field)


def kernel_basis(rows, nunknowns, field):
    """Solution basis of the homogeneous system given by constraint rows.

    Each row is a sparse dict {unknown_index: coeff}.  Returns a list of
    sparse solution vectors forming a basis of the kernel.
    """
    rows = [r for r in rows if r]
    if field.is_prime_field and nunknowns:
        p = field.characteristic
        mat = np.zeros((max(len(rows), 1), nunknowns), dtype=np.int64)
        for i, r in enumerate(rows):
            for j, c in r.items():
                mat[i, j] = c.value[0]
        pivots = np.full(min(mat.shape), -1, dtype=np.int64)
        rank = int(rref_inplace(mat, p, pivots))
        pivset = set(int(c) for c in pivots[:rank])
        free = [j for j in range(nunknowns) if j not in pivset]
        basis = []
        for f in free:
            vec = {f: field.one}
            for i in range(rank):
                c = int(mat[i, f]) % p
                if c:
                    vec[int(pivots[i])] = field.el(-c)
            basis.append(vec)
        return basis
    # generic object elimination
    ech = Echelon(field)
    for r in rows:
        ech.add(dict(r))
    pivots = set(ech.rows.keys())
    free = [j for j in range(nunknowns) if j not in pivots]
    basis = []
    for f in free:
        vec = {f: field.one}
        for pk, row in ech.rows.items():
            c = row.get(f)
            if c is not None and not c.is_zero():
                vec[pk] = -c
        basis.append(vec)
    return basis


def span_intersection(A, B, field):
    """Basis of span(A) ∩ span(B) (lists of sparse vectors)."""
    A = [a for a in A if a]
    B = [b for b in B if b]
    if not A or not B:
        return []
    # kernel of (lam, mu) -> sum lam_i A_i - sum mu_j B_j
    keyset = set()
    for v in A + B:
        keyset.update(v.keys())
    keys = sorted(keyset)
    kidx = {k: i for i, k in enumerate(keys)}
    rows_by_key = [dict() for _ in keys]
    n = len(A) + len(B)
    for i, v in enumerate(A):
        for k, c in v.items():
            rows_by_key[kidx[k]][i] = c
    for j, v in enumerate(B):
        for k, c in v.items():
            rows_by_key[kidx[k]][len(A) + j] = -c
    sols = kernel_basis(rows_by_key, n, field)
    out = []
    for s in sols:
        vec = {}
        for i, lam in s.items():
            if i >= len(A) or lam.is_zero():
                continue
            for k, c in A[i].items():
                nv = vec.get(k, field.zero) + lam * c
                if nv.is_zero():
                    vec.pop(k, None)
                else:
                    vec[k] = nv
        if vec:
            out.append(vec)
    return out


def combine(vecs, coeffs, field):
    out = {}
    for v, c in zip(vecs, coeffs):
        if c.is_zero():
            continue
        for k, x in v.items():
            nv = out.get(k, field.zero) + c * x
            if nv.is_zero():
                out.pop(k, None)
            else:
                out[k] = nv
    return out


def certified(builder, trunc, bump=8):
    """Run builder at trunc and trunc+bump; raise if the values disagree."""
    first = builder(trunc)
    second = builder(trunc + bump)
    if first != second:
        raise UnstableTruncation(
            "value changed between truncation %d and %d: %r vs %r"
            % (trunc, trunc + bump, first, second))
    return first
