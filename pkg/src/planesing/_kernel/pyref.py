"""Pure-Python (numpy vectorised) fallback for the compiled RREF kernel."""

import numpy as np


def rref_inplace(a, p, pivots):
    """Reduce `a` to RREF mod p in place; fill pivot columns; return rank."""
    nrows, ncols = a.shape
    r = 0
    for col in range(ncols):
        if r >= nrows:
            break
        rows = np.nonzero(a[r:, col] % p)[0]
        if rows.size == 0:
            continue
        piv = r + int(rows[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        inv = pow(int(a[r, col]) % p, p - 2, p)
        a[r, col:] = (a[r, col:] * inv) % p
        colvals = a[:, col].copy()
        colvals[r] = 0
        nz = np.nonzero(colvals % p)[0]
        if nz.size:
            a[nz, col:] = (a[nz, col:] - np.outer(colvals[nz] % p, a[r, col:])) % p
        pivots[r] = col
        r += 1
    return r
