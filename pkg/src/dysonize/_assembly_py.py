"""Numpy fallback for the compiled scatter kernels in ``_assembly.pyx``.

Same contract: add ``coeff * (I x .. x A_i x .. x B_j x .. x I)`` into ``H`` in place.
"""

import numpy as np


def _stride(dims, site):
    return int(np.prod(dims[site + 1:], dtype=np.int64))


def accumulate_one(H, dims, site, A, coeff):
    D = H.shape[0]
    d, st = int(dims[site]), _stride(dims, site)
    cols = np.arange(D)
    q = (cols // st) % d
    base = cols - q * st
    for p, qq in zip(*np.nonzero(A)):
        sel = q == qq
        H[base[sel] + p * st, cols[sel]] += coeff * A[p, qq]


def accumulate_two(H, dims, i, A, j, B, coeff):
    if i == j:
        raise ValueError("two-site term needs distinct sites; multiply same-site factors first")
    D = H.shape[0]
    di, dj = int(dims[i]), int(dims[j])
    si, sj = _stride(dims, i), _stride(dims, j)
    cols = np.arange(D)
    qi = (cols // si) % di
    qj = (cols // sj) % dj
    base = cols - qi * si - qj * sj
    nz_a = list(zip(*np.nonzero(A)))
    nz_b = list(zip(*np.nonzero(B)))
    for p, q in nz_a:
        sel_a = qi == q
        for r, t in nz_b:
            sel = sel_a & (qj == t)
            H[base[sel] + p * si + r * sj, cols[sel]] += coeff * A[p, q] * B[r, t]
