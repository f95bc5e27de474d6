"""Exhaustive enumeration of sign sequences.

For a finite nonnegative sequence ``a`` of length ``n`` every
``b in {-1, 0, 1}^n`` is visited in lexicographic order (code ``c`` has
base-3 digits ``b_i + 1``, most significant first).  For each ``b`` the
kernel records the index ``#{b_i = 0, a_i > 0} - #{b_i != 0, a_i = 0}``
and the objective ``sum (a_i - b_i)^2``.

The objective is summed sequentially over the terms sorted ascending, so
its value depends only on the multiset of terms.  Both backends follow
that order and agree bit for bit.
"""

import numpy as np

from . import _jit


@_jit.njit(cache=True)
def _enumerate_numba(a):
    n = a.shape[0]
    total = 3 ** n
    values = np.empty(total)
    index = np.empty(total, np.int64)
    b = np.empty(n, np.int64)
    terms = np.empty(n)
    for code in range(total):
        c = code
        for i in range(n - 1, -1, -1):
            b[i] = c % 3 - 1
            c //= 3
        j = 0
        for i in range(n):
            if b[i] == 0 and a[i] > 0:
                j += 1
            elif b[i] != 0 and a[i] == 0:
                j -= 1
            diff = a[i] - b[i]
            t = diff * diff
            # insertion sort: n <= 12, cheaper than a library sort call
            m = i
            while m > 0 and terms[m - 1] > t:
                terms[m] = terms[m - 1]
                m -= 1
            terms[m] = t
        acc = 0.0
        for i in range(n):
            acc += terms[i]
        values[code] = acc
        index[code] = j
    return values, index


def decode(codes, n: int) -> np.ndarray:
    """Sign sequences for enumeration codes, one row per code."""
    codes = np.asarray(codes, dtype=np.int64)
    powers = 3 ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return (codes[:, None] // powers) % 3 - 1


def _enumerate_numpy(a):
    n = a.shape[0]
    b = decode(np.arange(3 ** n), n)
    pos = a > 0
    index = np.sum((b == 0) & pos, axis=1) - np.sum((b != 0) & ~pos, axis=1)
    diff = a - b
    terms = diff * diff
    terms.sort(axis=1)
    if n == 0:
        values = np.zeros(1)
    else:
        values = np.cumsum(terms, axis=1)[:, -1]
    return values, index.astype(np.int64)


def enumerate_signs(a, backend: str | None = None):
    """Objective values and indices for all ``3^n`` sign sequences."""
    a = np.ascontiguousarray(a, dtype=np.float64)
    backend = backend or _jit.backend()
    if backend == "numba":
        return _enumerate_numba(a)
    return _enumerate_numpy(a)
