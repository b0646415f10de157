"""Hot numeric kernels with selectable backends.

The inner loops of every solve are (a) CSR matrix-vector products with the
stiffness matrix and (b) max-shifted exponential reductions of nodal fields.
Both come in a numba ``@njit`` flavor and a pure-numpy flavor.  Selection is
made once at import time from the environment variable ``DISKCURV_BACKEND``:

* ``auto`` (default): numba if importable, else numpy
* ``numba``: require numba
* ``numpy``: force the vectorized numpy path

``benchmarks/bench_kernels.py`` times the two flavors against each other.
"""

from __future__ import annotations

import os
import warnings

import numpy as np

ENV_VAR = "DISKCURV_BACKEND"


def _requested_backend() -> str:
    raw = os.environ.get(ENV_VAR, "auto").strip().lower() or "auto"
    if raw not in ("auto", "numba", "numpy"):
        raise ValueError(
            f"{ENV_VAR} must be one of 'auto', 'numba', 'numpy'; got {raw!r}"
        )
    return raw


# ----------------------------------------------------------------- numpy ---

def csr_matvec_numpy(data, indices, indptr, x):
    """y = A @ x for CSR arrays (row sums via reduceat; no empty rows)."""
    prod = data * x[indices]
    return np.add.reduceat(prod, indptr[:-1])


def csr_quadform_numpy(data, indices, indptr, x):
    """x . (A @ x) for CSR arrays."""
    return float(np.dot(x, csr_matvec_numpy(data, indices, indptr, x)))


def exp_weighted_numpy(weights, coeff, u, scale):
    """Terms w_i * c_i * exp(scale*u_i - m) with m = max(scale*u).

    Returns ``(terms, total, m)``.  The true integral is ``exp(m) * total``
    and its log is ``m + log(total)``; the shift keeps every evaluated
    exponent <= 0 so concentrated fields cannot overflow.
    """
    su = scale * u
    m = float(np.max(su))
    terms = weights * coeff * np.exp(su - m)
    return terms, float(np.sum(terms)), m


# ----------------------------------------------------------------- numba ---

_REQUESTED = _requested_backend()
_HAVE_NUMBA = False
if _REQUESTED != "numpy":
    try:
        from numba import njit

        _HAVE_NUMBA = True
    except ImportError:
        if _REQUESTED == "numba":
            raise
        warnings.warn("numba not importable; falling back to numpy kernels")

if _HAVE_NUMBA:

    @njit(cache=True)
    def csr_matvec_numba(data, indices, indptr, x):
        n = indptr.shape[0] - 1
        y = np.empty(n, dtype=np.float64)
        for i in range(n):
            acc = 0.0
            for p in range(indptr[i], indptr[i + 1]):
                acc += data[p] * x[indices[p]]
            y[i] = acc
        return y

    @njit(cache=True)
    def csr_quadform_numba(data, indices, indptr, x):
        n = indptr.shape[0] - 1
        total = 0.0
        for i in range(n):
            acc = 0.0
            for p in range(indptr[i], indptr[i + 1]):
                acc += data[p] * x[indices[p]]
            total += x[i] * acc
        return total

    @njit(cache=True)
    def exp_weighted_numba(weights, coeff, u, scale):
        n = u.shape[0]
        m = scale * u[0]
        for i in range(1, n):
            su = scale * u[i]
            if su > m:
                m = su
        terms = np.empty(n, dtype=np.float64)
        total = 0.0
        for i in range(n):
            t = weights[i] * coeff[i] * np.exp(scale * u[i] - m)
            terms[i] = t
            total += t
        return terms, total, m


ACTIVE_BACKEND = "numba" if _HAVE_NUMBA else "numpy"

if _HAVE_NUMBA:
    csr_matvec = csr_matvec_numba
    csr_quadform = csr_quadform_numba
    exp_weighted = exp_weighted_numba
else:
    csr_matvec = csr_matvec_numpy
    csr_quadform = csr_quadform_numpy
    exp_weighted = exp_weighted_numpy
