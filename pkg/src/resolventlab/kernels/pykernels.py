"""Pure-Python (numpy/LAPACK) implementations of the hot kernels.

Mirrors the API of the compiled extension ``_ckernels``; selected as a
fallback when the extension is not built.  The tridiagonal LU follows the
LAPACK ``gttrf``/``gttrs`` layout (partial pivoting, second superdiagonal
``du2``), so factorizations are interchangeable between backends.
"""

import numpy as np
from scipy.linalg import lapack

from ..errors import SolverError


def _cabs1(z):
    return abs(z.real) + abs(z.imag)


def _gttrf_tiny(dl, d, du):
    # n <= 2: the f2py gttrf wrapper rejects these sizes; same layout as LAPACK
    n = d.size
    fdl, fd, fdu = dl.copy(), d.copy(), du.copy()
    du2 = np.zeros(max(n - 2, 0), complex)
    ipiv = np.zeros(n, dtype=np.int32)
    for i in range(n - 1):
        if _cabs1(fd[i]) >= _cabs1(fdl[i]):
            ipiv[i] = i + 1
            if _cabs1(fd[i]) != 0.0:
                mult = fdl[i] / fd[i]
                fdl[i] = mult
                fd[i + 1] -= mult * fdu[i]
        else:
            mult = fd[i] / fdl[i]
            fd[i] = fdl[i]
            fdl[i] = mult
            fdu[i], fd[i + 1] = fd[i + 1], fdu[i] - mult * fd[i + 1]
            ipiv[i] = i + 2
    if n:
        ipiv[n - 1] = n
    if np.any(fd == 0.0):
        raise SolverError("singular pivot in tridiagonal LU")
    return (fdl, fd, fdu, du2, ipiv)


def _gttrs_tiny(fact, b):
    fdl, fd, fdu, du2, ipiv = fact
    n = fd.size
    x = np.array(b, dtype=np.complex128)
    for i in range(n - 1):
        if ipiv[i] == i + 1:
            x[i + 1] -= fdl[i] * x[i]
        else:
            x[i], x[i + 1] = x[i + 1], x[i] - fdl[i] * x[i + 1]
    x[n - 1] /= fd[n - 1]
    if n > 1:
        x[n - 2] = (x[n - 2] - fdu[n - 2] * x[n - 1]) / fd[n - 2]
    return x


def tridiag_factor(dl, d, du):
    """LU-factorize a complex tridiagonal matrix with partial pivoting.

    Returns an opaque factorization tuple consumed by :func:`tridiag_solve`.
    Raises SolverError on an exactly singular pivot.
    """
    dl = np.ascontiguousarray(dl, dtype=np.complex128)
    d = np.ascontiguousarray(d, dtype=np.complex128)
    du = np.ascontiguousarray(du, dtype=np.complex128)
    if d.size <= 2:
        return _gttrf_tiny(dl, d, du)
    fdl, fd, fdu, du2, ipiv, info = lapack.zgttrf(dl, d, du)
    if info != 0:
        raise SolverError(f"singular pivot in tridiagonal LU (info={info})")
    return (fdl, fd, fdu, du2, ipiv)

def tridiag_solve(fact, b):
    """Solve A x = b given a factorization from :func:`tridiag_factor`."""
    fdl, fd, fdu, du2, ipiv = fact
    if fd.size <= 2:
        return _gttrs_tiny(fact, b)
    x, info = lapack.zgttrs(fdl, fd, fdu, du2, ipiv, b, overwrite_b=0)
    if info != 0:
        raise SolverError(f"tridiagonal solve failed (info={info})")
    return x

def tridiag_matvec(dl, d, du, x):
    """y = T x for tridiagonal T with diagonals (dl, d, du)."""
    y = d * x
    y[:-1] += du * x[1:]
    y[1:] += dl * x[:-1]
    return y

def cheb_apply(dl, d, du, coeffs, u, lo, hi):
    """Evaluate sum_k coeffs[k] T_k(S) u by the three-term recurrence.

    S is the tridiagonal operator affinely mapped from [lo, hi] to [-1, 1].
    """
    alpha = 2.0 / (hi - lo)
    beta = -(hi + lo) / (hi - lo)

    def smap(v):
        return alpha * tridiag_matvec(dl, d, du, v) + beta * v

    t_prev = u.astype(np.complex128, copy=True)
    y = coeffs[0] * t_prev
    if len(coeffs) == 1:
        return y
    t_cur = smap(t_prev)
    y = y + coeffs[1] * t_cur
    for c in coeffs[2:]:
        t_next = 2.0 * smap(t_cur) - t_prev
        y += c * t_next
        t_prev, t_cur = t_cur, t_next
    return y

def cn_steps(fact, bdl, bd, bdu, u, nsteps):
    """Apply nsteps of u <- A^{-1} (B u) with prefactored A and tridiagonal B."""
    v = np.asarray(u, dtype=np.complex128)
    for _ in range(nsteps):
        v = tridiag_solve(fact, tridiag_matvec(bdl, bd, bdu, v))
    return v
