# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: complex tridiagonal LU, matvec, Chebyshev recurrence,
Crank-Nicolson stepping.  API mirrors ``pykernels``; the LU uses the LAPACK
gttrf/gttrs layout (1-based ipiv, du2 superdiagonal) so factorizations are
interchangeable between backends.
"""

import numpy as np

cimport numpy as cnp

from ..errors import SolverError

cnp.import_array()

ctypedef double complex zcomplex


cdef inline double cabs1(zcomplex z) noexcept:
    return abs(z.real) + abs(z.imag)


def tridiag_factor(dl, d, du):
    """LU-factorize a complex tridiagonal matrix with partial pivoting."""
    cdef cnp.ndarray[zcomplex, ndim=1] fdl = np.array(dl, dtype=np.complex128)
    cdef cnp.ndarray[zcomplex, ndim=1] fd = np.array(d, dtype=np.complex128)
    cdef cnp.ndarray[zcomplex, ndim=1] fdu = np.array(du, dtype=np.complex128)
    cdef Py_ssize_t n = fd.shape[0]
    cdef cnp.ndarray[zcomplex, ndim=1] du2 = np.zeros(max(n - 2, 0), dtype=np.complex128)
    cdef cnp.ndarray[int, ndim=1] ipiv = np.zeros(n, dtype=np.intc)
    cdef Py_ssize_t i
    cdef zcomplex fact, temp
    cdef Py_ssize_t sing = -1

    for i in range(n - 1):
        if cabs1(fd[i]) >= cabs1(fdl[i]):
            ipiv[i] = <int>(i + 1)
            if cabs1(fd[i]) != 0.0:
                fact = fdl[i] / fd[i]
                fdl[i] = fact
                fd[i + 1] = fd[i + 1] - fact * fdu[i]
            if i < n - 2:
                du2[i] = 0.0
        else:
            fact = fd[i] / fdl[i]
            fd[i] = fdl[i]
            fdl[i] = fact
            temp = fdu[i]
            fdu[i] = fd[i + 1]
            fd[i + 1] = temp - fact * fd[i + 1]
            if i < n - 2:
                du2[i] = fdu[i + 1]
                fdu[i + 1] = -fact * fdu[i + 1]
            ipiv[i] = <int>(i + 2)
    if n > 0:
        ipiv[n - 1] = <int>n
    for i in range(n):
        if cabs1(fd[i]) == 0.0:
            sing = i
            break
    if sing >= 0:
        raise SolverError(f"singular pivot in tridiagonal LU (info={sing + 1})")
    return (fdl, fd, fdu, du2, ipiv)


cdef void _solve_inplace(zcomplex[::1] fdl, zcomplex[::1] fd, zcomplex[::1] fdu,
                         zcomplex[::1] du2, int[::1] ipiv, zcomplex[::1] x) noexcept:
    cdef Py_ssize_t n = fd.shape[0]
    cdef Py_ssize_t i
    cdef zcomplex temp
    for i in range(n - 1):
        if ipiv[i] == i + 1:
            x[i + 1] = x[i + 1] - fdl[i] * x[i]
        else:
            temp = x[i]
            x[i] = x[i + 1]
            x[i + 1] = temp - fdl[i] * x[i]
    x[n - 1] = x[n - 1] / fd[n - 1]
    if n > 1:
        x[n - 2] = (x[n - 2] - fdu[n - 2] * x[n - 1]) / fd[n - 2]
    for i in range(n - 3, -1, -1):
        x[i] = (x[i] - fdu[i] * x[i + 1] - du2[i] * x[i + 2]) / fd[i]


def tridiag_solve(fact, b):
    """Solve A x = b given a factorization from :func:`tridiag_factor`."""
    fdl, fd, fdu, du2, ipiv = fact
    cdef cnp.ndarray[zcomplex, ndim=1] x = np.array(b, dtype=np.complex128)
    _solve_inplace(fdl, fd, fdu, du2, ipiv, x)
    return x


cdef void _matvec(zcomplex[::1] dl, zcomplex[::1] d, zcomplex[::1] du,
                  zcomplex[::1] x, zcomplex[::1] out) noexcept:
    cdef Py_ssize_t n = d.shape[0]
    cdef Py_ssize_t j
    if n == 1:
        out[0] = d[0] * x[0]
        return
    out[0] = d[0] * x[0] + du[0] * x[1]
    for j in range(1, n - 1):
        out[j] = dl[j - 1] * x[j - 1] + d[j] * x[j] + du[j] * x[j + 1]
    out[n - 1] = dl[n - 2] * x[n - 2] + d[n - 1] * x[n - 1]


def tridiag_matvec(dl, d, du, x):
    """y = T x for tridiagonal T with diagonals (dl, d, du)."""
    cdef cnp.ndarray[zcomplex, ndim=1] dlc = np.ascontiguousarray(dl, dtype=np.complex128)
    cdef cnp.ndarray[zcomplex, ndim=1] dc = np.ascontiguousarray(d, dtype=np.complex128)
    cdef cnp.ndarray[zcomplex, ndim=1] duc = np.ascontiguousarray(du, dtype=np.complex128)
    cdef cnp.ndarray[zcomplex, ndim=1] xc = np.ascontiguousarray(x, dtype=np.complex128)
    cdef cnp.ndarray[zcomplex, ndim=1] y = np.empty_like(xc)
    _matvec(dlc, dc, duc, xc, y)
    return y


def cheb_apply(dl, d, du, coeffs, u, double lo, double hi):
    """Evaluate sum_k coeffs[k] T_k(S) u by the three-term recurrence."""
    cdef cnp.ndarray[zcomplex, ndim=1] dlc = np.ascontiguousarray(dl, dtype=np.complex128)
    cdef cnp.ndarray[zcomplex, ndim=1] dc = np.ascontiguousarray(d, dtype=np.complex128)
    cdef cnp.ndarray[zcomplex, ndim=1] duc = np.ascontiguousarray(du, dtype=np.complex128)
    cdef cnp.ndarray[double, ndim=1] cs = np.ascontiguousarray(coeffs, dtype=np.float64)
    cdef cnp.ndarray[zcomplex, ndim=1] t_prev = np.array(u, dtype=np.complex128)
    cdef Py_ssize_t n = t_prev.shape[0]
    cdef Py_ssize_t ncoef = cs.shape[0]
    cdef double alpha = 2.0 / (hi - lo)
    cdef double beta = -(hi + lo) / (hi - lo)
    cdef cnp.ndarray[zcomplex, ndim=1] y = np.empty(n, dtype=np.complex128)
    cdef cnp.ndarray[zcomplex, ndim=1] t_cur = np.empty(n, dtype=np.complex128)
    cdef cnp.ndarray[zcomplex, ndim=1] t_next = np.empty(n, dtype=np.complex128)
    cdef cnp.ndarray[zcomplex, ndim=1] work = np.empty(n, dtype=np.complex128)
    cdef Py_ssize_t j, k
    for j in range(n):
        y[j] = cs[0] * t_prev[j]
    if ncoef == 1:
        return y
    _matvec(dlc, dc, duc, t_prev, work)
    for j in range(n):
        t_cur[j] = alpha * work[j] + beta * t_prev[j]
        y[j] = y[j] + cs[1] * t_cur[j]
    for k in range(2, ncoef):
        _matvec(dlc, dc, duc, t_cur, work)
        for j in range(n):
            t_next[j] = 2.0 * (alpha * work[j] + beta * t_cur[j]) - t_prev[j]
            y[j] = y[j] + cs[k] * t_next[j]
        t_prev, t_cur, t_next = t_cur, t_next, t_prev
    return y


def cn_steps(fact, bdl, bd, bdu, u, Py_ssize_t nsteps):
    """Apply nsteps of u <- A^{-1} (B u) with prefactored A and tridiagonal B."""
    fdl, fd, fdu, du2, ipiv = fact
    cdef cnp.ndarray[zcomplex, ndim=1] bdlc = np.ascontiguousarray(bdl, dtype=np.complex128)
    cdef cnp.ndarray[zcomplex, ndim=1] bdc = np.ascontiguousarray(bd, dtype=np.complex128)
    cdef cnp.ndarray[zcomplex, ndim=1] bduc = np.ascontiguousarray(bdu, dtype=np.complex128)
    cdef cnp.ndarray[zcomplex, ndim=1] v = np.array(u, dtype=np.complex128)
    cdef cnp.ndarray[zcomplex, ndim=1] w = np.empty_like(v)
    cdef zcomplex[::1] fdlv = fdl
    cdef zcomplex[::1] fdv = fd
    cdef zcomplex[::1] fduv = fdu
    cdef zcomplex[::1] du2v = du2
    cdef int[::1] ipivv = ipiv
    cdef Py_ssize_t s
    for s in range(nsteps):
        _matvec(bdlc, bdc, bduc, v, w)
        _solve_inplace(fdlv, fdv, fduv, du2v, ipivv, w)
        v, w = w, v
    return v
