"""Backend dispatch for the hot numerical kernels.

The compiled Cython extension is preferred when available; otherwise the
numpy/LAPACK fallback in :mod:`pykernels` is used.  ``set_backend`` switches
explicitly (used by tests and the benchmark to compare both paths).
"""

from . import pykernels

try:
    from . import _ckernels
except ImportError:
    _ckernels = None

_BACKENDS = {"python": pykernels}
if _ckernels is not None:
    _BACKENDS["compiled"] = _ckernels

_active = _BACKENDS.get("compiled", pykernels)


def have_compiled() -> bool:
    return _ckernels is not None

def backend_name() -> str:
    return "compiled" if _active is _ckernels else "python"

def set_backend(name: str) -> None:
    """Select 'compiled' or 'python'; raises if the backend is unavailable."""
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"backend {name!r} not available (have: {sorted(_BACKENDS)})")
    _active = _BACKENDS[name]

def tridiag_factor(dl, d, du):
    return _active.tridiag_factor(dl, d, du)

def tridiag_solve(fact, b):
    return _active.tridiag_solve(fact, b)

def tridiag_matvec(dl, d, du, x):
    return _active.tridiag_matvec(dl, d, du, x)

def cheb_apply(dl, d, du, coeffs, u, lo, hi):
    return _active.cheb_apply(dl, d, du, coeffs, u, lo, hi)

def cn_steps(fact, bdl, bd, bdu, u, nsteps):
    return _active.cn_steps(fact, bdl, bd, bdu, u, nsteps)
