"""1D grid discretization of P = -h^2 Laplacian + V with Dirichlet walls.

Provides the cutoff multiplier chi, the smooth energy filter phi(P) via a
Chebyshev expansion (dense eigendecomposition as an oracle path), a quartic
complex absorbing ramp, unitary Crank-Nicolson propagation of the
self-adjoint P, and Gaussian coherent states.

Wavefunctions are plain complex arrays on the interior nodes with the norm
convention ||u||^2 = dx * sum |u_j|^2.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.fft import dct
from scipy.integrate import quad
from scipy.linalg import eigh_tridiagonal

from . import kernels
from .errors import ConfigurationError, FilterDegreeError
from .potentials import PotentialSpec, eval_potential

MAX_DENSE_N = 2000
_FILTER_MESH = 4096
_MAX_CHEB_DEGREE = 32768


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid of N interior points on [-L, L], Dirichlet walls at +-L.

    Construction enforces the sampling rule
    dx <= (2 pi h / sqrt(e_max)) / points_per_wavelength with ppw >= 8, so
    oscillations at the top of the studied energy window stay resolved.
    """

    L: float
    N: int
    h: float
    e_max: float
    ppw: float = 8.0

    def __post_init__(self):
        if self.L <= 0 or self.h <= 0 or self.e_max <= 0:
            raise ConfigurationError("L, h and e_max must be positive")
        if self.ppw < 8:
            raise ConfigurationError("points_per_wavelength must be >= 8")
        if self.N < 16:
            raise ConfigurationError("N must be >= 16")
        dx_max = 2.0 * math.pi * self.h / (math.sqrt(self.e_max) * self.ppw)
        if self.dx > dx_max:
            raise ConfigurationError(
                f"grid too coarse: dx = {self.dx:.4e} > {dx_max:.4e}; "
                f"need N >= {self.min_points(self.L, self.h, self.e_max, self.ppw)}")

    @staticmethod
    def min_points(L, h, e_max, ppw=8.0):
        dx_max = 2.0 * math.pi * h / (math.sqrt(e_max) * ppw)
        return max(16, math.ceil(2.0 * L / dx_max) - 1)

    @classmethod
    def with_resolution(cls, L, h, e_max, ppw=8.0):
        return cls(L, int(cls.min_points(L, h, e_max, ppw)), h, e_max, ppw)

    @property
    def dx(self) -> float:
        return 2.0 * self.L / (self.N + 1)

    @property
    def x(self) -> np.ndarray:
        return -self.L + self.dx * np.arange(1, self.N + 1)


def _mollifier(s):
    out = np.zeros_like(s)
    inside = np.abs(s) < 1.0
    si = s[inside]
    out[inside] = np.exp(-1.0 / (1.0 - si * si))
    return out


_MOLL_NORM = quad(lambda s: math.exp(-1.0 / (1.0 - s * s)), -1.0, 1.0,
                  epsabs=1e-14, epsrel=1e-14)[0]


def _rise(s):
    """C-infinity transition from 0 at s=-1 to 1 at s=+1 (mollifier cumulative)."""
    s = np.asarray(s, dtype=float)
    out = np.empty_like(s)
    for i, v in np.ndenumerate(s):
        if v <= -1.0:
            out[i] = 0.0
        elif v >= 1.0:
            out[i] = 1.0
        else:
            out[i] = quad(lambda u: math.exp(-1.0 / (1.0 - u * u)), -1.0, v,
                          epsabs=1e-14, epsrel=1e-14)[0] / _MOLL_NORM
    return np.clip(out, 0.0, 1.0)


@dataclass(frozen=True)
class BumpSpec:
    """Smooth bump equal to 1 on plateau [c, d], supported in [a, b]."""

    plateau: tuple
    support: tuple

    def __post_init__(self):
        a, b = self.support
        c, d = self.plateau
        if not (a < c <= d < b):
            raise ConfigurationError(
                f"bump needs support ({a}, {b}) strictly containing plateau ({c}, {d})")
        object.__setattr__(self, "plateau", (float(c), float(d)))
        object.__setattr__(self, "support", (float(a), float(b)))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        a, b = self.support
        c, d = self.plateau
        out = np.zeros_like(x)
        out[(x >= c) & (x <= d)] = 1.0
        up = (x > a) & (x < c)
        if np.any(up):
            out[up] = _rise(2.0 * (x[up] - a) / (c - a) - 1.0)
        down = (x > d) & (x < b)
        if np.any(down):
            out[down] = _rise(2.0 * (b - x[down]) / (b - d) - 1.0)
        return out


@dataclass(frozen=True)
class CapSpec:
    """Quartic absorbing ramp: W = eta ((|x|-R_a)/(L-R_a))^4 beyond R_a."""

    R_a: float
    eta: float


@dataclass(frozen=True)
class ChiSpec:
    """Symmetric spatial cutoff: 1 on [-plateau_radius, plateau_radius]."""

    plateau_radius: float
    support_radius: float

    def bump(self) -> BumpSpec:
        return BumpSpec((-self.plateau_radius, self.plateau_radius),
                        (-self.support_radius, self.support_radius))


@dataclass
class DiscreteOperator:
    """Symmetric tridiagonal P with CAP and cutoff data on the grid."""

    x: np.ndarray
    dx: float
    h: float
    diag: np.ndarray
    offdiag: np.ndarray
    cap: np.ndarray
    chi: np.ndarray
    spectral_bounds: tuple
    grid: GridSpec | None = None

    @property
    def n(self) -> int:
        return self.diag.size


def build_cap(grid: GridSpec, R_a: float, eta: float) -> np.ndarray:
    """Nonnegative quartic ramp vanishing on |x| <= R_a, reaching eta at |x| = L."""
    if not 0 < R_a < grid.L:
        raise ConfigurationError(f"need 0 < R_a < L, got R_a={R_a}, L={grid.L}")
    if eta < 0:
        raise ConfigurationError("cap strength eta must be nonnegative")
    x = grid.x
    ramp = np.maximum(np.abs(x) - R_a, 0.0) / (grid.L - R_a)
    return eta * ramp ** 4


def build_operator(grid: GridSpec, spec: PotentialSpec, cap_spec: CapSpec,
                   chi_spec: ChiSpec) -> DiscreteOperator:
    """Assemble the second-order central-difference Hamiltonian on the grid."""
    if chi_spec.support_radius >= grid.L:
        raise ConfigurationError("chi support must lie inside the grid")
    x = grid.x
    dx = grid.dx
    kin = grid.h ** 2 / dx ** 2
    v = eval_potential(spec, x, 0)
    diag = 2.0 * kin + v
    offdiag = np.full(grid.N - 1, -kin)
    cap = build_cap(grid, cap_spec.R_a, cap_spec.eta)
    chi = chi_spec.bump()(x)

    radius = np.zeros(grid.N)
    radius[:-1] += np.abs(offdiag)
    radius[1:] += np.abs(offdiag)
    lo = float(np.min(diag - radius))
    hi = float(np.max(diag + radius))
    margin = 1e-8 * max(1.0, abs(lo), abs(hi))
    return DiscreteOperator(x, dx, grid.h, diag, offdiag, cap, chi,
                            (lo - margin, hi + margin), grid)


def wf_norm(u, dx: float) -> float:
    return float(np.sqrt(dx * np.sum(np.abs(u) ** 2)))

def wf_inner(u, v, dx: float) -> complex:
    return complex(dx * np.vdot(u, v))

def op_apply(op: DiscreteOperator, u):
    """P u (no CAP)."""
    return kernels.tridiag_matvec(op.offdiag.astype(complex), op.diag.astype(complex),
                                  op.offdiag.astype(complex), np.asarray(u, complex))


def jackson_damping(ncoef: int) -> np.ndarray:
    """Jackson kernel coefficients g_0..g_{n-1} (optional Gibbs suppression)."""
    n = ncoef
    m = np.arange(n)
    theta = math.pi / (n + 1)
    return ((n + 1 - m) * np.cos(m * theta) + np.sin(m * theta) / math.tan(theta)) / (n + 1)


def _cheb_coeffs_raw(f, degree: int) -> np.ndarray:
    """Chebyshev interpolation coefficients at the degree+1 Lobatto nodes."""
    j = np.arange(degree + 1)
    xj = np.cos(np.pi * j / degree)
    fj = f(xj)
    c = dct(fj, type=1) / degree
    c[0] /= 2.0
    c[-1] /= 2.0
    return c


@lru_cache(maxsize=64)
def _filter_plan(plateau, support, lo, hi, degree, tol, kernel):
    """Coefficients and sampled sup-error for the filter expansion.

    degree=None triggers a doubling search until the sampled sup-error over a
    dense mesh on [lo, hi] drops below tol.
    """
    bump = BumpSpec(plateau, support)

    def f_mapped(s):
        return bump(lo + 0.5 * (s + 1.0) * (hi - lo))

    mesh_s = np.linspace(-1.0, 1.0, _FILTER_MESH)
    target = bump(lo + 0.5 * (mesh_s + 1.0) * (hi - lo))

    def error_of(deg):
        c = _cheb_coeffs_raw(f_mapped, deg)
        if kernel == "jackson":
            c = c * jackson_damping(c.size)
        approx = np.polynomial.chebyshev.chebval(mesh_s, c)
        return c, float(np.max(np.abs(approx - target)))

    if degree is not None:
        c, err = error_of(degree)
        if err > tol:
            need = degree
            while need < _MAX_CHEB_DEGREE:
                need *= 2
                _, e2 = error_of(need)
                if e2 <= tol:
                    break
            raise FilterDegreeError(
                f"degree {degree} gives sup error {err:.2e} > {tol:.1e}; "
                f"approximately degree {need} is required", required_degree=need)
        return c, err

    deg = 64
    while True:
        c, err = error_of(deg)
        if err <= tol:
            return c, err
        if deg >= _MAX_CHEB_DEGREE:
            raise FilterDegreeError(
                f"sup error {err:.2e} > {tol:.1e} at maximal degree {deg}",
                required_degree=None)
        deg *= 2


def filter_coeffs(op: DiscreteOperator, bump: BumpSpec, degree=None,
                  tol: float = 1e-6, kernel: str | None = None):
    lo, hi = op.spectral_bounds
    return _filter_plan(bump.plateau, bump.support, lo, hi, degree, tol, kernel)


def apply_filter(op: DiscreteOperator, bump: BumpSpec, u, degree=None,
                 method: str = "chebyshev", tol: float = 1e-6,
                 kernel: str | None = None):
    """phi(P) u through the Chebyshev expansion (or dense eigensolve oracle)."""
    u = np.asarray(u, dtype=complex)
    if method == "dense":
        if op.n > MAX_DENSE_N:
            raise ConfigurationError(
                f"dense filter path limited to N <= {MAX_DENSE_N}, got {op.n}")
        w, vecs = eigh_tridiagonal(op.diag, op.offdiag)
        return vecs @ (bump(w) * (vecs.T @ u))
    if method != "chebyshev":
        raise ConfigurationError(f"unknown filter method {method!r}")
    coeffs, _ = filter_coeffs(op, bump, degree=degree, tol=tol, kernel=kernel)
    lo, hi = op.spectral_bounds
    off = op.offdiag.astype(complex)
    return kernels.cheb_apply(off, op.diag.astype(complex), off, coeffs, u, lo, hi)


class Propagator:
    """Crank-Nicolson walker for i h du/dt = P u (CAP ignored; P self-adjoint).

    Each step applies the Cayley transform
    u <- (I + i dt P / 2h)^{-1} (I - i dt P / 2h) u,
    one tridiagonal matvec and one prefactored tridiagonal solve.
    """

    def __init__(self, op: DiscreteOperator, dt: float, direction: int = 1):
        if dt <= 0:
            raise ConfigurationError("dt must be positive")
        if direction not in (1, -1):
            raise ConfigurationError("direction must be +1 or -1")
        self.op = op
        self.dt = dt
        self.direction = direction
        theta = 1j * direction * dt / (2.0 * op.h)
        a_diag = 1.0 + theta * op.diag
        a_off = theta * op.offdiag.astype(complex)
        self._fact = kernels.tridiag_factor(a_off, a_diag, a_off)
        self._b_diag = 1.0 - theta * op.diag
        self._b_off = -theta * op.offdiag.astype(complex)

    def advance(self, u, nsteps: int):
        return kernels.cn_steps(self._fact, self._b_off, self._b_diag, self._b_off,
                                np.asarray(u, complex), nsteps)


def propagate(op: DiscreteOperator, u0, t_final: float, dt: float):
    """Evolve u0 by t_final (sign chooses the direction) in steps of dt."""
    if t_final == 0:
        return np.asarray(u0, dtype=complex).copy()
    nsteps = int(round(abs(t_final) / dt))
    if abs(nsteps * dt - abs(t_final)) > 1e-9 * max(dt, abs(t_final)):
        raise ConfigurationError("t_final must be an integer multiple of dt")
    walker = Propagator(op, dt, direction=1 if t_final > 0 else -1)
    return walker.advance(u0, nsteps)


def coherent_state(grid: GridSpec, rho0) -> np.ndarray:
    """Normalized Gaussian wave packet of width sqrt(h) centered at (x0, xi0)."""
    x0 = float(np.atleast_1d(rho0.x)[0])
    xi0 = float(np.atleast_1d(rho0.xi)[0])
    h = grid.h
    guard = 5.0 * math.sqrt(h)
    if not (-grid.L + guard <= x0 <= grid.L - guard):
        raise ConfigurationError(
            f"coherent-state center {x0} too close to the wall (guard {guard:.3f})")
    x = grid.x
    u = (math.pi * h) ** (-0.25) * np.exp(
        1j * xi0 * (x - x0) / h - (x - x0) ** 2 / (2.0 * h))
    return u / wf_norm(u, grid.dx)
