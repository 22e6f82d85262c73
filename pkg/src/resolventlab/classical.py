"""Hamiltonian flow, trapping classification, and stability-rate estimation.

The flow of p(x, xi) = |xi|^2 + V(x) is integrated with an adaptive embedded
Runge-Kutta pair (DOP853) under energy-drift monitoring.  Trapping at energy
E0 is decided by the finite proxy (R_escape, T_max): in 1D, once |x| exceeds
the interaction region with outward momentum, escape is certain for the
canonical families, so the escape event short-circuits the integration.

The stability rate of the trapped set is the maximal finite-time Lyapunov
exponent, computed from the tangent flow dJ/dt = A(x(t)) J with
A = [[0, 2 Id], [-Hess V, 0]]; at exact fixed points the eigenvalues of A are
used directly.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.integrate import solve_ivp

from .errors import ConfigurationError, IntegrationError
from .potentials import LinePotential, PotentialSpec

SHELL_TOL = 1e-9

_MIN_RTOL = 2.5e-14  # DOP853 floor in scipy


class Classification(Enum):
    TRAPPED = "Trapped"
    ESCAPED_FORWARD = "EscapedForward"
    ESCAPED_BACKWARD = "EscapedBackward"
    ESCAPED_BOTH = "EscapedBoth"


class TrappingClass(Enum):
    NON_TRAPPING = "NonTrapping"
    TRAPPING = "Trapping"


@dataclass(frozen=True)
class PhasePoint:
    """A phase-space point (x, xi); scalars are promoted to length-1 vectors."""

    x: np.ndarray
    xi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", np.atleast_1d(np.asarray(self.x, dtype=float)))
        object.__setattr__(self, "xi", np.atleast_1d(np.asarray(self.xi, dtype=float)))
        if self.x.shape != self.xi.shape:
            raise ConfigurationError("x and xi must have the same dimension")
        if not (np.all(np.isfinite(self.x)) and np.all(np.isfinite(self.xi))):
            raise ConfigurationError("phase point has non-finite components")

    @property
    def n(self) -> int:
        return self.x.size


@dataclass
class Trajectory:
    times: np.ndarray            # increasing (backward flows are stored reversed)
    points: list                 # PhasePoint per time
    escape_time: float | None    # first t with |x(t)| > r_escape, None if never
    energy_drift: float

    @property
    def endpoint(self) -> "PhasePoint":
        """State at the largest |t| (the far end of the integration)."""
        if abs(self.times[0]) > abs(self.times[-1]):
            return self.points[0]
        return self.points[-1]


@dataclass
class TrappingReport:
    energy: float
    classification: TrappingClass
    trapped_samples: list            # PhasePoint
    spatial_hull: tuple | None       # (lo, hi) covering the x-projection
    gamma: float | None
    semi_trapped_forward: int = 0    # bounded in forward time only
    semi_trapped_backward: int = 0


def _as_potential(spec):
    if isinstance(spec, PotentialSpec):
        return LinePotential(spec)
    return spec  # duck-typed: value/grad/hess


def energy(spec, rho: PhasePoint) -> float:
    """p(rho) = |xi|^2 + V(x)."""
    pot = _as_potential(spec)
    return float(np.dot(rho.xi, rho.xi) + pot.value(rho.x))


def flow(spec, rho0: PhasePoint, t_final: float, tol: float = 1e-10,
         r_escape: float | None = None, n_samples: int = 201) -> Trajectory:
    """Integrate xdot = 2 xi, xidot = -grad V over [0, t_final].

    Negative t_final flows backward.  The returned trajectory satisfies
    energy_drift <= tol (the solver is retried once with tighter tolerance,
    then IntegrationError is raised).  If r_escape is given, integration
    stops at the first |x| = r_escape crossing and escape_time is set.
    """
    if tol <= 0:
        raise ConfigurationError("tol must be positive")
    pot = _as_potential(spec)
    n = rho0.n
    y0 = np.concatenate([rho0.x, rho0.xi])

    def rhs(t, y):
        return np.concatenate([2.0 * y[n:], -pot.grad(y[:n])])

    events = None
    if r_escape is not None:
        def escape(t, y):
            return np.linalg.norm(y[:n]) - r_escape
        escape.terminal = True
        events = [escape]

    e0 = energy(spec, rho0)
    rtol = max(tol * 1e-3, _MIN_RTOL)
    for _ in range(2):
        t_eval = np.linspace(0.0, t_final, max(2, n_samples))
        sol = solve_ivp(rhs, (0.0, t_final), y0, method="DOP853",
                        rtol=rtol, atol=rtol, t_eval=t_eval, events=events)
        if sol.status == -1:
            raise IntegrationError(f"flow integration failed: {sol.message}")
        drift = max(
            abs(float(np.dot(sol.y[n:, k], sol.y[n:, k]) + pot.value(sol.y[:n, k])) - e0)
            for k in range(sol.t.size)
        )
        if drift <= tol:
            break
        rtol = max(rtol * 1e-2, _MIN_RTOL)
    else:
        raise IntegrationError(
            f"energy drift {drift:.3e} exceeds tolerance {tol:.1e} at minimal rtol")

    escape_time = None
    if events is not None and sol.t_events[0].size:
        escape_time = float(sol.t_events[0][0])

    times = sol.t
    ys = sol.y
    if t_final < 0:
        times = times[::-1]
        ys = ys[:, ::-1]
    points = [PhasePoint(ys[:n, k], ys[n:, k]) for k in range(times.size)]
    return Trajectory(np.array(times), points, escape_time, drift)


def classify_point(spec, rho0: PhasePoint, E0: float, R_escape: float = 15.0,
                   T_max: float = 200.0, tol: float = 1e-9,
                   shell_tol: float = SHELL_TOL) -> Classification:
    """Classify rho0 on the E0 shell as trapped / escaped (per time direction)."""
    if abs(energy(spec, rho0) - E0) > shell_tol:
        raise ConfigurationError(
            f"initial point off the energy shell: |p(rho)-E0| = "
            f"{abs(energy(spec, rho0) - E0):.2e} > {shell_tol:.1e}")
    fwd = flow(spec, rho0, T_max, tol=tol, r_escape=R_escape, n_samples=64)
    bwd = flow(spec, rho0, -T_max, tol=tol, r_escape=R_escape, n_samples=64)
    esc_f = fwd.escape_time is not None
    esc_b = bwd.escape_time is not None
    if esc_f and esc_b:
        return Classification.ESCAPED_BOTH
    if esc_f:
        return Classification.ESCAPED_FORWARD
    if esc_b:
        return Classification.ESCAPED_BACKWARD
    return Classification.TRAPPED


def tangent_flow(spec, rho0: PhasePoint, t_final: float, tol: float = 1e-10):
    """Propagate the tangent matrix J along the trajectory; returns J(t_final)."""
    pot = _as_potential(spec)
    n = rho0.n
    m = 2 * n
    y0 = np.concatenate([rho0.x, rho0.xi, np.eye(m).ravel()])

    def rhs(t, y):
        x = y[:n]
        J = y[m:].reshape(m, m)
        A = np.zeros((m, m))
        A[:n, n:] = 2.0 * np.eye(n)
        A[n:, :n] = -pot.hess(x)
        return np.concatenate([2.0 * y[n:m], -pot.grad(x), (A @ J).ravel()])

    rtol = max(tol * 1e-3, _MIN_RTOL)
    sol = solve_ivp(rhs, (0.0, t_final), y0, method="DOP853", rtol=rtol, atol=rtol)
    if sol.status != 0:
        raise IntegrationError(f"tangent flow failed: {sol.message}")
    return sol.y[m:, -1].reshape(m, m)


def linearization_rate(spec, x0) -> float:
    """Largest real part of the eigenvalues of [[0, 2 Id], [-Hess V(x0), 0]]."""
    pot = _as_potential(spec)
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    n = x0.size
    A = np.zeros((2 * n, 2 * n))
    A[:n, n:] = 2.0 * np.eye(n)
    A[n:, :n] = -pot.hess(x0)
    return float(np.max(np.linalg.eigvals(A).real))


def estimate_gamma(spec, trapped_samples, T_lyap: float = 40.0,
                   gamma_floor: float = 0.25, tol: float = 1e-10) -> float:
    """Max finite-time Lyapunov exponent over the samples, floored at gamma_floor.

    Exact fixed points use the linearization eigenvalues directly; other
    samples use (1/T) ln ||J(T)|| from the tangent flow.
    """
    if not trapped_samples:
        raise ConfigurationError("estimate_gamma needs at least one trapped sample")
    pot = _as_potential(spec)
    best = 0.0
    for rho in trapped_samples:
        at_fixed_point = (np.max(np.abs(rho.xi)) <= 1e-12
                          and np.max(np.abs(pot.grad(rho.x))) <= 1e-12)
        if at_fixed_point:
            rate = linearization_rate(spec, rho.x)
        else:
            J = tangent_flow(spec, rho, T_lyap, tol=tol)
            rate = float(np.log(np.linalg.norm(J, 2)) / T_lyap)
        best = max(best, rate)
    return max(best, gamma_floor)


def sample_trapped_set(spec, E0: float, search_box=(-12.0, 12.0), grid: int = 241,
                       R_escape: float = 15.0, T_max: float = 200.0,
                       T_lyap: float = 40.0, gamma_floor: float = 0.25,
                       tol: float = 1e-9) -> TrappingReport:
    """Scan the energy shell over search_box and assemble a trapping report.

    For each grid x with V(x) <= E0 both shell momenta +-sqrt(E0 - V(x)) are
    classified; trapped points are collected, the spatial hull is their x-range
    widened by one grid cell, and gamma is estimated over the trapped samples.
    """
    if E0 <= 0:
        raise ConfigurationError("E0 must be positive")
    if grid < 2:
        raise ConfigurationError("grid must have at least 2 points")
    lo, hi = float(search_box[0]), float(search_box[1])
    if not lo < hi:
        raise ConfigurationError("search_box must be a nonempty interval")
    xs = np.linspace(lo, hi, grid)
    cell = (hi - lo) / (grid - 1)
    pot = _as_potential(spec)

    trapped = []
    semi_f = semi_b = 0
    for x in xs:
        v = pot.value(np.array([x]))
        if v > E0:
            continue
        xi = np.sqrt(E0 - v)
        signs = (1.0,) if xi == 0.0 else (1.0, -1.0)
        for s in signs:
            rho = PhasePoint(x, s * xi)
            cls = classify_point(spec, rho, E0, R_escape=R_escape, T_max=T_max, tol=tol)
            if cls is Classification.TRAPPED:
                trapped.append(rho)
            elif cls is Classification.ESCAPED_BACKWARD:
                semi_f += 1   # bounded forward, escapes backward
            elif cls is Classification.ESCAPED_FORWARD:
                semi_b += 1

    if not trapped:
        return TrappingReport(E0, TrappingClass.NON_TRAPPING, [], None, None,
                              semi_f, semi_b)
    xs_t = [float(rho.x[0]) for rho in trapped]
    hull = (min(xs_t) - cell, max(xs_t) + cell)
    gamma = estimate_gamma(spec, trapped, T_lyap=T_lyap, gamma_floor=gamma_floor)
    return TrappingReport(E0, TrappingClass.TRAPPING, trapped, hull, gamma,
                          semi_f, semi_b)
