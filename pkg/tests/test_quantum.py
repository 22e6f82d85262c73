import numpy as np
import pytest
from scipy.linalg import eigh_tridiagonal

from resolventlab.classical import PhasePoint
from resolventlab.errors import ConfigurationError, FilterDegreeError
from resolventlab.potentials import eckart_barrier, zero
from resolventlab.quantum import (BumpSpec, CapSpec, ChiSpec, GridSpec,
                                  apply_filter, build_cap, build_operator,
                                  coherent_state, op_apply, propagate, wf_norm)

CAP = CapSpec(14.0, 1.0)
CHI = ChiSpec(3.0, 5.0)
PHI = BumpSpec((0.9, 1.1), (0.8, 1.2))


def _op(L=20.0, N=512, h=0.12, e_max=1.2, spec=None, cap=CAP, chi=CHI):
    grid = GridSpec(L, N, h, e_max)
    return build_operator(grid, spec if spec is not None else eckart_barrier(),
                          cap, chi)


def test_grid_resolution_error_names_minimal_n():
    with pytest.raises(ConfigurationError) as err:
        GridSpec(20.0, 32, 0.05, 1.2)
    assert str(GridSpec.min_points(20.0, 0.05, 1.2)) in str(err.value)
    grid = GridSpec.with_resolution(20.0, 0.05, 1.2)
    assert grid.N == GridSpec.min_points(20.0, 0.05, 1.2)


def test_dirichlet_laplacian_eigenvalues_closed_form():
    # V = 0, h = 1: eigenvalues are h^2 (4/dx^2) sin^2(k pi / (2(N+1)))
    grid = GridSpec(10.0, 64, 1.0, 1.0)
    op = build_operator(grid, zero(), CapSpec(8.0, 1.0), ChiSpec(2.0, 4.0))
    w = eigh_tridiagonal(op.diag, op.offdiag, eigvals_only=True)
    k = np.arange(1, 65)
    want = (4.0 / grid.dx ** 2) * np.sin(k * np.pi / (2 * 65)) ** 2
    assert np.allclose(np.sort(w), np.sort(want), rtol=1e-12, atol=1e-12)


def test_gershgorin_contains_spectrum():
    op = _op(N=64, h=1.0, e_max=1.0, L=10.0, cap=CapSpec(8.0, 1.0),
             chi=ChiSpec(2.0, 4.0))
    w = eigh_tridiagonal(op.diag, op.offdiag, eigvals_only=True)
    lo, hi = op.spectral_bounds
    assert np.all(w >= lo) and np.all(w <= hi)


def test_chi_is_one_on_core_and_zero_outside():
    op = _op()
    core = np.abs(op.x) <= CHI.plateau_radius
    outside = np.abs(op.x) >= CHI.support_radius
    assert np.all(op.chi[core] == 1.0)
    assert np.all(op.chi[outside] == 0.0)
    assert np.all((op.chi >= 0.0) & (op.chi <= 1.0))


def test_cap_profile():
    # grid chosen so that the ramp midpoint 17 = (R_a + L)/2 is a node
    grid = GridSpec(20.0, 399, 0.2, 1.0)
    w = build_cap(grid, 14.0, 1.0)
    assert np.all(w[np.abs(grid.x) <= 14.0] == 0.0)
    i_mid = int(np.argmin(np.abs(grid.x - 17.0)))
    assert grid.x[i_mid] == pytest.approx(17.0, abs=1e-9)
    assert w[i_mid] == pytest.approx(1.0 / 16.0, rel=1e-9)
    # quartic ramp endpoint: formula value at x = L is eta
    assert 1.0 * ((20.0 - 14.0) / 6.0) ** 4 == 1.0
    assert np.all(np.diff(w[grid.x > 0]) >= 0)
    with pytest.raises(ConfigurationError):
        build_cap(grid, 25.0, 1.0)


def test_filter_on_eigenvectors():
    op = _op()
    w, vecs = eigh_tridiagonal(op.diag, op.offdiag)
    k_in = int(np.argmin(np.abs(w - 1.0)))
    assert 0.9 < w[k_in] < 1.1
    u = vecs[:, k_in].astype(complex)
    out = apply_filter(op, PHI, u)
    assert np.linalg.norm(out - u) <= 1e-5 * np.linalg.norm(u)
    k_out = int(np.argmin(np.abs(w - 2.0)))
    u2 = vecs[:, k_out].astype(complex)
    assert np.linalg.norm(apply_filter(op, PHI, u2)) <= 1e-5


def test_filter_chebyshev_matches_dense(rng):
    op = _op()
    u = rng.standard_normal(op.n) + 1j * rng.standard_normal(op.n)
    a = apply_filter(op, PHI, u, method="chebyshev")
    b = apply_filter(op, PHI, u, method="dense")
    assert np.linalg.norm(a - b) <= 1e-5 * np.linalg.norm(u)


def test_filter_is_contraction_and_commutes(rng):
    op = _op(N=288, h=0.2)
    for _ in range(3):
        u = rng.standard_normal(op.n) + 1j * rng.standard_normal(op.n)
        out = apply_filter(op, PHI, u)
        assert np.linalg.norm(out) <= (1.0 + 1e-5) * np.linalg.norm(u)
        comm = apply_filter(op, PHI, op_apply(op, u)) - op_apply(op, apply_filter(op, PHI, u))
        assert np.linalg.norm(comm) <= 1e-8 * np.linalg.norm(u)


def test_filter_degree_refusal_names_required_degree():
    op = _op()
    with pytest.raises(FilterDegreeError) as err:
        apply_filter(op, PHI, np.ones(op.n, complex), degree=128)
    assert err.value.required_degree is not None
    assert err.value.required_degree > 128


def test_propagate_single_step_phase_on_eigenvector():
    op = _op(N=128, h=0.3, L=10.0, cap=CapSpec(8.0, 1.0), chi=ChiSpec(2.0, 4.0))
    w, vecs = eigh_tridiagonal(op.diag, op.offdiag)
    k = 17
    u = vecs[:, k].astype(complex)
    dt = op.h / 20.0
    out = propagate(op, u, dt, dt)
    theta = dt * w[k] / (2.0 * op.h)
    phase = (1.0 - 1j * theta) / (1.0 + 1j * theta)
    assert np.linalg.norm(out - phase * u) <= 1e-12
    assert abs(np.linalg.norm(out) - np.linalg.norm(u)) <= 1e-13


def test_propagate_unitarity_long_run():
    op = _op(N=128, h=0.3, L=10.0, cap=CapSpec(8.0, 1.0), chi=ChiSpec(2.0, 4.0))
    u = coherent_state(op.grid, PhasePoint(0.0, 0.8))
    dt = op.h / 20.0
    out = propagate(op, u, 10000 * dt, dt)
    assert abs(wf_norm(out, op.dx) - 1.0) <= 1e-8


def test_propagate_composition():
    op = _op(N=128, h=0.3, L=10.0, cap=CapSpec(8.0, 1.0), chi=ChiSpec(2.0, 4.0))
    u = coherent_state(op.grid, PhasePoint(0.5, 0.6))
    dt = op.h / 20.0
    a = propagate(op, propagate(op, u, 7 * dt, dt), 5 * dt, dt)
    b = propagate(op, u, 12 * dt, dt)
    assert np.linalg.norm(a - b) <= 1e-6 * np.linalg.norm(b)


def test_propagate_matches_dense_exponential():
    # free packet at N = 256, dt = h/20
    grid = GridSpec(10.0, 256, 0.125, 1.2)
    op = build_operator(grid, zero(), CapSpec(8.0, 1.0), ChiSpec(2.0, 4.0))
    u0 = coherent_state(grid, PhasePoint(-1.0, 0.5))
    dt = op.h / 20.0
    t = 16 * dt
    got = propagate(op, u0, t, dt)
    w, vecs = eigh_tridiagonal(op.diag, op.offdiag)
    want = vecs @ (np.exp(-1j * t * w / op.h) * (vecs.T @ u0))
    assert np.linalg.norm(got - want) <= 1e-4 * np.linalg.norm(u0)
    # variance grows for the free packet
    var0 = grid.dx * np.sum(grid.x ** 2 * np.abs(u0) ** 2) - (
        grid.dx * np.sum(grid.x * np.abs(u0) ** 2)) ** 2
    uT = propagate(op, u0, 160 * dt, dt)
    mT = grid.dx * np.sum(grid.x * np.abs(uT) ** 2)
    varT = grid.dx * np.sum((grid.x - mT) ** 2 * np.abs(uT) ** 2)
    assert varT > var0


def test_coherent_state_moments():
    grid = GridSpec(12.0, 4096, 0.25, 1.0)
    x0, xi0 = 0.7, 0.5
    u = coherent_state(grid, PhasePoint(x0, xi0))
    dx = grid.dx
    assert wf_norm(u, dx) == pytest.approx(1.0, abs=1e-13)
    mean = dx * np.sum(grid.x * np.abs(u) ** 2)
    assert mean == pytest.approx(x0, abs=1e-8)
    var = dx * np.sum((grid.x - x0) ** 2 * np.abs(u) ** 2)
    assert var == pytest.approx(grid.h / 2.0, rel=1e-6)


def test_coherent_state_momentum_mean_high_resolution():
    # oracle: momentum moment with the analytic Gaussian derivative, plus the
    # central-difference version on a grid fine enough for 1e-6 accuracy
    grid = GridSpec(6.0, 30001, 0.25, 1.0)
    xi0 = 0.5
    u = coherent_state(grid, PhasePoint(0.0, xi0))
    du_exact = (1j * xi0 / grid.h - grid.x / grid.h) * u
    mom_exact = float(np.real(grid.dx * np.sum(np.conj(u) * (-1j * grid.h) * du_exact)))
    assert mom_exact == pytest.approx(xi0, abs=1e-12)
    du = (u[2:] - u[:-2]) / (2.0 * grid.dx)
    mom = float(np.real(grid.dx * np.sum(np.conj(u[1:-1]) * (-1j * grid.h) * du)))
    assert mom == pytest.approx(xi0, abs=1e-6)


def test_coherent_state_wall_guard():
    grid = GridSpec(10.0, 256, 0.125, 1.2)
    with pytest.raises(ConfigurationError):
        coherent_state(grid, PhasePoint(9.9, 0.0))


def test_operator_self_adjoint(rng):
    op = _op(N=240, h=0.25)
    u = rng.standard_normal(op.n) + 1j * rng.standard_normal(op.n)
    v = rng.standard_normal(op.n) + 1j * rng.standard_normal(op.n)
    lhs = np.vdot(op_apply(op, u), v)
    rhs = np.vdot(u, op_apply(op, v))
    assert abs(lhs - rhs) <= 1e-10 * abs(lhs)


def test_bump_validation():
    with pytest.raises(ConfigurationError):
        BumpSpec((0.8, 1.2), (0.9, 1.1))   # plateau outside support
    b = BumpSpec((-1.0, 1.0), (-2.0, 2.0))
    xs = np.linspace(-3, 3, 601)
    vals = b(xs)
    assert np.all((vals >= 0) & (vals <= 1))
    assert np.all(vals[np.abs(xs) <= 1.0] == 1.0)
    assert np.all(vals[np.abs(xs) >= 2.0] == 0.0)
