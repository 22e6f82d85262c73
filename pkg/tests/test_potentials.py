import numpy as np
import pytest
import sympy as sp

from resolventlab.errors import ConfigurationError
from resolventlab.potentials import (Family, PotentialSpec, RadialPotential,
                                     attractive_bump, check_decay, double_barrier,
                                     eckart_barrier, eval_potential, zero)


def _symbolic(spec):
    """Oracle: sympy expressions for V, V', V'' of a spec."""
    x = sp.Symbol("x", real=True)
    p = spec.params
    if spec.family is Family.ZERO:
        expr = sp.Integer(0) * x
    elif spec.family is Family.ATTRACTIVE_BUMP:
        expr = -p["A"] / (1 + x ** 2) ** 2
    elif spec.family is Family.ECKART_BARRIER:
        expr = p["V0"] * sp.sech(x / p["w"]) ** 2
    else:
        expr = (p["V0"] * sp.sech((x - p["d"]) / p["w"]) ** 2
                + p["V0"] * sp.sech((x + p["d"]) / p["w"]) ** 2)
    return [sp.lambdify(x, sp.diff(expr, x, k), "numpy") for k in range(3)]


def test_zero_everywhere():
    assert eval_potential(zero(), 3.7, 0) == 0.0
    xs = np.linspace(-30, 30, 7)
    for order in (0, 1, 2):
        assert np.all(eval_potential(zero(), xs, order) == 0.0)


def test_eckart_frozen_values_at_origin():
    spec = eckart_barrier(V0=1.0, w=1.0)
    assert eval_potential(spec, 0.0, 0) == pytest.approx(1.0, abs=1e-15)
    assert eval_potential(spec, 0.0, 1) == pytest.approx(0.0, abs=1e-15)
    # (sech^2)''(0) = -2, from symbolic differentiation of V0 sech^2(x/w)
    assert eval_potential(spec, 0.0, 2) == pytest.approx(-2.0, abs=1e-13)


@pytest.mark.parametrize("spec", [
    attractive_bump(A=1.3),
    eckart_barrier(V0=2.5, w=0.7),
    double_barrier(V0=2.0, w=1.0, d=4.0),
])
def test_closed_forms_match_symbolic(spec, rng):
    fns = _symbolic(spec)
    xs = rng.uniform(-8, 8, size=40)
    for order in (0, 1, 2):
        got = eval_potential(spec, xs, order)
        want = fns[order](xs)
        assert np.allclose(got, want, rtol=1e-12, atol=1e-12)


def test_gradient_finite_difference_second_order(rng):
    # |V'(x) - FD| <= C delta^2 with consistent C across delta
    for spec in (attractive_bump(), eckart_barrier(), double_barrier()):
        xs = rng.uniform(-10, 10, size=100)
        cs = []
        for delta in (1e-3, 1e-4):
            fd = (eval_potential(spec, xs + delta, 0)
                  - eval_potential(spec, xs - delta, 0)) / (2 * delta)
            err = np.max(np.abs(eval_potential(spec, xs, 1) - fd))
            cs.append(err / delta ** 2)
        assert cs[0] < 10.0  # bounded third derivative for all families
        # order-2 convergence: the implied constant agrees across deltas
        assert 0.2 <= cs[1] / cs[0] <= 5.0 or cs[1] * 1e-8 < 1e-12


@pytest.mark.parametrize("spec", [eckart_barrier(V0=3.0, w=1.4),
                                  double_barrier(V0=2.0, w=1.0, d=4.0)])
def test_even_potentials(spec, rng):
    xs = rng.uniform(0, 12, size=50)
    assert np.array_equal(eval_potential(spec, xs, 0), eval_potential(spec, -xs, 0))


def test_check_decay_zero():
    report = check_decay(zero(), radius=3.0)
    assert report.constants == (0.0, 0.0, 0.0)
    assert not report.violation


def test_check_decay_eckart_ok():
    # sech^2 decays exponentially: any polynomial weight wins
    report = check_decay(eckart_barrier(V0=1.0, w=1.0, sigma=2.0), radius=5.0)
    assert not report.violation
    assert all(np.isfinite(c) for c in report.constants)


def test_check_decay_flags_overclaimed_sigma():
    # (1+x^2)^{-2} with claimed sigma=10: weighted samples grow like x^6
    report = check_decay(attractive_bump(A=1.0, sigma=10.0), radius=5.0)
    assert report.violation
    assert 0 in report.violating_orders


def test_check_decay_accepts_true_sigma():
    report = check_decay(attractive_bump(A=1.0, sigma=4.0), radius=5.0)
    assert not report.violation


def test_spec_validation():
    with pytest.raises(ConfigurationError):
        PotentialSpec("no_such_family", {})
    with pytest.raises(ConfigurationError):
        eckart_barrier(V0=-1.0)
    with pytest.raises(ConfigurationError):
        eckart_barrier(w=0.0)
    with pytest.raises(ConfigurationError):
        double_barrier(d=-2.0)
    with pytest.raises(ConfigurationError):
        PotentialSpec(Family.ECKART_BARRIER, {"V0": 1.0})  # missing w
    with pytest.raises(ConfigurationError):
        eval_potential(zero(), 0.0, 3)


def test_finite_on_wide_range():
    xs = np.linspace(-1e4, 1e4, 2001)
    for spec in (attractive_bump(), eckart_barrier(), double_barrier()):
        for order in (0, 1, 2):
            assert np.all(np.isfinite(eval_potential(spec, xs, order)))


def test_radial_wrapper_matches_finite_differences(rng):
    pot = RadialPotential(attractive_bump(A=2.0), n=2)
    for _ in range(5):
        x = rng.uniform(-3, 3, size=2)
        g = pot.grad(x)
        delta = 1e-6
        for i in range(2):
            e = np.zeros(2)
            e[i] = delta
            fd = (pot.value(x + e) - pot.value(x - e)) / (2 * delta)
            assert g[i] == pytest.approx(fd, rel=1e-5, abs=1e-7)
        H = pot.hess(x)
        assert np.allclose(H, H.T)
