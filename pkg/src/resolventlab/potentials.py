"""Analytic potential families with closed-form derivatives.

Four canonical 1D families, each realizing one branch of the trapping
trichotomy probed by the experiments:

- ``zero``            V(x) = 0                        (free motion)
- ``attractive_bump`` V(x) = -A (1 + x^2)^{-2}        (non-trapping at E > 0)
- ``eckart_barrier``  V(x) = V0 sech^2(x/w)           (hyperbolic fixed point at E = V0)
- ``double_barrier``  V(x) = V0 sech^2((x-d)/w) + V0 sech^2((x+d)/w)
                                                      (well between barriers)

Derivatives up to order 2 are hand-coded closed forms; finite differences
appear only as test oracles.  Each spec carries a claimed polynomial decay
exponent ``sigma`` that :func:`check_decay` validates by sampling.
"""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import ConfigurationError


class Family(str, Enum):
    ZERO = "zero"
    ATTRACTIVE_BUMP = "attractive_bump"
    ECKART_BARRIER = "eckart_barrier"
    DOUBLE_BARRIER = "double_barrier"


_REQUIRED_PARAMS = {
    Family.ZERO: (),
    Family.ATTRACTIVE_BUMP: ("A",),
    Family.ECKART_BARRIER: ("V0", "w"),
    Family.DOUBLE_BARRIER: ("V0", "w", "d"),
}


@dataclass(frozen=True)
class PotentialSpec:
    """A named potential family with parameters and claimed decay exponent."""

    family: Family
    params: dict = field(default_factory=dict)
    sigma: float = 1.0

    def __post_init__(self):
        try:
            family = Family(self.family)
        except ValueError:
            raise ConfigurationError(f"unknown potential family {self.family!r}")
        object.__setattr__(self, "family", family)
        required = _REQUIRED_PARAMS[family]
        missing = [k for k in required if k not in self.params]
        if missing:
            raise ConfigurationError(f"{family.value}: missing parameters {missing}")
        if self.sigma <= 0:
            raise ConfigurationError("sigma must be positive")
        p = self.params
        if family in (Family.ECKART_BARRIER, Family.DOUBLE_BARRIER):
            if p["V0"] <= 0:
                raise ConfigurationError(f"{family.value}: V0 must be > 0")
            if p["w"] <= 0:
                raise ConfigurationError(f"{family.value}: width w must be > 0")
        if family is Family.DOUBLE_BARRIER and p["d"] <= 0:
            raise ConfigurationError("double_barrier: separation d must be > 0")
        if family is Family.ATTRACTIVE_BUMP and p["A"] <= 0:
            raise ConfigurationError("attractive_bump: depth A must be > 0")


def zero() -> PotentialSpec:
    return PotentialSpec(Family.ZERO, {}, sigma=1.0)

def attractive_bump(A: float = 1.0, sigma: float = 4.0) -> PotentialSpec:
    return PotentialSpec(Family.ATTRACTIVE_BUMP, {"A": A}, sigma=sigma)

def eckart_barrier(V0: float = 1.0, w: float = 1.0, sigma: float = 2.0) -> PotentialSpec:
    return PotentialSpec(Family.ECKART_BARRIER, {"V0": V0, "w": w}, sigma=sigma)

def double_barrier(V0: float = 2.0, w: float = 1.0, d: float = 4.0,
                   sigma: float = 2.0) -> PotentialSpec:
    return PotentialSpec(Family.DOUBLE_BARRIER, {"V0": V0, "w": w, "d": d}, sigma=sigma)


def _sech_bump(V0, w, x, order):
    # V0 sech^2(x/w) and derivatives; sech/tanh via exp(-|y|) to avoid overflow
    y = np.asarray(x, dtype=float) / w
    e = np.exp(-np.abs(y))
    s = 2.0 * e / (1.0 + e * e)
    if order == 0:
        return V0 * s * s
    t = np.sign(y) * (1.0 - e * e) / (1.0 + e * e)
    if order == 1:
        return -(2.0 * V0 / w) * s * s * t
    return -(2.0 * V0 / w ** 2) * s * s * (s * s - 2.0 * t * t)


def eval_potential(spec: PotentialSpec, x, order: int = 0):
    """Evaluate V, V' or V'' elementwise at x from the closed forms."""
    if order not in (0, 1, 2):
        raise ConfigurationError(f"derivative order must be 0, 1 or 2, got {order}")
    x = np.asarray(x, dtype=float)
    fam = spec.family
    p = spec.params
    if fam is Family.ZERO:
        return np.zeros_like(x)
    if fam is Family.ATTRACTIVE_BUMP:
        A = p["A"]
        q = 1.0 + x * x
        if order == 0:
            return -A / q ** 2
        if order == 1:
            return 4.0 * A * x / q ** 3
        return 4.0 * A * (1.0 - 5.0 * x * x) / q ** 4
    if fam is Family.ECKART_BARRIER:
        return _sech_bump(p["V0"], p["w"], x, order)
    if fam is Family.DOUBLE_BARRIER:
        return (_sech_bump(p["V0"], p["w"], x - p["d"], order)
                + _sech_bump(p["V0"], p["w"], x + p["d"], order))
    raise ConfigurationError(f"unknown potential family {fam!r}")


@dataclass(frozen=True)
class DecayReport:
    """Sampled sup constants of |V^(k)(x)| <x>^(sigma+k) on [R, 10R] and [2R, 20R]."""

    radius: float
    constants: tuple
    constants_doubled: tuple
    growth: tuple
    violation: bool
    violating_orders: tuple


def _decay_constants(spec, radius, samples):
    r = np.logspace(np.log10(radius), np.log10(10.0 * radius), samples)
    x = np.concatenate([-r[::-1], r])
    jap = np.sqrt(1.0 + x * x)
    out = []
    for k in range(3):
        vals = np.abs(eval_potential(spec, x, k)) * jap ** (spec.sigma + k)
        out.append(float(np.max(vals)))
    return tuple(out)


def check_decay(spec: PotentialSpec, radius: float, samples: int = 200) -> DecayReport:
    """Test the claimed decay |V^(k)(x)| <= C <x>^(-sigma-k) by sampling.

    The sup constants are measured on |x| in [R, 10R] and again on [2R, 20R];
    a growth by more than a factor 2 under doubling R flags a violation (the
    claimed sigma is too large for the family).
    """
    if radius <= 0:
        raise ConfigurationError("radius must be positive")
    if samples < 2:
        raise ConfigurationError("need at least 2 samples")
    c1 = _decay_constants(spec, radius, samples)
    c2 = _decay_constants(spec, 2.0 * radius, samples)
    growth = tuple(0.0 if a == 0.0 else b / a for a, b in zip(c1, c2))
    bad = tuple(k for k in range(3) if growth[k] > 2.0)
    return DecayReport(radius, c1, c2, growth, bool(bad), bad)


class LinePotential:
    """Vector-interface adapter for a 1D spec (positions are length-1 arrays)."""

    def __init__(self, spec: PotentialSpec):
        self.spec = spec

    def value(self, x):
        return float(eval_potential(self.spec, x[0], 0))

    def grad(self, x):
        return np.array([eval_potential(self.spec, x[0], 1)])

    def hess(self, x):
        return np.array([[eval_potential(self.spec, x[0], 2)]])


class RadialPotential:
    """Radialized n-dimensional wrapper V(|x|) around a 1D profile.

    Gives the classical-flow machinery an n >= 2 potential with exact
    gradient and Hessian from the 1D closed forms.  The profile must be even
    and smooth at the origin (all canonical families are).
    """

    def __init__(self, spec: PotentialSpec, n: int):
        if n < 1:
            raise ConfigurationError("dimension must be >= 1")
        self.spec = spec
        self.n = n

    def value(self, x):
        return float(eval_potential(self.spec, np.linalg.norm(x), 0))

    def grad(self, x):
        r = np.linalg.norm(x)
        if r < 1e-150:
            return np.zeros(self.n)
        return float(eval_potential(self.spec, r, 1)) * (np.asarray(x) / r)

    def hess(self, x):
        r = np.linalg.norm(x)
        v2 = float(eval_potential(self.spec, r, 2))
        if r < 1e-150:
            return v2 * np.eye(self.n)
        u = np.asarray(x) / r
        proj = np.outer(u, u)
        v1 = float(eval_potential(self.spec, r, 1))
        return v2 * proj + (v1 / r) * (np.eye(self.n) - proj)
