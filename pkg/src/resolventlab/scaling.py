"""Scaling-law fits for measured sup-norm sequences over an h-grid.

Three growth classes are fitted in their natural coordinates:

- power law      value = C h^p          (ln value vs ln h)
- log-enhanced   value = (C |ln h| + b)/h  (value*h vs |ln h|)
- exponential    value = C e^{nu/h}     (ln value vs 1/h)

``classify`` compares the fits through residuals normalized by the standard
deviation of each transformed ordinate (this makes the comparison meaningful
across coordinate systems and invariant under rescaling all values).
Distinguishing h^{-1} from h^{-1}|ln h| over one decade of h is intrinsically
marginal, so near-ties are reported as ambiguous rather than forced.
"""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import ConfigurationError

CONVERGED = "converged"
LOWER_BOUND = "lower_bound"


class Model(str, Enum):
    POWER_LAW = "PowerLaw"
    LOG_ENHANCED = "LogEnhanced"
    EXPONENTIAL = "Exponential"


# tie-breaking order: prefer the least divergent model
_DIVERGENCE_ORDER = {Model.POWER_LAW: 0, Model.LOG_ENHANCED: 1, Model.EXPONENTIAL: 2}


@dataclass(frozen=True)
class ScalingSeries:
    """(h, sup-norm) pairs with h strictly decreasing and a provenance tag each."""

    h: tuple
    values: tuple
    provenance: tuple = ()

    def __post_init__(self):
        h = tuple(float(v) for v in self.h)
        values = tuple(float(v) for v in self.values)
        prov = tuple(self.provenance) if self.provenance else tuple(CONVERGED for _ in h)
        if len(h) != len(values) or len(h) != len(prov):
            raise ConfigurationError("h, values and provenance must have equal length")
        if len(h) < 4:
            raise ConfigurationError("scaling series needs at least 4 pairs")
        if not all(a > b for a, b in zip(h, h[1:])):
            raise ConfigurationError("h must be strictly decreasing")
        if not all(v > 0 for v in values):
            raise ConfigurationError("all values must be positive")
        bad = [p for p in prov if p not in (CONVERGED, LOWER_BOUND)]
        if bad:
            raise ConfigurationError(f"unknown provenance tags {bad}")
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "provenance", prov)

    @property
    def has_lower_bounds(self) -> bool:
        return LOWER_BOUND in self.provenance


@dataclass
class ModelFit:
    model: Model
    params: dict
    residual: float              # rms in the fitted coordinates
    normalized_residual: float   # rms / std of the transformed ordinate
    selected: bool = False
    ambiguous: bool = False

    def predict(self, h):
        h = np.asarray(h, dtype=float)
        p = self.params
        if self.model is Model.POWER_LAW:
            return p["C"] * h ** p["p"]
        if self.model is Model.LOG_ENHANCED:
            return (p["C"] * np.abs(np.log(h)) + p["b"]) / h
        return p["C"] * np.exp(p["nu"] / h)


def _linear_fit(abscissa, ordinate):
    A = np.column_stack([np.ones_like(abscissa), abscissa])
    coef, *_ = np.linalg.lstsq(A, ordinate, rcond=None)
    resid = ordinate - A @ coef
    rms = float(np.sqrt(np.mean(resid ** 2)))
    std = float(np.std(ordinate))
    if std < 1e-300:
        nresid = 0.0 if rms <= 1e-12 else float("inf")
    else:
        nresid = rms / std
    return coef[0], coef[1], rms, nresid


def fit_power(series: ScalingSeries) -> ModelFit:
    """Least squares of ln(value) against ln(h)."""
    h = np.array(series.h)
    v = np.array(series.values)
    intercept, slope, rms, nresid = _linear_fit(np.log(h), np.log(v))
    return ModelFit(Model.POWER_LAW, {"C": float(np.exp(intercept)), "p": float(slope)},
                    rms, nresid)


def fit_log_enhanced(series: ScalingSeries) -> ModelFit:
    """Least squares of value*h = C |ln h| + b."""
    h = np.array(series.h)
    v = np.array(series.values)
    intercept, slope, rms, nresid = _linear_fit(np.abs(np.log(h)), v * h)
    return ModelFit(Model.LOG_ENHANCED, {"C": float(slope), "b": float(intercept)},
                    rms, nresid)


def fit_exponential(series: ScalingSeries) -> ModelFit:
    """Least squares of ln(value) against 1/h."""
    h = np.array(series.h)
    v = np.array(series.values)
    intercept, slope, rms, nresid = _linear_fit(1.0 / h, np.log(v))
    return ModelFit(Model.EXPONENTIAL, {"C": float(np.exp(intercept)), "nu": float(slope)},
                    rms, nresid)


@dataclass
class ClassificationResult:
    fits: list
    selected: ModelFit
    ambiguous: bool
    note: str = ""


def classify(series: ScalingSeries) -> ClassificationResult:
    """Select the growth class with the smallest normalized residual.

    Ties within 10% are resolved in favor of the less divergent model and
    flagged ambiguous.  Lower-bound-only points restrict the verdict: the
    power law cannot be selected if a lower-bound point exceeds its fit.
    """
    if len(series.h) < 5:
        raise ConfigurationError("classification needs at least 5 pairs")
    fits = [fit_power(series), fit_log_enhanced(series), fit_exponential(series)]
    order = sorted(fits, key=lambda f: (f.normalized_residual, _DIVERGENCE_ORDER[f.model]))
    best = order[0]
    ambiguous = False
    runner = order[1]
    # absolute epsilon makes exact fits tie (noiseless data can satisfy two models)
    if runner.normalized_residual <= 1.1 * best.normalized_residual + 1e-12:
        ambiguous = True
        pair = sorted([best, runner], key=lambda f: _DIVERGENCE_ORDER[f.model])
        best = pair[0]

    note = ""
    if series.has_lower_bounds and best.model is Model.POWER_LAW:
        h = np.array(series.h)
        v = np.array(series.values)
        lb = np.array([p == LOWER_BOUND for p in series.provenance])
        pred = best.predict(h)
        # "exceeds the fit": above the fitted curve beyond its own log scatter
        margin = np.exp(2.0 * best.residual + 0.05)
        if np.any(v[lb] > pred[lb] * margin):
            candidates = [f for f in order if f.model is not Model.POWER_LAW]
            best = candidates[0]
            note = ("power law excluded: lower-bound-only points exceed its fit; "
                    "classification is an 'at least' verdict")

    for f in fits:
        f.selected = f.model is best.model
        f.ambiguous = ambiguous
    return ClassificationResult(fits, best, ambiguous, note)
