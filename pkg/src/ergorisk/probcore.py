"""Normal and lognormal primitives.

All functions accept scalars or numpy arrays and return the same shape.
Medians are stored linearly; log-means are derived on demand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import DomainError

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class LognormalSpec:
    """Median and logarithmic standard deviation of a lognormal quantity.

    ``dispersion == 0`` is allowed and means a deterministic value.
    """

    median: float
    dispersion: float

    def __post_init__(self):
        if not (math.isfinite(self.median) and self.median > 0.0):
            raise DomainError(f"median must be positive and finite, got {self.median!r}")
        if not (math.isfinite(self.dispersion) and self.dispersion >= 0.0):
            raise DomainError(f"dispersion must be non-negative, got {self.dispersion!r}")

    @property
    def log_mean(self) -> float:
        return math.log(self.median)

    @property
    def is_degenerate(self) -> bool:
        return self.dispersion == 0.0


def _as_float(value, out):
    if np.ndim(out) == 0 and np.ndim(value) == 0:
        return float(out)
    return out


def std_normal_cdf(u):
    """Standard normal CDF, saturating to 0/1 in the far tails."""
    return _as_float(u, special.ndtr(u))


def std_normal_pdf(u):
    u = np.asarray(u, dtype=float)
    return _as_float(u, _INV_SQRT_2PI * np.exp(-0.5 * u * u))


def _check_positive(x, name="x"):
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0.0)):
        raise DomainError(f"{name} must be positive")
    return arr


def lognormal_cdf(spec: LognormalSpec, x):
    """P[V <= x] for V lognormal with the given spec."""
    arr = _check_positive(x)
    if spec.is_degenerate:
        return _as_float(x, np.where(arr >= spec.median, 1.0, 0.0))
    with np.errstate(over="ignore", divide="ignore"):
        u = (np.log(arr) - spec.log_mean) / spec.dispersion
    return _as_float(x, special.ndtr(u))


def lognormal_sf(spec: LognormalSpec, x):
    """P[V > x]; accurate far into the upper tail where ``1 - cdf`` cancels."""
    arr = _check_positive(x)
    if spec.is_degenerate:
        return _as_float(x, np.where(arr >= spec.median, 0.0, 1.0))
    with np.errstate(over="ignore", divide="ignore"):
        u = (np.log(arr) - spec.log_mean) / spec.dispersion
    return _as_float(x, special.ndtr(-u))


def lognormal_pdf(spec: LognormalSpec, x):
    arr = _check_positive(x)
    if spec.is_degenerate:
        raise DomainError("density of a deterministic factor is a Dirac mass")
    u = (np.log(arr) - spec.log_mean) / spec.dispersion
    return _as_float(x, _INV_SQRT_2PI * np.exp(-0.5 * u * u) / (spec.dispersion * arr))


def lognormal_quantile(spec: LognormalSpec, p):
    arr = np.asarray(p, dtype=float)
    if np.any(~((arr > 0.0) & (arr < 1.0))):
        raise DomainError("probability must lie strictly inside (0, 1)")
    return _as_float(p, spec.median * np.exp(spec.dispersion * special.ndtri(arr)))
