"""Annual failure rates, lifetime failure probabilities and error diagnostics.

Two pipelines are compared throughout:

* *ensemble*: the system factor Y is folded into the fragility, the annual
  rate of the composed capacity is computed once and then integrated in
  time as if crossings were independent;
* *exact*: the rate is computed conditionally on each Y = y, integrated in
  time, and only then averaged over Y.

All rates are constant in time. Integrals are fixed-grid composite Simpson
rules with a nested-grid refinement check, so outputs are deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .fragility import compose, conditional_capacity
from .hazard import HazardModel
from .probcore import LognormalSpec, lognormal_cdf, std_normal_cdf, std_normal_pdf
from .quadrature import QuadratureSettings, simpson_checked

__all__ = [
    "QuadratureSettings",
    "RiskReport",
    "annual_rate",
    "annual_rate_convolution",
    "conditional_rate",
    "lifetime_exact",
    "lifetime_from_rate",
    "back_calc_rate",
    "err_pct_pf",
    "err_pct_lambda",
    "error_parameter",
    "pf_variance_product",
    "assess",
]

# Absolute floor for refinement checks on rates (1/year); far below any use.
_RATE_ATOL = 1e-300
# cap on the slope-driven extension of the lower integration limit, in dispersions
MAX_PEAK_SHIFT = 40.0


@dataclass(frozen=True)
class RiskReport:
    t_D: float
    lambda_rtr: float
    lambda_ensemble: float
    lambda_exact: float
    pf_rtr: float
    pf_exact: float
    pf_ensemble: float
    err_pct_pf: float
    err_pct_lambda: float
    error_parameter: float
    var_product: float

    @property
    def ratio_pf(self) -> float:
        """Exact over record-to-record-only lifetime probability."""
        return self.pf_exact / self.pf_rtr if self.pf_rtr > 0 else math.nan

    @property
    def ratio_lambda(self) -> float:
        return self.lambda_exact / self.lambda_rtr if self.lambda_rtr > 0 else math.nan

    def as_dict(self) -> dict:
        d = {f: getattr(self, f) for f in self.__dataclass_fields__}
        d["ratio_pf"] = self.ratio_pf
        d["ratio_lambda"] = self.ratio_lambda
        return d


def _domain_log_bounds(hazard):
    lo, hi = hazard.domain
    return (math.log(lo) if lo > 0 else -math.inf, math.log(hi) if math.isfinite(hi) else math.inf)


def _rates(medians, dispersion, hazard, q, name="annual rate"):
    """Annual rates for lognormal capacities sharing one dispersion.

    For each median m the rate is ``F(a) H(a) + int_a^b f(im) H(im) dim``
    on ``ln im`` in ``ln m +- u_span * dispersion`` clipped to the hazard
    domain ``[a, b]``; the lower end is pushed further down by the local
    log-slope of H so steep curves keep their peak inside the window. The boundary term accounts for events above a
    truncated lower limit; it is ~1e-15 relative when nothing is clipped.
    Events above a finite upper domain end are lumped at that end.
    """
    medians = np.atleast_1d(np.asarray(medians, dtype=float))
    dom_lo, dom_hi = _domain_log_bounds(hazard)
    log_m = np.log(medians)

    if dispersion == 0.0:
        point = np.exp(np.clip(log_m, dom_lo, dom_hi))
        at_or_above = point >= medians * (1 - 1e-15)
        return np.where(at_or_above, hazard.exceedance(point), 0.0)

    half = q.u_span * dispersion
    # H rising as im**-s moves the peak of f*H down by s*dispersion**2 in ln im
    probe = np.exp(np.clip(log_m, dom_lo, dom_hi))
    h_at = hazard.exceedance(probe)
    with np.errstate(divide="ignore", invalid="ignore"):
        slope = np.where(h_at > 0, probe * hazard.density(probe) / h_at, 0.0)
    shift = np.clip(slope * dispersion, 0.0, MAX_PEAK_SHIFT) * dispersion
    a = np.maximum(log_m - half - shift, dom_lo)
    b = np.minimum(log_m + half, dom_hi)
    empty = a >= b
    point = np.exp(np.minimum(a, dom_hi))
    boundary = std_normal_cdf((np.log(point) - log_m) / dispersion) * hazard.exceedance(point)

    out = boundary.copy()
    live = ~empty
    if np.any(live):
        t = np.linspace(0.0, 1.0, q.n_inner)
        am, bm = a[live], b[live]
        v = am[:, None] + (bm - am)[:, None] * t
        u = (v - log_m[live][:, None]) / dispersion
        # f(im) dim = phi(u) dv / dispersion on the ln-im grid
        integrand = std_normal_pdf(u) / dispersion * hazard.exceedance(np.exp(v))
        dv = (bm - am) / (q.n_inner - 1)
        out[live] += simpson_checked(integrand, dv, q.rel_tol, name, atol=_RATE_ATOL)
    return out


def annual_rate(capacity: LognormalSpec, hazard: HazardModel, q: QuadratureSettings | None = None) -> float:
    """Annual failure rate of a lognormal IM capacity under a hazard curve."""
    q = q or QuadratureSettings()
    return float(_rates([capacity.median], capacity.dispersion, hazard, q)[0])


def annual_rate_convolution(capacity: LognormalSpec, hazard: HazardModel, q: QuadratureSettings | None = None) -> float:
    """Same rate from the fragility-times-hazard-density form.

    Integrates ``F(im) h(im)`` over the same window and adds ``F(b) H(b)``
    for events above it. Kept separate from :func:`annual_rate` as a
    cross-check of the primary form.
    """
    q = q or QuadratureSettings()
    if capacity.is_degenerate:
        return annual_rate(capacity, hazard, q)
    dom_lo, dom_hi = _domain_log_bounds(hazard)
    half = q.u_span * capacity.dispersion
    a = max(capacity.log_mean - half, dom_lo)
    b = min(capacity.log_mean + half, dom_hi)
    if a >= b:
        return annual_rate(capacity, hazard, q)
    v = np.linspace(a, b, q.n_inner)
    im = np.exp(v)
    integrand = lognormal_cdf(capacity, im) * hazard.density(im) * im
    body = simpson_checked(integrand, (b - a) / (q.n_inner - 1), q.rel_tol, "convolution rate", atol=_RATE_ATOL)
    top = math.exp(b)
    return float(body + lognormal_cdf(capacity, top) * hazard.exceedance(top))


def conditional_rate(x: LognormalSpec, y_value: float, hazard: HazardModel, q: QuadratureSettings | None = None) -> float:
    """Annual rate given a fixed realisation ``y_value`` of the system factor."""
    return annual_rate(conditional_capacity(x, y_value), hazard, q)


def _outer_nodes(x, y, hazard, q):
    """Outer grid over Y: (weights incl. spacing and normal density, rates).

    Weights sum to ~1. A degenerate Y gives a single node of weight 1.
    """
    if y.is_degenerate:
        rate = conditional_rate(x, y.median, hazard, q)
        return np.ones(1), np.array([rate])
    u = np.linspace(-q.u_span, q.u_span, q.n_outer)
    yv = y.median * np.exp(y.dispersion * u)
    rates = _rates(x.median * yv, x.dispersion, hazard, q, name="conditional rate")
    du = u[1] - u[0]
    return std_normal_pdf(u) * du, rates


def _outer_mean(weights, values, q, name):
    if values.size == 1:
        return float(values[0])
    return float(simpson_checked(weights * values, 1.0, q.rel_tol, name, atol=1e-300))


def _pf_from_nodes(weights, rates, t_D, q):
    return _outer_mean(weights, -np.expm1(-rates * t_D), q, "lifetime probability")


def lifetime_exact(x: LognormalSpec, y: LognormalSpec, hazard: HazardModel, t_D: float, q: QuadratureSettings | None = None) -> float:
    """Lifetime failure probability with Y averaged outside the time integral."""
    if not t_D > 0:
        raise DomainError("t_D must be positive")
    q = q or QuadratureSettings()
    w, rates = _outer_nodes(x, y, hazard, q)
    return _pf_from_nodes(w, rates, t_D, q)


def lifetime_from_rate(rate: float, t_D: float) -> float:
    """Poisson first-passage probability for a constant rate."""
    if rate < 0 or t_D < 0:
        raise DomainError("rate and t_D must be non-negative")
    return -math.expm1(-rate * t_D)


def back_calc_rate(pf: float, t_D: float) -> float:
    """Constant annual rate that yields lifetime probability ``pf`` over ``t_D``."""
    if not 0 <= pf < 1:
        raise DomainError("pf must lie in [0, 1)")
    if not t_D > 0:
        raise DomainError("t_D must be positive")
    return -math.log1p(-pf) / t_D


def err_pct_pf(pf_ensemble: float, pf_exact: float) -> float:
    if pf_exact == 0:
        raise DomainError("exact probability is zero")
    return 100.0 * (pf_ensemble - pf_exact) / pf_exact


def err_pct_lambda(lambda_ensemble: float, lambda_exact: float) -> float:
    if lambda_exact == 0:
        raise DomainError("exact rate is zero")
    return 100.0 * (lambda_ensemble - lambda_exact) / lambda_exact


def error_parameter(x: LognormalSpec, y: LognormalSpec, margin: float) -> float:
    """Heuristic ensemble-error indicator ``((sY/sX)^2 + 1) / (margin/sX)``."""
    if x.dispersion == 0:
        raise DomainError("record-to-record dispersion must be positive")
    if not margin > 0:
        raise DomainError("margin must be positive")
    return ((y.dispersion / x.dispersion) ** 2 + 1.0) / (margin / x.dispersion)


def _var_product_from_nodes(weights, rates, t_D, q):
    if rates.size == 1:
        return 0.0
    p = -np.expm1(-rates * t_D)
    mean = _outer_mean(weights, p, q, "lifetime probability")
    second = _outer_mean(weights, p * p, q, "second moment of lifetime probability")
    return t_D * max(second - mean * mean, 0.0)


def pf_variance_product(x, y, hazard, t_D, q=None) -> float:
    """``t_D * Var_Y[p_f(Y, t_D)]``."""
    if not t_D > 0:
        raise DomainError("t_D must be positive")
    q = q or QuadratureSettings()
    w, rates = _outer_nodes(x, y, hazard, q)
    return _var_product_from_nodes(w, rates, t_D, q)


def assess(x: LognormalSpec, y: LognormalSpec, hazard: HazardModel, margin: float | None, t_D: float, q: QuadratureSettings | None = None) -> RiskReport:
    """Run both pipelines for one structure/hazard pair and lifetime ``t_D``.

    ``lambda_exact`` is back-calculated from the exact probability at one
    year. ``margin`` may be None, in which case ``error_parameter`` is NaN.
    """
    if not t_D > 0:
        raise DomainError("t_D must be positive")
    q = q or QuadratureSettings()
    lam_rtr = annual_rate(x, hazard, q)
    lam_ens = annual_rate(compose(x, y), hazard, q)
    w, rates = _outer_nodes(x, y, hazard, q)
    pf_exact = _pf_from_nodes(w, rates, t_D, q)
    pf_one = _pf_from_nodes(w, rates, 1.0, q)
    lam_exact = back_calc_rate(pf_one, 1.0)
    pf_ens = lifetime_from_rate(lam_ens, t_D)
    return RiskReport(
        t_D=float(t_D),
        lambda_rtr=lam_rtr,
        lambda_ensemble=lam_ens,
        lambda_exact=lam_exact,
        pf_rtr=lifetime_from_rate(lam_rtr, t_D),
        pf_exact=pf_exact,
        pf_ensemble=pf_ens,
        err_pct_pf=err_pct_pf(pf_ens, pf_exact) if pf_exact > 0 else math.nan,
        err_pct_lambda=err_pct_lambda(lam_ens, lam_exact) if lam_exact > 0 else math.nan,
        error_parameter=error_parameter(x, y, margin) if margin is not None and x.dispersion > 0 else math.nan,
        var_product=_var_product_from_nodes(w, rates, t_D, q),
    )
