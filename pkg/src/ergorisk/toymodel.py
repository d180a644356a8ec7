"""Closed-form pulse-load toy problem and its error sweeps.

Pulses arrive at rate ``eta`` with lognormal intensity ``S``; the capacity
is ``X * Y`` with ``X`` renewed at every pulse and ``Y`` fixed per
structure. Failure at a pulse means ``x * y / s - 1 <= 0``.

Two conventions are provided for the closed-form rates:

``"printed"`` (default)
    ``eta * Phi(-beta) * (1 - Phi(-beta))``, the form with an extra
    survival factor.
``"plain"``
    ``eta * Phi(-beta)``, the rate of failing pulses.

The brute-force simulator in :mod:`ergorisk.pulse_oracle` follows the
``"plain"`` process; :func:`convention_gap` quantifies the difference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError
from .hazard import PulseLognormal
from .probcore import LognormalSpec, std_normal_cdf, std_normal_pdf
from .quadrature import QuadratureSettings, simpson_checked
from .riskengine import err_pct_pf, lifetime_from_rate

CONVENTIONS = ("printed", "plain")


@dataclass(frozen=True)
class ToyProblem:
    eta: float = 1e-2
    s: LognormalSpec = LognormalSpec(1.0, 1.0)
    x: LognormalSpec = LognormalSpec(4.0, 0.4)
    y: LognormalSpec = LognormalSpec(0.85, 0.4)

    def __post_init__(self):
        if not self.eta >= 0:
            raise DomainError("eta must be non-negative")

    def with_sigma_y(self, sigma):
        return replace(self, y=LognormalSpec(self.y.median, sigma))

    @property
    def hazard(self) -> PulseLognormal:
        """The same load process expressed as a hazard curve."""
        return PulseLognormal(self.eta, self.s)


# the three hazard/capacity variants compared in the error study, plus the reference
TOY_CASES = {
    "ref": ToyProblem(),
    "a": ToyProblem(s=LognormalSpec(1.0, 1.0), y=LognormalSpec(0.85, 0.4)),
    "b": ToyProblem(s=LognormalSpec(1.0, 1.0), y=LognormalSpec(0.85, 0.2)),
    "c": ToyProblem(s=LognormalSpec(2.0, 1.0), y=LognormalSpec(0.85, 0.2)),
}


def limit_state(s, x, y):
    """``x * y / s - 1``; failure when non-positive."""
    return x * y / s - 1.0


def beta_xy(p: ToyProblem) -> float:
    denom = math.sqrt(p.x.dispersion**2 + p.y.dispersion**2 + p.s.dispersion**2)
    if denom == 0:
        raise DomainError("all dispersions are zero")
    return (p.x.log_mean + p.y.log_mean - p.s.log_mean) / denom


def beta_x(p: ToyProblem, y_value):
    denom = math.sqrt(p.x.dispersion**2 + p.s.dispersion**2)
    if denom == 0:
        raise DomainError("record-to-record and load dispersions are both zero")
    y = np.asarray(y_value, dtype=float)
    if np.any(~(y > 0)):
        raise DomainError("y_value must be positive")
    out = (p.x.log_mean + np.log(y) - p.s.log_mean) / denom
    return float(out) if np.ndim(y_value) == 0 else out


def _rate_from_beta(eta, beta, convention):
    pfail = std_normal_cdf(-np.asarray(beta))
    if convention == "printed":
        return eta * pfail * (1.0 - pfail)
    if convention == "plain":
        return eta * pfail
    raise DomainError(f"unknown convention {convention!r}; expected one of {CONVENTIONS}")


def toy_ensemble_rate(p: ToyProblem, convention: str = "printed") -> float:
    """Closed-form rate with the system factor folded into the capacity."""
    return float(_rate_from_beta(p.eta, beta_xy(p), convention))


def toy_conditional_rate(p: ToyProblem, y_value, convention: str = "printed"):
    """Closed-form rate for a fixed realisation of the system factor."""
    out = _rate_from_beta(p.eta, beta_x(p, y_value), convention)
    return float(out) if np.ndim(y_value) == 0 else out


def toy_exact_pf(p: ToyProblem, t_D: float, q: QuadratureSettings | None = None, convention: str = "printed") -> float:
    """Lifetime probability averaging the conditional rate over Y outside time."""
    if not t_D > 0:
        raise DomainError("t_D must be positive")
    q = q or QuadratureSettings()
    if p.y.is_degenerate:
        return lifetime_from_rate(toy_conditional_rate(p, p.y.median, convention), t_D)
    u = np.linspace(-q.u_span, q.u_span, q.n_outer)
    rates = toy_conditional_rate(p, p.y.median * np.exp(p.y.dispersion * u), convention)
    integrand = -np.expm1(-rates * t_D) * std_normal_pdf(u)
    return float(simpson_checked(integrand, u[1] - u[0], q.rel_tol, "toy lifetime probability", atol=1e-300))


def toy_ensemble_pf(p: ToyProblem, t_D: float, convention: str = "printed") -> float:
    return lifetime_from_rate(toy_ensemble_rate(p, convention), t_D)


def convention_gap(p: ToyProblem) -> float:
    """Relative shortfall of the printed ensemble rate against the plain one.

    Equals ``Phi(-beta_xy)``.
    """
    plain = toy_ensemble_rate(p, "plain")
    return (plain - toy_ensemble_rate(p, "printed")) / plain


def toy_error_sweep(p: ToyProblem, axis: str, grid, t_D: float = 50.0, q=None, convention: str = "printed"):
    """Rows of ``(axis value, pf_exact, pf_ensemble, err_pct)``.

    ``axis`` is ``"sigma_lnY"`` (grid of Y dispersions at lifetime ``t_D``)
    or ``"t_D"`` (grid of lifetimes).
    """
    q = q or QuadratureSettings()
    rows = []
    for value in grid:
        value = float(value)
        if axis == "sigma_lnY":
            prob, t = p.with_sigma_y(value), t_D
        elif axis == "t_D":
            prob, t = p, value
        else:
            raise DomainError(f"unknown sweep axis {axis!r}")
        exact = toy_exact_pf(prob, t, q, convention)
        ens = toy_ensemble_pf(prob, t, convention)
        err = 0.0 if prob.y.is_degenerate else err_pct_pf(ens, exact)
        rows.append((value, exact, ens, err))
    return rows
