"""Lognormal fragility curves and the ergodic x non-ergodic capacity split.

The intensity-measure capacity is modelled as ``Z = X * Y`` where ``X``
carries record-to-record (ergodic) scatter and ``Y`` the system-parameter
(non-ergodic) scatter. With both factors lognormal, ``Z`` is lognormal too.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DispersionDeficitError, DomainError
from .probcore import LognormalSpec, lognormal_cdf, lognormal_pdf, std_normal_pdf
from .quadrature import QuadratureSettings, simpson_checked

# Table values are rounded to 2-3 digits; tiny negative variance deficits are noise.
DEFICIT_TOL = 1e-9


@dataclass(frozen=True)
class FragilityCurve:
    """P[limit state reached | IM = im] with a lognormal IM capacity (units g)."""

    capacity: LognormalSpec

    def evaluate(self, im):
        return lognormal_cdf(self.capacity, im)

    __call__ = evaluate


@dataclass(frozen=True)
class Decomposition:
    x: LognormalSpec
    y: LognormalSpec

    @property
    def z(self) -> LognormalSpec:
        return compose(self.x, self.y)


def compose(x: LognormalSpec, y: LognormalSpec) -> LognormalSpec:
    """Distribution of the product of two independent lognormals."""
    return LognormalSpec(x.median * y.median, math.hypot(x.dispersion, y.dispersion))


def decompose(z: LognormalSpec, x: LognormalSpec) -> LognormalSpec:
    """Recover the system factor ``Y`` from total ``Z`` and record-to-record ``X``.

    Raises
    ------
    DispersionDeficitError
        If ``z.dispersion < x.dispersion`` beyond rounding noise.
    """
    deficit = x.dispersion**2 - z.dispersion**2
    if deficit > DEFICIT_TOL:
        raise DispersionDeficitError(
            f"total dispersion {z.dispersion} is below record-to-record dispersion {x.dispersion}"
        )
    var_y = max(-deficit, 0.0)
    return LognormalSpec(z.median / x.median, math.sqrt(var_y))


def conditional_capacity(x: LognormalSpec, y_value: float) -> LognormalSpec:
    """Capacity ``X * y`` for a fixed realisation of the system factor."""
    if not y_value > 0:
        raise DomainError(f"y_value must be positive, got {y_value!r}")
    return LognormalSpec(x.median * y_value, x.dispersion)


def product_density_numeric(x: LognormalSpec, y: LognormalSpec, z_value, q: QuadratureSettings | None = None):
    """Density of ``X * Y`` at ``z_value`` by direct quadrature of the product integral.

    Integrates ``f_X(z / y') f_Y(y') / y'`` over ``y'`` with the substitution
    ``y' = median_Y * exp(dispersion_Y * u)``. Used to check the lognormal
    closure shortcut in :func:`compose`, so it never calls it.
    """
    q = q or QuadratureSettings()
    z = np.asarray(z_value, dtype=float)
    if np.any(~(z > 0)):
        raise DomainError("z_value must be positive")
    if x.is_degenerate and y.is_degenerate:
        raise DomainError("product of two deterministic factors has no density")
    if y.is_degenerate:
        return lognormal_pdf(x, z / y.median) / y.median
    if x.is_degenerate or y.dispersion > x.dispersion:
        # roles are symmetric; integrating over the narrower factor keeps the
        # integrand at least unit width in u
        return product_density_numeric(y, x, z_value, q)

    u = np.linspace(-q.u_span, q.u_span, q.n_outer)
    yp = y.median * np.exp(y.dispersion * u)
    integrand = lognormal_pdf(x, z[..., None] / yp) / yp * std_normal_pdf(u)
    du = u[1] - u[0]
    # far-tail values below 1e-6 of the density scale at z only need absolute accuracy
    scale = 1.0 / (z * math.hypot(x.dispersion, y.dispersion) * math.sqrt(2.0 * math.pi))
    out = simpson_checked(integrand, du, q.rel_tol, "product density", atol=q.rel_tol * 1e-6 * scale)
    return float(out) if np.ndim(z_value) == 0 else out
