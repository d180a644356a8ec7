"""Annual exceedance curves H(im), their densities, and power-law calibration.

Three variants are supported:

* :class:`PulseLognormal` -- Poisson pulses of rate ``eta`` with lognormal
  intensity, ``H(im) = eta * (1 - F_S(im))``.
* :class:`PowerLaw` -- ``H(im) = k0 * im**-k`` above a floor ``im_min``.
* :class:`Tabulated` -- knots interpolated linearly in (ln im, ln H).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import numpy as np
from scipy import optimize

from .errors import CalibrationError, DomainError, ExtrapolationError, HazardTableError
from .probcore import LognormalSpec, lognormal_pdf, lognormal_sf

# Poisson-consistent annual rate of the 2%-in-50-years intensity.
ANCHOR_2_IN_50 = -math.log(0.98) / 50.0

# Default power-law floor: where the curve reaches this many events per year.
IM_MIN_RATE = 10.0


def _positive(im):
    arr = np.asarray(im, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError("intensity must be positive")
    return arr


def _ret(im, out):
    return float(out) if np.ndim(im) == 0 else out


@dataclass(frozen=True)
class PulseLognormal:
    eta: float
    intensity: LognormalSpec

    def __post_init__(self):
        if not self.eta >= 0:
            raise DomainError("eta must be non-negative")

    @property
    def domain(self):
        return (0.0, math.inf)

    def exceedance(self, im):
        arr = _positive(im)
        return _ret(im, self.eta * lognormal_sf(self.intensity, arr))

    def density(self, im):
        arr = _positive(im)
        return _ret(im, self.eta * lognormal_pdf(self.intensity, arr))


@dataclass(frozen=True)
class PowerLaw:
    """``H(im) = k0 * im**-k`` for ``im >= im_min``.

    ``im_min`` defaults to the intensity where H equals ``IM_MIN_RATE``
    events per year, which keeps rate integrals finite.
    """

    k0: float
    k: float
    im_min: float | None = None

    def __post_init__(self):
        if not (self.k0 > 0 and self.k > 0):
            raise DomainError("k0 and k must be positive")
        if self.im_min is None:
            object.__setattr__(self, "im_min", (self.k0 / IM_MIN_RATE) ** (1.0 / self.k))
        elif not self.im_min > 0:
            raise DomainError("im_min must be positive")

    @property
    def domain(self):
        return (self.im_min, math.inf)

    def _check(self, im):
        arr = _positive(im)
        if np.any(arr < self.im_min * (1 - 1e-12)):
            raise DomainError(f"intensity below power-law floor im_min={self.im_min:.6g}")
        return arr

    def exceedance(self, im):
        arr = self._check(im)
        return _ret(im, self.k0 * arr ** (-self.k))

    def density(self, im):
        arr = self._check(im)
        return _ret(im, self.k0 * self.k * arr ** (-self.k - 1.0))


@dataclass(frozen=True)
class Tabulated:
    """Hazard curve given at knots; log-log linear between them.

    Queries outside ``[im[0], im[-1]]`` raise unless ``extrapolate`` is set,
    in which case the terminal log-log slopes are extended.
    """

    im: tuple
    H: tuple
    extrapolate: bool = False
    _log_im: np.ndarray = field(init=False, repr=False, compare=False)
    _log_h: np.ndarray = field(init=False, repr=False, compare=False)
    _slopes: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        im = np.asarray(self.im, dtype=float)
        h = np.asarray(self.H, dtype=float)
        if im.ndim != 1 or im.shape != h.shape or im.size < 2:
            raise DomainError("a tabulated curve needs at least two (im, H) knots")
        if np.any(im <= 0) or np.any(h <= 0):
            raise DomainError("knots must have positive im and H")
        if np.any(np.diff(im) <= 0):
            raise DomainError("im must be strictly increasing")
        if np.any(np.diff(h) >= 0):
            raise DomainError("H must be strictly decreasing")
        object.__setattr__(self, "im", tuple(im.tolist()))
        object.__setattr__(self, "H", tuple(h.tolist()))
        object.__setattr__(self, "_log_im", np.log(im))
        object.__setattr__(self, "_log_h", np.log(h))
        object.__setattr__(self, "_slopes", np.diff(np.log(h)) / np.diff(np.log(im)))

    @classmethod
    def from_csv(cls, path, extrapolate=False):
        """Read a curve from a CSV file with header ``im,H`` (g, 1/year)."""
        path = Path(path)
        with path.open(newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header is None or [c.strip() for c in header] != ["im", "H"]:
                raise HazardTableError(f"{path}: row 1: expected header 'im,H', got {header!r}")
            ims, hs = [], []
            for row_no, row in enumerate(reader, start=2):
                if not row or all(not c.strip() for c in row):
                    continue
                if len(row) != 2:
                    raise HazardTableError(f"{path}: row {row_no}: expected 2 columns, got {len(row)}")
                try:
                    im_v, h_v = float(row[0]), float(row[1])
                except ValueError:
                    raise HazardTableError(f"{path}: row {row_no}: non-numeric value {row!r}") from None
                if not (im_v > 0 and h_v > 0 and math.isfinite(im_v) and math.isfinite(h_v)):
                    raise HazardTableError(f"{path}: row {row_no}: im and H must be positive")
                if ims and im_v <= ims[-1]:
                    raise HazardTableError(f"{path}: row {row_no}: im not strictly increasing")
                if hs and h_v >= hs[-1]:
                    raise HazardTableError(f"{path}: row {row_no}: H not strictly decreasing")
                ims.append(im_v)
                hs.append(h_v)
        if len(ims) < 2:
            raise HazardTableError(f"{path}: need at least two data rows")
        return cls(tuple(ims), tuple(hs), extrapolate)

    @property
    def domain(self):
        if self.extrapolate:
            return (0.0, math.inf)
        return (self.im[0], self.im[-1])

    def _segment(self, log_im):
        lo, hi = self._log_im[0], self._log_im[-1]
        tol = 1e-12 * max(1.0, abs(lo), abs(hi))
        if not self.extrapolate and (np.any(log_im < lo - tol) or np.any(log_im > hi + tol)):
            raise ExtrapolationError(
                f"intensity outside tabulated span [{self.im[0]:.6g}, {self.im[-1]:.6g}]"
            )
        # right-continuous segment index, last knot belongs to the last segment
        return np.clip(np.searchsorted(self._log_im, log_im, side="right") - 1, 0, len(self._slopes) - 1)

    def _interp(self, log_im, seg):
        # anchored at a knot value so every knot is reproduced exactly
        anchor = np.where(log_im >= self._log_im[-1], len(self.im) - 1, seg)
        return np.asarray(self.H)[anchor] * np.exp(self._slopes[seg] * (log_im - self._log_im[anchor]))

    def exceedance(self, im):
        log_im = np.log(_positive(im))
        seg = self._segment(log_im)
        return _ret(im, self._interp(log_im, seg))

    def density(self, im):
        arr = _positive(im)
        log_im = np.log(arr)
        seg = self._segment(log_im)
        return _ret(im, -self._slopes[seg] * self._interp(log_im, seg) / arr)


HazardModel = Union[PulseLognormal, PowerLaw, Tabulated]


def exceedance(model: HazardModel, im):
    """Annual rate of events with intensity at least ``im``."""
    return model.exceedance(im)


def density(model: HazardModel, im):
    """Hazard density ``|dH/dim|`` in 1/(year g)."""
    return model.density(im)


# -- calibration --------------------------------------------------------------


@dataclass(frozen=True)
class PointConstraint:
    """Require ``H(im) == rate``."""

    im: float
    rate: float


@dataclass(frozen=True)
class RateConstraint:
    """Require the annual failure rate of ``capacity`` under the hazard to equal ``rate``."""

    capacity: LognormalSpec
    rate: float


Constraint = Union[PointConstraint, RateConstraint]

# slope search range and the preferred slope when several roots exist
K_BRACKET = (0.05, 25.0)
K_REFERENCE = 3.0


def _constraint_value(c: Constraint, model: PowerLaw, q):
    if isinstance(c, PointConstraint):
        return model.exceedance(c.im)
    from .riskengine import annual_rate

    return annual_rate(c.capacity, model, q)


def calibrate_power_law(constraints, q=None, k_reference=K_REFERENCE, max_iter=200) -> PowerLaw:
    """Fit ``(k0, k)`` of a power-law hazard to two constraints.

    Both constraint kinds scale linearly with ``k0``, so the slope is first
    bracketed from the ratio of the two constraints. When the ratio has
    several roots, the one nearest ``k_reference`` is kept. The pair is then
    polished by a 2-D root solve on the log residuals of the full model,
    including the default ``im_min`` floor.
    """
    from .riskengine import QuadratureSettings

    q = q or QuadratureSettings()
    constraints = list(constraints)
    if len(constraints) != 2:
        raise DomainError("exactly two constraints are required")
    for c in constraints:
        if not c.rate > 0:
            raise DomainError("constraint rates must be positive")
    # order invariance: a canonical ordering
    constraints.sort(key=lambda c: (isinstance(c, RateConstraint), repr(c)))
    c1, c2 = constraints
    target = math.log(c1.rate / c2.rate)

    def unit(k):
        # floor far below any capacity so the k0 scaling is exact
        return PowerLaw(1.0, k, im_min=1e-300)

    def ratio_residual(k):
        m = unit(k)
        try:
            return math.log(_constraint_value(c1, m, q) / _constraint_value(c2, m, q)) - target
        except (ValueError, ArithmeticError):
            return math.nan

    ks = np.geomspace(*K_BRACKET, 121)
    with np.errstate(over="ignore", invalid="ignore"):
        # very steep trial slopes may overflow; those nodes are skipped
        vals = np.array([ratio_residual(k) for k in ks])
    roots = []
    for i in range(len(ks) - 1):
        if not (np.isfinite(vals[i]) and np.isfinite(vals[i + 1])):
            continue
        if vals[i] == 0.0:
            roots.append(ks[i])
        elif np.sign(vals[i]) != np.sign(vals[i + 1]):
            roots.append(optimize.brentq(ratio_residual, ks[i], ks[i + 1], xtol=1e-14, rtol=1e-14, maxiter=max_iter))
    if not roots:
        finite = np.abs(vals[np.isfinite(vals)])
        raise CalibrationError("no power-law slope satisfies both constraints",
                               float(finite.min()) if finite.size else math.inf)
    k = min(roots, key=lambda r: (abs(r - k_reference), r))
    k0 = c1.rate / _constraint_value(c1, unit(k), q)

    def residual(p):
        try:
            model = PowerLaw(math.exp(p[0]), p[1])
            return [math.log(_constraint_value(c, model, q) / c.rate) for c in (c1, c2)]
        except (ValueError, ArithmeticError):
            # steers the solver back from invalid or overflowing trial points
            return [1e6, 1e6]

    with np.errstate(over="ignore", invalid="ignore"):
        sol = optimize.root(residual, [math.log(k0), k], method="hybr",
                            options={"maxfev": max_iter, "xtol": 1e-13})
    best = float(np.max(np.abs(residual(sol.x))))
    if not sol.success and best > 1e-8:
        raise CalibrationError(f"2-D calibration did not converge: {sol.message}", best)
    if best > 1e-7:
        raise CalibrationError("calibrated curve misses its targets", best)
    return PowerLaw(math.exp(sol.x[0]), float(sol.x[1]))
