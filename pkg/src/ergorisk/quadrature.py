"""Fixed-grid composite Simpson integration with a nested refinement check."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError


@dataclass(frozen=True)
class QuadratureSettings:
    """Grid sizes for the outer (system factor) and inner (intensity) integrals.

    Node counts must be odd. Counts of the form 4m + 1 keep the nested
    half grid used for the refinement check a pure Simpson grid.
    """

    u_span: float = 8.0
    n_outer: int = 401
    n_inner: int = 2001
    rel_tol: float = 1e-6

    def __post_init__(self):
        if not self.u_span > 0:
            raise DomainError("u_span must be positive")
        for name in ("n_outer", "n_inner"):
            n = getattr(self, name)
            if n < 3 or n % 2 == 0:
                raise DomainError(f"{name} must be odd and >= 3, got {n}")
        if not self.rel_tol > 0:
            raise DomainError("rel_tol must be positive")

    def refined(self) -> "QuadratureSettings":
        """Settings with every interval halved (n -> 2n - 1)."""
        return QuadratureSettings(self.u_span, 2 * self.n_outer - 1, 2 * self.n_inner - 1, self.rel_tol)


def simpson_weights(n: int) -> np.ndarray:
    """Composite Simpson weights for ``n`` (odd) equally spaced nodes, unit spacing."""
    w = np.ones(n)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w / 3.0


def simpson(values, dx, axis=-1):
    """Composite Simpson rule along ``axis``; ``dx`` may broadcast against the result."""
    values = np.moveaxis(np.asarray(values, dtype=float), axis, -1)
    return (values @ simpson_weights(values.shape[-1])) * dx


def simpson_checked(values, dx, rel_tol, name, atol=0.0):
    """Simpson integral with a comparison against the nested half grid.

    Returns the fine-grid value. Raises ConvergenceError when the two
    estimates disagree by more than ``rel_tol`` relative (plus ``atol``).
    """
    values = np.asarray(values, dtype=float)
    fine = simpson(values, dx)
    if values.shape[-1] < 5:
        return fine
    coarse = simpson(values[..., ::2], 2 * np.asarray(dx))
    diff = np.abs(fine - coarse)
    scale = np.abs(fine)
    bad = diff > rel_tol * scale + atol
    if np.any(bad):
        with np.errstate(divide="ignore", invalid="ignore"):
            resid = np.where(scale > 0, diff / scale, diff)
        raise ConvergenceError(name, float(np.max(resid[bad] if np.ndim(bad) else resid)), rel_tol)
    return fine
