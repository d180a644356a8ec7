"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class DispersionDeficitError(DomainError):
    """Total dispersion is smaller than the record-to-record dispersion."""


class ExtrapolationError(DomainError):
    """A tabulated hazard curve was queried outside its span."""


class HazardTableError(ValueError):
    """A hazard-curve CSV file is malformed."""


class ConvergenceError(ArithmeticError):
    """A fixed-grid integral failed its refinement check.

    Attributes
    ----------
    integral : str
        Name of the integral that failed.
    residual : float
        Relative change between the fine and the nested coarse grid.
    """

    def __init__(self, integral, residual, tol):
        self.integral = integral
        self.residual = residual
        self.tol = tol
        super().__init__(
            f"{integral}: refinement residual {residual:.3e} exceeds tolerance {tol:.1e}"
        )


class CalibrationError(ArithmeticError):
    """Hazard calibration found no root; carries the best residual reached."""

    def __init__(self, message, best_residual):
        self.best_residual = best_residual
        super().__init__(f"{message} (best residual {best_residual:.3e})")
