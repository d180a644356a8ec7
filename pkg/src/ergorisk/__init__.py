"""Annual failure rates and lifetime failure probabilities with non-ergodic capacity scatter."""

from .errors import (
    CalibrationError,
    ConvergenceError,
    DispersionDeficitError,
    DomainError,
    ExtrapolationError,
    HazardTableError,
)
from .fragility import Decomposition, FragilityCurve, compose, conditional_capacity, decompose
from .hazard import PowerLaw, PulseLognormal, Tabulated, calibrate_power_law
from .probcore import LognormalSpec
from .quadrature import QuadratureSettings
from .riskengine import RiskReport, annual_rate, assess, lifetime_exact, lifetime_from_rate

__version__ = "0.1.0"
