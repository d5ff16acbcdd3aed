"""Exception types."""


class SlabLensError(Exception):
    """Base class for library errors."""


class PassivityError(SlabLensError, ValueError):
    """Material with negative imaginary permittivity or permeability."""


class RegionError(SlabLensError, ValueError):
    """Observation point or geometry outside a formula's stated validity."""


class CalibrationError(SlabLensError, ValueError):
    """Parameters outside the calibrated range of a numerical scheme."""


class ConfigError(SlabLensError, ValueError):
    """Invalid run configuration."""


class ConvergenceError(SlabLensError, RuntimeError):
    """Quadrature failed to reach its tolerance; carries the last estimate."""

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class NonFiniteError(SlabLensError, FloatingPointError):
    """Non-finite integrand value."""
