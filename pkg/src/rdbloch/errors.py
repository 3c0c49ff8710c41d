class RDBlochError(Exception):
    """Base class for library errors."""


class GridError(RDBlochError, ValueError):
    """Bad sample grid: non power-of-two length, non-finite values, malformed input."""


class ResolutionError(RDBlochError, ValueError):
    """A truncation asks for Fourier content the sampled function does not resolve."""


class BrillouinZoneError(RDBlochError, ValueError):
    """Bloch wavenumber outside [-kappa/2, kappa/2]."""


class ConvergenceError(RDBlochError, RuntimeError):
    """Iteration cap reached (QL sweeps, truncation doubling, bracket search)."""


class HermiticityError(RDBlochError, ValueError):
    pass


class PreconditionError(RDBlochError, ValueError):
    """Inputs outside the domain where a diagnostic or formula applies."""


class SeriesValidityError(RDBlochError, ValueError):
    """Truncated series evaluated outside its range of validity."""


class BlowUpError(RDBlochError, FloatingPointError):
    """Simulation produced non-finite values."""

    def __init__(self, t: float, x: float, message: str | None = None):
        self.t = t
        self.x = x
        super().__init__(message or f"non-finite field at t={t:.6g}, x={x:.6g}")


class InsufficientRangeError(RDBlochError, RuntimeError):
    """Decay-rate fit attempted on too small a change in norm."""
