"""
Exception hierarchy for the Zeeman cavity simulator.

Argument-level failures also derive from ValueError so callers that only
catch ValueError keep working.
"""


class ZeemanCavityError(Exception):
    """Base class for all simulator errors."""


class InvalidAtomLevelError(ZeemanCavityError, ValueError):
    """Magnetic quantum number outside {-1, 0, +1} or bad atom index."""


class EmptySectorError(ZeemanCavityError, ValueError):
    """Requested conserved number has no basis states (N < -2)."""


class NonHermitianError(ZeemanCavityError, ValueError):
    """An operator expected to be Hermitian is not."""


class OffResonanceError(ZeemanCavityError, ValueError):
    """Resonant-only construction requested with omega != beta."""


class NormalizationError(ZeemanCavityError, ValueError):
    """State or coefficient vector is not unit norm."""


class BasisMismatchError(ZeemanCavityError, ValueError):
    """Two objects are expressed over different bases."""


class SectorSupportError(ZeemanCavityError, ValueError):
    """State has amplitude outside the sectors an operation accepts."""


class InvalidSubsystemError(ZeemanCavityError, ValueError):
    """Subsystem selector or bipartition does not match the basis."""


class ConfigError(ZeemanCavityError, ValueError):
    """Run configuration failed validation."""

    def __init__(self, field: str, message: str, line: int = None):
        self.field = field
        self.reason = message
        self.line = line
        location = f"line {line}, " if line is not None else ""
        super().__init__(f"{location}field '{field}': {message}")


class ToleranceError(ZeemanCavityError):
    """A closed-form reference disagreed with the numeric oracle."""

    def __init__(self, message: str, max_error: float, tolerance: float):
        self.max_error = max_error
        self.tolerance = tolerance
        super().__init__(f"{message}: max error {max_error:.3e} exceeds {tolerance:.1e}")
