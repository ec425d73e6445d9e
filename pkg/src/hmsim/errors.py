"""Exception hierarchy shared across the package."""


class HmsimError(Exception):
    """Base class for all errors raised by this package."""


class GeometryError(HmsimError, ValueError):
    """A physical dimension or geometry invariant is violated."""


class BiasRangeError(HmsimError, ValueError):
    """A bias voltage falls outside the varactor's admissible range."""


class CalibrationError(HmsimError):
    """Geometry calibration could not bracket or reach the target frequency."""


class DivergenceError(HmsimError, ArithmeticError):
    """Sheet admittance diverges (exact resonance with zero loss)."""


class CoverageGapError(HmsimError, LookupError):
    """No table entry reaches the requested phase within tolerance."""

    def __init__(self, message: str, best_phase_rad: float):
        super().__init__(message)
        self.best_phase_rad = best_phase_rad


class ClippingError(HmsimError, ValueError):
    """A modulation waveform drives the bias outside the varactor range."""


class NyquistError(HmsimError, ValueError):
    """Requested harmonic order exceeds what the sampling rate supports."""


class OptimizationFailedError(HmsimError):
    """The genetic search ended with an all-zero-fitness population."""

    def __init__(self, message: str, history):
        super().__init__(message)
        self.history = history


class DegenerateGeometryError(HmsimError, ValueError):
    """A scene point lies on the surface plane; angles are undefined."""


class SearchFailedError(HmsimError):
    """Beam search found no user above the sensitivity threshold."""

    def __init__(self, message: str, best_attempt):
        super().__init__(message)
        self.best_attempt = best_attempt


class ConfigError(HmsimError, ValueError):
    """A scenario configuration file is invalid.

    ``line`` is the 1-based line number in the config file when the
    offending key could be located, else None.
    """

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message)
        self.line = line

    def __str__(self) -> str:
        base = super().__str__()
        if self.line is not None:
            return f"line {self.line}: {base}"
        return base


class SchemaError(HmsimError, ValueError):
    """Two result files being compared do not share a schema."""
