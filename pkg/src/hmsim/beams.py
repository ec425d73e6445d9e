"""Far-field synthesis for the N-element surface.

Angles are measured from broadside (the surface normal), so 0 rad means
no phase gradient across the elements.  The array factor is normalized
by N: an ideal uniformly excited, perfectly steered array peaks at 1.
"""

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .constants import C_LIGHT
from .errors import GeometryError

Side = Literal["forward", "backward"]

DEFAULT_ELEMENT_COUNT = 20
DEFAULT_ANGLE_GRID_POINTS = 721  # 0.25 deg over [-90, 90]


@dataclass(frozen=True)
class ArrayLayout:
    """Uniform linear layout: element count, pitch and carrier wavelength."""

    n_elements: int
    pitch_m: float
    wavelength_m: float

    def __post_init__(self):
        if self.n_elements < 1:
            raise GeometryError("need at least one element")
        if self.pitch_m <= 0 or self.wavelength_m <= 0:
            raise GeometryError("pitch and wavelength must be positive")

    @property
    def wavenumber(self) -> float:
        return 2.0 * np.pi / self.wavelength_m

    @classmethod
    def for_frequency(
        cls,
        carrier_hz: float,
        n_elements: int = DEFAULT_ELEMENT_COUNT,
        pitch_m: float | None = None,
    ) -> "ArrayLayout":
        """Half-wavelength pitch unless told otherwise."""
        wavelength = C_LIGHT / carrier_hz
        return cls(n_elements, pitch_m if pitch_m is not None else wavelength / 2.0, wavelength)


@dataclass(frozen=True)
class ExcitationVector:
    """Per-element complex coefficients for one harmonic on one side."""

    coefficients: np.ndarray
    side: Side = "forward"

    def __post_init__(self):
        coeffs = np.asarray(self.coefficients, dtype=complex)
        if coeffs.ndim != 1 or coeffs.size == 0:
            raise GeometryError("excitation must be a non-empty 1-D complex vector")
        if not np.all(np.isfinite(coeffs)):
            raise GeometryError("excitation coefficients must be finite")
        if np.any(np.abs(coeffs) > 1.0 + 1e-6):
            raise GeometryError("excitation magnitudes must not exceed 1")
        object.__setattr__(self, "coefficients", coeffs)

    def __len__(self) -> int:
        return self.coefficients.size


@dataclass(frozen=True)
class BeamPattern:
    """Complex far field sampled on a strictly increasing angle grid."""

    angles_rad: np.ndarray
    field: np.ndarray
    harmonic: int = 0
    side: Side = "forward"

    def __post_init__(self):
        angles = np.asarray(self.angles_rad, dtype=float)
        if angles.size < 1 or np.any(np.diff(angles) <= 0):
            raise GeometryError("angle grid must be non-empty and strictly increasing")
        if not np.all(np.isfinite(self.field)):
            raise GeometryError("pattern field must be finite")

    @property
    def power(self) -> np.ndarray:
        return np.abs(self.field) ** 2


def array_factor(layout: ArrayLayout, excitation: ExcitationVector, theta_rad):
    """AF(theta) = (1/N) * sum_n c_n * exp(j*k*n*d*sin(theta))."""
    theta = np.asarray(theta_rad, dtype=float)
    n = np.arange(layout.n_elements)
    phase = layout.wavenumber * layout.pitch_m * np.sin(theta)[..., None] * n
    af = (np.exp(1j * phase) * excitation.coefficients).sum(axis=-1) / layout.n_elements
    return af if np.ndim(af) else complex(af)


def steer_phases(layout: ArrayLayout, theta_target_rad: float) -> np.ndarray:
    """Progressive phase gradient that points the beam at the target angle."""
    if abs(theta_target_rad) > np.pi / 2:
        raise GeometryError("steering angle must lie within +/- pi/2 of broadside")
    n = np.arange(layout.n_elements)
    return -layout.wavenumber * n * layout.pitch_m * math.sin(theta_target_rad)


def default_angle_grid(points: int = DEFAULT_ANGLE_GRID_POINTS) -> np.ndarray:
    return np.linspace(-np.pi / 2, np.pi / 2, points)


def compute_pattern(
    layout: ArrayLayout,
    excitation: ExcitationVector,
    angles_rad: np.ndarray | None = None,
    harmonic: int = 0,
) -> BeamPattern:
    angles = default_angle_grid() if angles_rad is None else np.asarray(angles_rad, dtype=float)
    return BeamPattern(angles, array_factor(layout, excitation, angles), harmonic, excitation.side)


def find_peak(pattern: BeamPattern) -> tuple[float, float]:
    """Angle and height of the pattern's global power maximum.

    The discrete maximum is refined by fitting a parabola through the
    three surrounding samples (skipped at the grid edges).
    """
    power = pattern.power
    idx = int(np.argmax(power))
    theta = float(pattern.angles_rad[idx])
    peak = float(power[idx])
    if 0 < idx < power.size - 1:
        left, mid, right = power[idx - 1], power[idx], power[idx + 1]
        curvature = left - 2.0 * mid + right
        if curvature < 0:
            step = pattern.angles_rad[idx + 1] - pattern.angles_rad[idx]
            offset = 0.5 * (left - right) / curvature
            theta += float(offset * step)
            peak = float(mid - 0.25 * (left - right) * offset)
    return theta, peak


def beam_efficiency(spectra, harmonic: int, side: Side = "forward") -> float:
    """Fraction of incident power delivered into one harmonic beam.

    Defined per element via Parseval (mean |c_n|^2), normalized to the
    lossless unmodulated surface, hence independent of any angle grid.
    ``spectra`` is the per-element harmonic set produced by the
    modulation layer.
    """
    exc = spectra.excitation(harmonic, side)
    return float(np.mean(np.abs(exc.coefficients) ** 2))


def angular_efficiency(pattern: BeamPattern, layout: ArrayLayout) -> float:
    """Cross-check of beam_efficiency via angular integration.

    Integrates |AF|^2 over the visible half-space; equals the Parseval
    figure exactly at half-wavelength pitch (where the element phase
    terms are orthogonal over sin(theta) in [-1, 1]) and approximates it
    otherwise.
    """
    u = np.sin(pattern.angles_rad)
    integrand = np.abs(pattern.field) ** 2
    return float(0.5 * layout.n_elements * np.trapz(integrand, u))
