"""Time-modulated element response and its harmonic sidebands.

Biasing an element with a periodic voltage waveform makes its scattering
coefficients periodic in time; their Fourier coefficients are the
complex amplitudes radiated at the carrier plus integer multiples of the
modulation frequency.  The modulation rate is orders of magnitude below
the carrier, so the response at each instant is taken as the static
response at the instantaneous bias (quasi-static approximation).
"""

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .beams import ExcitationVector, Side
from .errors import ClippingError, GeometryError, NyquistError
from .sheet import ElementModel

DEFAULT_MAX_HARMONIC = 8
DEFAULT_SAMPLES_PER_PERIOD = 256
DEFAULT_FOURIER_ORDER = 4
DEFAULT_MOD_FREQ_HZ = 30e6
DEFAULT_GUARD_RATIO = 100.0

_NORMALIZATION_GRID = 1024


@dataclass(frozen=True)
class VoltageWaveform:
    """Periodic bias waveform U(t) = U_amp * F(t) + U_off.

    F(t) is the truncated Fourier series
    sum_n a_n cos(n*(2*pi*Omega*t - phi)) + b_n sin(n*(2*pi*Omega*t - phi))
    with a single phase offset shared by all orders, so changing phi is
    exactly a time shift of the whole waveform.
    """

    u_amp_v: float
    u_off_v: float
    cos_coeffs: tuple
    sin_coeffs: tuple
    phase_rad: float
    mod_freq_hz: float

    def __post_init__(self):
        a = tuple(float(x) for x in self.cos_coeffs)
        b = tuple(float(x) for x in self.sin_coeffs)
        if len(a) < 1 or len(a) != len(b):
            raise GeometryError("need matching, non-empty cos/sin coefficient lists")
        if self.mod_freq_hz <= 0:
            raise GeometryError("modulation frequency must be positive")
        if self.u_amp_v < 0:
            raise GeometryError("waveform amplitude must be non-negative")
        object.__setattr__(self, "cos_coeffs", a)
        object.__setattr__(self, "sin_coeffs", b)

    @property
    def order(self) -> int:
        return len(self.cos_coeffs)

    @property
    def period_s(self) -> float:
        return 1.0 / self.mod_freq_hz

    def fourier_series(self, t_s):
        """F(t); vectorized over time."""
        t = np.asarray(t_s, dtype=float)
        theta = 2.0 * np.pi * self.mod_freq_hz * t - self.phase_rad
        n = np.arange(1, self.order + 1)
        arg = np.multiply.outer(theta, n)
        f = np.cos(arg) @ np.asarray(self.cos_coeffs) + np.sin(arg) @ np.asarray(self.sin_coeffs)
        return f if np.ndim(f) else float(f)

    def peak_series_value(self) -> float:
        """max |F(t)| over one period, sampled on a fine grid."""
        t = np.arange(_NORMALIZATION_GRID) * (self.period_s / _NORMALIZATION_GRID)
        return float(np.max(np.abs(self.fourier_series(t))))

    def normalized(self) -> "VoltageWaveform":
        """Copy with coefficients scaled so max |F(t)| == 1.

        With the max-norm in place, U_off +/- U_amp is the exact bias
        excursion envelope.  An all-zero series stays as-is (constant
        waveform).
        """
        peak = self.peak_series_value()
        if peak == 0.0:
            return self
        return replace(
            self,
            cos_coeffs=tuple(a / peak for a in self.cos_coeffs),
            sin_coeffs=tuple(b / peak for b in self.sin_coeffs),
        )

    def with_phase_offset(self, delta_rad: float) -> "VoltageWaveform":
        """Time-shift the waveform by delta / (2*pi*Omega)."""
        return replace(self, phase_rad=self.phase_rad + delta_rad)

    @classmethod
    def constant(cls, bias_v: float, mod_freq_hz: float = DEFAULT_MOD_FREQ_HZ) -> "VoltageWaveform":
        return cls(0.0, bias_v, (0.0,), (0.0,), 0.0, mod_freq_hz)


def waveform_value(waveform: VoltageWaveform, t_s):
    """Instantaneous bias voltage; vectorized over time."""
    f = waveform.fourier_series(t_s)
    return waveform.u_amp_v * f + waveform.u_off_v


def check_bias_range(waveform: VoltageWaveform, v_min_v: float, v_max_v: float) -> None:
    """Raise ClippingError if the waveform's excursion leaves the range."""
    peak = waveform.u_amp_v * waveform.peak_series_value()
    lo, hi = waveform.u_off_v - peak, waveform.u_off_v + peak
    if lo < v_min_v - 1e-12 or hi > v_max_v + 1e-12:
        raise ClippingError(
            f"waveform excursion [{lo:.4g}, {hi:.4g}] V exceeds bias range "
            f"[{v_min_v:g}, {v_max_v:g}] V"
        )


@dataclass(frozen=True)
class ModulationSettings:
    """Shared knobs for time-modulation runs."""

    carrier_hz: float
    mod_freq_hz: float = DEFAULT_MOD_FREQ_HZ
    fourier_order: int = DEFAULT_FOURIER_ORDER
    max_harmonic: int = DEFAULT_MAX_HARMONIC
    samples_per_period: int = DEFAULT_SAMPLES_PER_PERIOD
    guard_ratio: float = DEFAULT_GUARD_RATIO

    def __post_init__(self):
        if self.carrier_hz <= 0 or self.mod_freq_hz <= 0:
            raise GeometryError("frequencies must be positive")
        if self.mod_freq_hz * self.guard_ratio > self.carrier_hz:
            raise GeometryError(
                f"modulation frequency {self.mod_freq_hz:g} Hz violates the quasi-static "
                f"guard (must stay below carrier/{self.guard_ratio:g})"
            )
        if self.fourier_order < 1 or self.max_harmonic < 1:
            raise GeometryError("fourier_order and max_harmonic must be at least 1")
        if self.samples_per_period < 4 * self.max_harmonic + 4:
            raise GeometryError(
                "samples_per_period must be at least 4*max_harmonic + 4 for clean spectra"
            )


@dataclass(frozen=True)
class ResponseSeries:
    """Element scattering sampled uniformly over one modulation period."""

    times_s: np.ndarray
    transmission: np.ndarray
    reflection: np.ndarray
    carrier_hz: float
    mod_freq_hz: float

    def __len__(self) -> int:
        return self.times_s.size


def sample_response(
    waveform_e: VoltageWaveform,
    waveform_m: VoltageWaveform,
    model: ElementModel,
    carrier_hz: float,
    samples_per_period: int = DEFAULT_SAMPLES_PER_PERIOD,
    guard_ratio: float = DEFAULT_GUARD_RATIO,
) -> ResponseSeries:
    """Quasi-static response over one period of the two bias waveforms."""
    if waveform_e.mod_freq_hz != waveform_m.mod_freq_hz:
        raise GeometryError("electric and magnetic waveforms must share the modulation frequency")
    if samples_per_period < 8:
        raise GeometryError("need at least 8 samples per period")
    if waveform_e.mod_freq_hz * guard_ratio > carrier_hz:
        raise GeometryError(
            "modulation frequency violates the quasi-static guard ratio"
        )
    period = waveform_e.period_s
    t = np.arange(samples_per_period) * (period / samples_per_period)
    u_e = waveform_value(waveform_e, t)
    u_m = waveform_value(waveform_m, t)
    var_e = model.electric.varactor
    var_m = model.magnetic.varactor
    for label, u, var in (("electric", u_e, var_e), ("magnetic", u_m, var_m)):
        tol = 1e-9 * (var.v_max_v - var.v_min_v)
        bad = np.nonzero((u < var.v_min_v - tol) | (u > var.v_max_v + tol))[0]
        if bad.size:
            s = int(bad[0])
            raise ClippingError(
                f"{label} bias clips at sample {s} (t={t[s]:.3e} s): "
                f"{u[s]:.4g} V outside [{var.v_min_v:g}, {var.v_max_v:g}] V"
            )
    u_e = np.clip(u_e, var_e.v_min_v, var_e.v_max_v)
    u_m = np.clip(u_m, var_m.v_min_v, var_m.v_max_v)
    trans, refl = model.scattering(u_e, u_m, carrier_hz)
    return ResponseSeries(t, trans, refl, carrier_hz, waveform_e.mod_freq_hz)


@dataclass(frozen=True)
class HarmonicSpectrum:
    """Sideband amplitudes c_h, |h| <= H, for one element.

    ``transmission[h + max_harmonic]`` is the forward (transmitted)
    amplitude at carrier + h * Omega; ``reflection`` likewise for the
    backward side.
    """

    transmission: np.ndarray
    reflection: np.ndarray
    max_harmonic: int
    carrier_hz: float
    mod_freq_hz: float

    def harmonics(self) -> np.ndarray:
        return np.arange(-self.max_harmonic, self.max_harmonic + 1)

    def coefficient(self, harmonic: int, side: Side = "forward") -> complex:
        if abs(harmonic) > self.max_harmonic:
            raise NyquistError(f"harmonic {harmonic} outside |h| <= {self.max_harmonic}")
        arr = self.transmission if side == "forward" else self.reflection
        return complex(arr[harmonic + self.max_harmonic])

    def power(self, side: Side = "forward") -> float:
        arr = self.transmission if side == "forward" else self.reflection
        return float(np.sum(np.abs(arr) ** 2))


def _dft_coefficients(series: np.ndarray, max_harmonic: int) -> np.ndarray:
    spectrum = np.fft.fft(series) / series.size
    idx = np.arange(-max_harmonic, max_harmonic + 1) % series.size
    return spectrum[idx]


def harmonic_decompose(series: ResponseSeries, max_harmonic: int = DEFAULT_MAX_HARMONIC) -> HarmonicSpectrum:
    """Discrete Fourier coefficients of the sampled T(t) and R(t).

    c_h = (1/S) * sum_s x(t_s) * exp(-j*2*pi*h*s/S); requires
    max_harmonic < S/2 so the reported bins are alias-free.
    """
    s = len(series)
    if max_harmonic >= s / 2:
        raise NyquistError(
            f"max harmonic {max_harmonic} needs more than {2 * max_harmonic} samples, got {s}"
        )
    return HarmonicSpectrum(
        _dft_coefficients(series.transmission, max_harmonic),
        _dft_coefficients(series.reflection, max_harmonic),
        max_harmonic,
        series.carrier_hz,
        series.mod_freq_hz,
    )


@dataclass(frozen=True)
class SurfaceSpectra:
    """Harmonic excitations of the whole surface: (2H+1, N) per side."""

    forward: np.ndarray
    backward: np.ndarray
    max_harmonic: int
    carrier_hz: float
    mod_freq_hz: float

    @property
    def n_elements(self) -> int:
        return self.forward.shape[1]

    def harmonics(self) -> np.ndarray:
        return np.arange(-self.max_harmonic, self.max_harmonic + 1)

    def excitation(self, harmonic: int, side: Side = "forward") -> ExcitationVector:
        if abs(harmonic) > self.max_harmonic:
            raise NyquistError(f"harmonic {harmonic} outside |h| <= {self.max_harmonic}")
        arr = self.forward if side == "forward" else self.backward
        return ExcitationVector(arr[harmonic + self.max_harmonic], side)


def per_element_spectra(
    waveform_pairs: Sequence[tuple[VoltageWaveform, VoltageWaveform]],
    model: ElementModel,
    carrier_hz: float,
    max_harmonic: int = DEFAULT_MAX_HARMONIC,
    samples_per_period: int = DEFAULT_SAMPLES_PER_PERIOD,
) -> SurfaceSpectra:
    """Decompose every element's waveform pair into harmonic excitations.

    Per-element beam steering rides on the waveform phase offsets: a
    phase-shifted copy of the base waveform is a time shift, which
    multiplies harmonic h by exp(-j*h*phi).
    """
    if not waveform_pairs:
        raise GeometryError("need at least one element")
    mod_freqs = {w.mod_freq_hz for pair in waveform_pairs for w in pair}
    if len(mod_freqs) != 1:
        raise GeometryError("all elements must share one modulation frequency")
    n = len(waveform_pairs)
    forward = np.empty((2 * max_harmonic + 1, n), dtype=complex)
    backward = np.empty_like(forward)
    for i, (w_e, w_m) in enumerate(waveform_pairs):
        series = sample_response(w_e, w_m, model, carrier_hz, samples_per_period)
        spec = harmonic_decompose(series, max_harmonic)
        forward[:, i] = spec.transmission
        backward[:, i] = spec.reflection
    forward.setflags(write=False)
    backward.setflags(write=False)
    return SurfaceSpectra(forward, backward, max_harmonic, carrier_hz, waveform_pairs[0][0].mod_freq_hz)
