"""Lumped-circuit model of a varactor-loaded meta-atom.

A meta-atom is a metallic ring whose gap acts as a capacitor and whose
loop acts as an inductor; a varactor in series with the gap makes the
resonance voltage-tunable.  Everything here is SI: metres, farads,
henries, hertz, volts.
"""

import math
from dataclasses import dataclass, replace
from typing import Literal

import numpy as np

from .constants import EPS0, MU0
from .errors import BiasRangeError, CalibrationError, GeometryError

Shape = Literal["rectangular", "circular"]

# paper-era commercial mmWave varactor package is ~0.7 mm, ring spans 2x
DEFAULT_RING_SPAN_M = 1.4e-3


@dataclass(frozen=True)
class MetaAtomGeometry:
    """Physical dimensions of one meta-atom ring.

    l1, l2 span the ring outline, w is the trace width, g the gap length
    and t the metal thickness.  Circular rings require l1 == l2 and carry
    radius == l1 / 2; their effective loop area is pi/4 of the bounding
    rectangle.
    """

    l1_m: float
    l2_m: float
    w_m: float
    g_m: float
    t_m: float
    shape: Shape = "rectangular"
    radius_m: float | None = None

    def __post_init__(self):
        dims = {
            "l1_m": self.l1_m,
            "l2_m": self.l2_m,
            "w_m": self.w_m,
            "g_m": self.g_m,
            "t_m": self.t_m,
        }
        for name, value in dims.items():
            if not (value > 0.0) or not math.isfinite(value):
                raise GeometryError(f"{name} must be strictly positive, got {value!r}")
        span = min(self.l1_m, self.l2_m)
        if self.g_m >= span:
            raise GeometryError(f"gap g={self.g_m} must be smaller than min(l1, l2)={span}")
        if self.w_m >= span:
            raise GeometryError(f"trace width w={self.w_m} must be smaller than min(l1, l2)={span}")
        if self.shape == "circular":
            if self.radius_m is None:
                raise GeometryError("circular shape requires a radius")
            if not math.isclose(self.radius_m, self.l1_m / 2.0, rel_tol=1e-12) or not math.isclose(
                self.radius_m, self.l2_m / 2.0, rel_tol=1e-12
            ):
                raise GeometryError("circular shape requires radius == l1/2 == l2/2")
        elif self.shape == "rectangular":
            if self.radius_m is not None:
                raise GeometryError("rectangular shape must not carry a radius")
        else:
            raise GeometryError(f"unknown shape {self.shape!r}")

    @classmethod
    def rectangular(cls, l1_m: float, l2_m: float, w_m: float, g_m: float, t_m: float) -> "MetaAtomGeometry":
        return cls(l1_m, l2_m, w_m, g_m, t_m, shape="rectangular")

    @classmethod
    def circular(cls, radius_m: float, w_m: float, g_m: float, t_m: float) -> "MetaAtomGeometry":
        return cls(2 * radius_m, 2 * radius_m, w_m, g_m, t_m, shape="circular", radius_m=radius_m)

    def with_gap(self, g_m: float) -> "MetaAtomGeometry":
        return replace(self, g_m=g_m)

    @property
    def loop_area_m2(self) -> float:
        """Effective loop area: l1*l2 for rectangles, pi*R^2 for rings."""
        if self.shape == "circular":
            return math.pi * self.radius_m**2
        return self.l1_m * self.l2_m


@dataclass(frozen=True)
class VaractorModel:
    """Hyperabrupt-junction varactor: C(V) = C_j0 / (1 + V/V_j)^m."""

    c_j0_f: float = 24e-15
    v_j_v: float = 1.7
    m: float = 1.2
    v_min_v: float = 0.0
    v_max_v: float = 12.0

    def __post_init__(self):
        if self.c_j0_f <= 0:
            raise GeometryError("zero-bias capacitance must be positive")
        if self.v_j_v <= 0:
            raise GeometryError("junction potential must be positive")
        if self.m <= 0:
            raise GeometryError("grading exponent must be positive")
        if not self.v_min_v < self.v_max_v:
            raise GeometryError("bias range must satisfy v_min < v_max")
        if self.v_min_v <= -self.v_j_v:
            raise GeometryError("v_min must exceed -V_j for C(V) to stay positive")

    @property
    def mid_bias_v(self) -> float:
        return 0.5 * (self.v_min_v + self.v_max_v)


@dataclass(frozen=True)
class CircuitValues:
    """Lumped values of one meta-atom branch; f0 is derived from L and C_gap."""

    inductance_h: float
    c_gap_f: float
    r_loss_ohm: float
    resonance_hz: float

    def __post_init__(self):
        if self.inductance_h <= 0 or self.c_gap_f <= 0:
            raise GeometryError("L and C_gap must be strictly positive")
        if self.r_loss_ohm < 0:
            raise GeometryError("series loss resistance must be non-negative")
        f_check = resonant_frequency(self.inductance_h, self.c_gap_f)
        if abs(self.resonance_hz - f_check) > 1e-12 * f_check:
            raise GeometryError(
                f"resonance_hz={self.resonance_hz} inconsistent with 1/(2*pi*sqrt(L*C_gap))={f_check}"
            )

    @classmethod
    def from_geometry(cls, geom: MetaAtomGeometry, r_loss_ohm: float = 0.5) -> "CircuitValues":
        L = loop_inductance(geom)
        C = gap_capacitance(geom)
        return cls(L, C, r_loss_ohm, resonant_frequency(L, C))


def gap_capacitance(geom: MetaAtomGeometry) -> float:
    """Parallel-plate capacitance of the ring gap: eps0 * w * t / g."""
    return EPS0 * geom.w_m * geom.t_m / geom.g_m


def loop_inductance(geom: MetaAtomGeometry) -> float:
    """Loop inductance mu0 * A / t with A the effective loop area.

    The circular redesign shrinks the area by pi/4 relative to the
    bounding rectangle, raising the resonance for the same footprint.
    """
    return MU0 * geom.loop_area_m2 / geom.t_m


def varactor_capacitance(model: VaractorModel, bias_v):
    """Junction capacitance at the given bias (scalar or array), farads."""
    v = np.asarray(bias_v, dtype=float)
    if np.any(v < model.v_min_v) or np.any(v > model.v_max_v):
        bad = v[(v < model.v_min_v) | (v > model.v_max_v)]
        raise BiasRangeError(
            f"bias {float(np.atleast_1d(bad)[0]):g} V outside "
            f"[{model.v_min_v:g}, {model.v_max_v:g}] V"
        )
    c = model.c_j0_f / (1.0 + v / model.v_j_v) ** model.m
    return c if np.ndim(c) else float(c)


def total_capacitance(c_gap_f, c_var_f):
    """Series combination of gap and varactor capacitance."""
    cg = np.asarray(c_gap_f, dtype=float)
    cv = np.asarray(c_var_f, dtype=float)
    if np.any(cg <= 0) or np.any(cv <= 0):
        raise GeometryError("capacitances must be strictly positive")
    c = 1.0 / (1.0 / cg + 1.0 / cv)
    return c if np.ndim(c) else float(c)


def resonant_frequency(inductance_h, capacitance_f):
    """f0 = 1 / (2*pi*sqrt(L*C))."""
    L = np.asarray(inductance_h, dtype=float)
    C = np.asarray(capacitance_f, dtype=float)
    if np.any(L <= 0) or np.any(C <= 0):
        raise GeometryError("L and C must be strictly positive")
    f = 1.0 / (2.0 * np.pi * np.sqrt(L * C))
    return f if np.ndim(f) else float(f)


def _resonance_at_gap(geom: MetaAtomGeometry, g_m: float, varactor: VaractorModel) -> float:
    trial = geom.with_gap(g_m)
    c_tot = total_capacitance(gap_capacitance(trial), varactor_capacitance(varactor, varactor.mid_bias_v))
    return resonant_frequency(loop_inductance(trial), c_tot)


def calibrate_geometry(
    target_hz: float,
    seed_geom: MetaAtomGeometry,
    varactor: VaractorModel,
    rel_tol: float = 1e-3,
    max_iter: int = 80,
) -> MetaAtomGeometry:
    """Tune the gap g so the mid-bias resonance hits ``target_hz``.

    All other dimensions stay fixed.  Uses a secant iteration on g,
    falling back to bisection when a step would leave the admissible
    bracket.  Raises CalibrationError when the target lies outside the
    frequency range reachable within 0 < g < min(l1, l2).
    """
    if target_hz <= 0:
        raise CalibrationError(f"target frequency must be positive, got {target_hz!r}")

    g_lo = 1e-8
    g_hi = 0.999 * min(seed_geom.l1_m, seed_geom.l2_m)
    f_lo = _resonance_at_gap(seed_geom, g_lo, varactor)
    f_hi = _resonance_at_gap(seed_geom, g_hi, varactor)
    # f0 grows with g (larger gap -> smaller C), so [f_lo, f_hi] brackets the range
    if not (f_lo <= target_hz <= f_hi):
        raise CalibrationError(
            f"target {target_hz:.6g} Hz not bracketed: gap range [{g_lo:.3g}, {g_hi:.3g}] m "
            f"reaches only [{f_lo:.6g}, {f_hi:.6g}] Hz"
        )

    g0, g1 = seed_geom.g_m, seed_geom.g_m * 1.05
    g1 = min(max(g1, g_lo), g_hi)
    if g1 == g0:
        g1 = 0.5 * (g0 + g_hi)
    e0 = _resonance_at_gap(seed_geom, g0, varactor) - target_hz
    e1 = _resonance_at_gap(seed_geom, g1, varactor) - target_hz
    lo, hi = g_lo, g_hi
    for _ in range(max_iter):
        if abs(e1) <= rel_tol * target_hz:
            return seed_geom.with_gap(g1)
        # maintain the bracket from the signs seen so far
        if e1 > 0:
            hi = min(hi, g1)
        else:
            lo = max(lo, g1)
        denom = e1 - e0
        if denom != 0.0:
            g_next = g1 - e1 * (g1 - g0) / denom
        else:
            g_next = 0.5 * (lo + hi)
        if not (lo < g_next < hi):
            g_next = 0.5 * (lo + hi)
        g0, e0 = g1, e1
        g1 = g_next
        e1 = _resonance_at_gap(seed_geom, g1, varactor) - target_hz
    raise CalibrationError(
        f"secant search did not converge to {target_hz:.6g} Hz within {max_iter} iterations"
    )


def default_seed_geometry() -> MetaAtomGeometry:
    """Circular ring sized to a 0.7 mm varactor package, pre-calibration."""
    return MetaAtomGeometry.circular(
        radius_m=DEFAULT_RING_SPAN_M / 2, w_m=0.2e-3, g_m=0.1e-3, t_m=0.035e-3
    )
