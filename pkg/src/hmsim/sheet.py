"""Bias-to-scattering map of one Huygens element.

The element pairs an electric and a magnetic resonator.  Each branch is
a series R-L-C circuit whose capacitance is tuned by its bias voltage;
the pair is collapsed into a sheet transition with normalized electric
admittance y and magnetic impedance z (average-field model):

    T = (1 - y*z/4) / ((1 + y/2) * (1 + z/2))
    R = (z/2 - y/2) / ((1 + y/2) * (1 + z/2))

Balanced branches (y == z) transmit with zero reflection; the phase of T
wraps through a full turn as the resonance is swept across the carrier.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np

from .circuit import (
    CircuitValues,
    MetaAtomGeometry,
    VaractorModel,
    calibrate_geometry,
    default_seed_geometry,
    total_capacitance,
    varactor_capacitance,
)
from .constants import ETA0
from .errors import CoverageGapError, DivergenceError, GeometryError

DEFAULT_CARRIER_HZ = 24e9
DEFAULT_GRID_RESOLUTION_V = 0.1
DEFAULT_PHASE_TOL_RAD = math.radians(5.0)


@dataclass(frozen=True)
class VoltagePair:
    """Bias pair (electric, magnetic) applied to one element."""

    u_e_v: float
    u_m_v: float


@dataclass(frozen=True)
class SheetResponse:
    """Complex transmission/reflection of one element at one frequency."""

    transmission: complex
    reflection: complex
    frequency_hz: float

    @property
    def scattered_power(self) -> float:
        return abs(self.transmission) ** 2 + abs(self.reflection) ** 2


def sheet_admittance(circuit: CircuitValues, c_var_f, frequency_hz, kappa: float = 1.0):
    """Normalized admittance of one branch at the given frequency.

    The branch is the series R-L-C circuit (C = gap in series with the
    varactor); the result is kappa * eta0 / Z, dimensionless.  Exact
    resonance combined with zero loss has no finite admittance and
    raises DivergenceError.
    """
    f = np.asarray(frequency_hz, dtype=float)
    if np.any(f <= 0):
        raise GeometryError("frequency must be positive")
    c_tot = total_capacitance(circuit.c_gap_f, c_var_f)
    omega = 2.0 * np.pi * f
    z = circuit.r_loss_ohm + 1j * (omega * circuit.inductance_h - 1.0 / (omega * c_tot))
    if np.any(z == 0):
        raise DivergenceError(
            "sheet admittance diverges: exact resonance with zero series loss"
        )
    y = kappa * ETA0 / z
    return y if np.ndim(y) else complex(y)


@dataclass(frozen=True)
class Branch:
    """One resonator branch: circuit values, its varactor, sheet coupling."""

    circuit: CircuitValues
    varactor: VaractorModel
    kappa: float = 1.0

    def admittance(self, bias_v, frequency_hz):
        c_var = varactor_capacitance(self.varactor, bias_v)
        return sheet_admittance(self.circuit, c_var, frequency_hz, self.kappa)


@dataclass(frozen=True)
class ElementModel:
    """Calibrated electric/magnetic branch pair of one meta-atom."""

    electric: Branch
    magnetic: Branch

    @classmethod
    def calibrated(
        cls,
        target_hz: float = DEFAULT_CARRIER_HZ,
        seed_geom: MetaAtomGeometry | None = None,
        varactor: VaractorModel | None = None,
        r_loss_ohm: float = 0.5,
        kappa: float = 1.0,
    ) -> "ElementModel":
        """Calibrate one geometry at mid-bias and use it for both branches.

        Identical branches make the balanced (zero-reflection) condition
        exactly reachable at equal bias voltages.
        """
        seed = seed_geom or default_seed_geometry()
        var = varactor or VaractorModel()
        geom = calibrate_geometry(target_hz, seed, var)
        circuit = CircuitValues.from_geometry(geom, r_loss_ohm)
        branch = Branch(circuit, var, kappa)
        return cls(electric=branch, magnetic=branch)

    @property
    def varactor(self) -> VaractorModel:
        return self.electric.varactor

    def scattering(self, u_e_v, u_m_v, frequency_hz):
        """Vectorized (T, R) for bias arrays or scalars."""
        y = self.electric.admittance(u_e_v, frequency_hz)
        z = self.magnetic.admittance(u_m_v, frequency_hz)
        denom = (1.0 + y / 2.0) * (1.0 + z / 2.0)
        t = (1.0 - y * z / 4.0) / denom
        r = (z / 2.0 - y / 2.0) / denom
        return t, r


def element_response(pair: VoltagePair, frequency_hz: float, model: ElementModel) -> SheetResponse:
    """Scattering of one element for one bias pair at one frequency."""
    t, r = model.scattering(pair.u_e_v, pair.u_m_v, frequency_hz)
    return SheetResponse(complex(t), complex(r), frequency_hz)


def _bias_grid(varactor: VaractorModel, resolution_v: float) -> np.ndarray:
    if resolution_v <= 0:
        raise GeometryError("grid resolution must be positive")
    span = varactor.v_max_v - varactor.v_min_v
    n = int(math.floor(span / resolution_v + 1e-9)) + 1
    values = varactor.v_min_v + resolution_v * np.arange(n)
    if values[-1] < varactor.v_max_v - 1e-9 * span:
        values = np.append(values, varactor.v_max_v)
    return values


@dataclass(frozen=True)
class HuygensPatternTable:
    """Dense map bias square -> (T, R) at a fixed carrier frequency.

    ``transmission[i, j]`` corresponds to (u_e[i], u_m[j]).  Immutable
    after construction and safe to share across threads.
    """

    u_e_v: np.ndarray
    u_m_v: np.ndarray
    transmission: np.ndarray
    reflection: np.ndarray
    carrier_hz: float
    resolution_v: float

    def coefficient(self, mode: str) -> np.ndarray:
        if mode == "lens":
            return self.transmission
        if mode == "mirror":
            return self.reflection
        raise GeometryError(f"mode must be 'lens' or 'mirror', got {mode!r}")

    def response_at(self, i: int, j: int) -> SheetResponse:
        return SheetResponse(
            complex(self.transmission[i, j]),
            complex(self.reflection[i, j]),
            self.carrier_hz,
        )

    def export_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["u_e_v", "u_m_v", "re_t", "im_t", "re_r", "im_r"])
            for i, ue in enumerate(self.u_e_v):
                for j, um in enumerate(self.u_m_v):
                    t = self.transmission[i, j]
                    r = self.reflection[i, j]
                    writer.writerow(
                        [f"{ue:.6g}", f"{um:.6g}"]
                        + [f"{v:.12g}" for v in (t.real, t.imag, r.real, r.imag)]
                    )


def build_pattern_table(
    model: ElementModel,
    carrier_hz: float = DEFAULT_CARRIER_HZ,
    resolution_v: float = DEFAULT_GRID_RESOLUTION_V,
) -> HuygensPatternTable:
    """Evaluate the element over the full admissible bias square."""
    u_e = _bias_grid(model.electric.varactor, resolution_v)
    u_m = _bias_grid(model.magnetic.varactor, resolution_v)
    t, r = model.scattering(u_e[:, None], u_m[None, :], carrier_hz)
    if not (np.all(np.isfinite(t)) and np.all(np.isfinite(r))):
        raise DivergenceError("pattern table contains non-finite responses")
    t.setflags(write=False)
    r.setflags(write=False)
    u_e.setflags(write=False)
    u_m.setflags(write=False)
    return HuygensPatternTable(u_e, u_m, t, r, carrier_hz, resolution_v)


def wrap_phase(phase_rad):
    """Wrap angle(s) to [-pi, pi)."""
    return (np.asarray(phase_rad) + np.pi) % (2.0 * np.pi) - np.pi


def phase_coverage_rad(table: HuygensPatternTable, mode: str = "lens") -> float:
    """Angular span covered by the table's coefficient phases.

    Returns 2*pi minus the largest gap between adjacent sorted phases,
    i.e. the total arc for which a nearby phase exists in the table.
    """
    phases = np.sort(np.angle(table.coefficient(mode)).ravel())
    gaps = np.diff(phases)
    wrap_gap = (phases[0] + 2.0 * np.pi) - phases[-1]
    return float(2.0 * np.pi - max(gaps.max(initial=0.0), wrap_gap))


def phase_to_voltages(
    table: HuygensPatternTable,
    target_phase_rad: float,
    mode: str = "lens",
    phase_tol_rad: float = DEFAULT_PHASE_TOL_RAD,
) -> VoltagePair:
    """Best bias pair realizing ``target_phase_rad`` for the given mode.

    Among grid points whose coefficient phase lies within the tolerance,
    the one with the largest |coefficient| wins; exact magnitude ties go
    to the lexicographically smallest (u_e, u_m).  Raises
    CoverageGapError (carrying the closest achievable phase) when no
    point qualifies.
    """
    coeff = table.coefficient(mode)
    err = np.abs(wrap_phase(np.angle(coeff) - target_phase_rad))
    within = err <= phase_tol_rad
    if not np.any(within):
        i, j = np.unravel_index(np.argmin(err), err.shape)
        best = float(np.angle(coeff[i, j]))
        raise CoverageGapError(
            f"no grid point within {math.degrees(phase_tol_rad):.2f} deg of "
            f"target {math.degrees(target_phase_rad):.2f} deg; best achievable "
            f"phase is {math.degrees(best):.2f} deg",
            best_phase_rad=best,
        )
    mag = np.where(within, np.abs(coeff), -1.0)
    # argmax scans row-major, so equal magnitudes resolve to lexicographic (u_e, u_m)
    i, j = np.unravel_index(np.argmax(mag), mag.shape)
    return VoltagePair(float(table.u_e_v[i]), float(table.u_m_v[j]))
