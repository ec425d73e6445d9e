"""Genetic search over bias-waveform coefficients.

The search space is the pair of electric/magnetic waveform parameter
sets (amplitude, offset, truncated Fourier coefficients, phase) encoded
as one flat real vector.  Fitness is the weighted power landing in the
requested harmonic beams of a single element; steering the whole surface
afterwards only applies per-element phase offsets, which leave those
powers untouched.
"""

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .beams import ArrayLayout, Side
from .errors import GeometryError, OptimizationFailedError
from .modulation import (
    ModulationSettings,
    VoltageWaveform,
    harmonic_decompose,
    sample_response,
)
from .sheet import ElementModel

_GENES_PER_WAVEFORM_BASE = 3  # u_amp, u_off, phase


@dataclass(frozen=True)
class BeamTarget:
    """One desired beam: harmonic index, side, non-negative weight."""

    harmonic: int
    side: Side = "forward"
    weight: float = 1.0
    angle_rad: float | None = None

    def __post_init__(self):
        if self.weight < 0:
            raise GeometryError("target weight must be non-negative")


@dataclass(frozen=True)
class BeamObjective:
    """Weighted scattered-power objective over one or more targets."""

    targets: tuple

    def __post_init__(self):
        targets = tuple(self.targets)
        if not targets:
            raise GeometryError("objective needs at least one target")
        if all(t.weight == 0 for t in targets):
            raise GeometryError("objective weights must not all be zero")
        object.__setattr__(self, "targets", targets)

    @classmethod
    def single_beam(cls, harmonic: int = -1, side: Side = "forward") -> "BeamObjective":
        return cls((BeamTarget(harmonic, side, 1.0),))

    @classmethod
    def double_beam(
        cls,
        side: Side = "forward",
        weights: tuple[float, float] = (2.0, 1.0),
    ) -> "BeamObjective":
        """Split between the -1 and +1 sidebands with the given weights."""
        return cls((BeamTarget(-1, side, weights[0]), BeamTarget(+1, side, weights[1])))


@dataclass(frozen=True)
class GAConfig:
    population: int = 64
    generations: int = 200
    crossover_rate: float = 0.9
    mutation_rate: float = 0.15
    mutation_scale: float = 0.05
    elites: int = 2
    seed: int = 0

    def __post_init__(self):
        if self.population < 2:
            raise GeometryError("population must be at least 2")
        if not 0 <= self.elites < self.population:
            raise GeometryError("elite count must be smaller than the population")
        if not 0 <= self.crossover_rate <= 1 or not 0 <= self.mutation_rate <= 1:
            raise GeometryError("rates must lie in [0, 1]")


@dataclass(frozen=True)
class WaveformGenome:
    """Flat real vector encoding both waveform parameter sets.

    Layout per waveform (electric first, magnetic second):
    [u_amp, u_off, a_1..a_Nh, b_1..b_Nh, phase].
    """

    vector: np.ndarray
    fourier_order: int
    mod_freq_hz: float

    def __post_init__(self):
        vec = np.asarray(self.vector, dtype=float)
        expected = 2 * self.genes_per_waveform(self.fourier_order)
        if vec.shape != (expected,):
            raise GeometryError(f"genome must have {expected} genes, got shape {vec.shape}")
        object.__setattr__(self, "vector", vec)

    @staticmethod
    def genes_per_waveform(fourier_order: int) -> int:
        return _GENES_PER_WAVEFORM_BASE + 2 * fourier_order

    @classmethod
    def bounds(cls, varactor, fourier_order: int) -> tuple[np.ndarray, np.ndarray]:
        """(lower, upper) gene bounds for the given varactor range."""
        half_span = 0.5 * (varactor.v_max_v - varactor.v_min_v)
        lo_wf = [0.0, varactor.v_min_v] + [-1.0] * (2 * fourier_order) + [-math.pi]
        hi_wf = [half_span, varactor.v_max_v] + [1.0] * (2 * fourier_order) + [math.pi]
        return np.array(lo_wf * 2), np.array(hi_wf * 2)

    def _decode_one(self, genes: np.ndarray, v_min: float, v_max: float) -> VoltageWaveform:
        nh = self.fourier_order
        wf = VoltageWaveform(
            u_amp_v=float(genes[0]),
            u_off_v=float(genes[1]),
            cos_coeffs=tuple(genes[2 : 2 + nh]),
            sin_coeffs=tuple(genes[2 + nh : 2 + 2 * nh]),
            phase_rad=float(genes[2 + 2 * nh]),
            mod_freq_hz=self.mod_freq_hz,
        ).normalized()
        # repair: shrink the swing to the offset's headroom instead of rejecting;
        # the 1e-3 margin absorbs the sampled max-norm slightly underestimating
        # the true waveform peak
        headroom = min(wf.u_off_v - v_min, v_max - wf.u_off_v) / (1.0 + 1e-3)
        if headroom < 0:
            raise GeometryError(f"offset {wf.u_off_v:g} V outside bias range")
        if wf.u_amp_v > headroom:
            wf = VoltageWaveform(
                headroom, wf.u_off_v, wf.cos_coeffs, wf.sin_coeffs, wf.phase_rad, wf.mod_freq_hz
            )
        return wf

    def decode(self, varactor) -> tuple[VoltageWaveform, VoltageWaveform]:
        """Bias-feasible (electric, magnetic) waveform pair."""
        k = self.genes_per_waveform(self.fourier_order)
        w_e = self._decode_one(self.vector[:k], varactor.v_min_v, varactor.v_max_v)
        w_m = self._decode_one(self.vector[k:], varactor.v_min_v, varactor.v_max_v)
        return w_e, w_m

    @classmethod
    def from_waveforms(cls, w_e: VoltageWaveform, w_m: VoltageWaveform) -> "WaveformGenome":
        if w_e.order != w_m.order or w_e.mod_freq_hz != w_m.mod_freq_hz:
            raise GeometryError("waveforms must share Fourier order and modulation frequency")
        genes = []
        for w in (w_e, w_m):
            genes.extend([w.u_amp_v, w.u_off_v, *w.cos_coeffs, *w.sin_coeffs, w.phase_rad])
        return cls(np.array(genes), w_e.order, w_e.mod_freq_hz)


def serrodyne_seed(
    varactor,
    settings: ModulationSettings,
    mirror: bool = False,
) -> WaveformGenome:
    """Sawtooth-flavoured starting point for single-sideband searches.

    The Fourier coefficients are the leading terms of a falling sawtooth
    sweep across the bias range (transmission phase grows with bias, so
    a falling ramp walks the phase backwards and feeds the -1 sideband);
    mirror mode anti-phases the magnetic branch.
    """
    nh = settings.fourier_order
    half_span = 0.5 * (varactor.v_max_v - varactor.v_min_v)
    sin_coeffs = [(-1.0) ** n / n for n in range(1, nh + 1)]
    w_e = VoltageWaveform(
        half_span, varactor.mid_bias_v, (0.0,) * nh, tuple(sin_coeffs), 0.0, settings.mod_freq_hz
    )
    w_m = w_e.with_phase_offset(math.pi) if mirror else w_e
    return WaveformGenome.from_waveforms(w_e, w_m)


def evaluate_objective(
    genome: WaveformGenome,
    objective: BeamObjective,
    model: ElementModel,
    settings: ModulationSettings,
) -> float:
    """Weighted harmonic power of the decoded waveform pair, >= 0."""
    try:
        w_e, w_m = genome.decode(model.varactor)
        series = sample_response(
            w_e, w_m, model, settings.carrier_hz, settings.samples_per_period, settings.guard_ratio
        )
        spectrum = harmonic_decompose(series, settings.max_harmonic)
    except GeometryError:
        return 0.0
    fitness = 0.0
    for target in objective.targets:
        c = spectrum.coefficient(target.harmonic, target.side)
        fitness += target.weight * abs(c) ** 2
    return fitness if math.isfinite(fitness) else 0.0


@dataclass(frozen=True)
class OptimizeResult:
    best_genome: WaveformGenome
    best_fitness: float
    history: np.ndarray
    evaluations: int


def _tournament(rng, fitness: np.ndarray, size: int = 3) -> int:
    picks = rng.integers(0, fitness.size, size=size)
    return int(picks[np.argmax(fitness[picks])])


def optimize(
    objective: BeamObjective,
    config: GAConfig,
    model: ElementModel,
    settings: ModulationSettings,
    seed_genomes: Sequence[WaveformGenome] = (),
) -> OptimizeResult:
    """Elitist GA: tournament selection, blend crossover, Gaussian mutation.

    Deterministic for a fixed config seed.  Returns the best genome ever
    seen plus the per-generation best-fitness trace (exactly
    non-decreasing thanks to elitism).
    """
    rng = np.random.default_rng(config.seed)
    lo, hi = WaveformGenome.bounds(model.varactor, settings.fourier_order)
    span = hi - lo
    n_genes = lo.size

    population = rng.uniform(lo, hi, size=(config.population, n_genes))
    for i, g in enumerate(seed_genomes[: config.population]):
        if g.fourier_order != settings.fourier_order:
            raise GeometryError("seed genome Fourier order does not match the settings")
        population[i] = np.clip(g.vector, lo, hi)

    def make(vec: np.ndarray) -> WaveformGenome:
        return WaveformGenome(vec, settings.fourier_order, settings.mod_freq_hz)

    fitness = np.array([evaluate_objective(make(v), objective, model, settings) for v in population])
    evaluations = config.population
    history = np.empty(config.generations)

    for gen in range(config.generations):
        order = np.argsort(fitness)[::-1]
        next_pop = np.empty_like(population)
        next_fit = np.full(config.population, np.nan)
        next_pop[: config.elites] = population[order[: config.elites]]
        next_fit[: config.elites] = fitness[order[: config.elites]]

        for i in range(config.elites, config.population):
            p1 = population[_tournament(rng, fitness)]
            p2 = population[_tournament(rng, fitness)]
            if rng.random() < config.crossover_rate:
                # BLX-0.5 blend: sample around and between the parents
                low = np.minimum(p1, p2)
                high = np.maximum(p1, p2)
                d = high - low
                child = rng.uniform(low - 0.5 * d, high + 0.5 * d)
            else:
                child = p1.copy()
            mutate = rng.random(n_genes) < config.mutation_rate
            child = child + mutate * rng.normal(0.0, config.mutation_scale * span)
            next_pop[i] = np.clip(child, lo, hi)

        population = next_pop
        for i in range(config.population):
            if not np.isfinite(next_fit[i]):
                next_fit[i] = evaluate_objective(make(population[i]), objective, model, settings)
                evaluations += 1
        fitness = next_fit
        history[gen] = fitness.max()

    if fitness.max() <= 0.0:
        raise OptimizationFailedError(
            "entire final population scored zero fitness", history=history
        )
    best = int(np.argmax(fitness))
    return OptimizeResult(make(population[best]), float(fitness[best]), history, evaluations)


def consequence_angle(
    harmonic: int, primary_harmonic: int, primary_angle_rad: float
) -> float | None:
    """Angle harmonic ``harmonic`` lands at under the shared phase gradient.

    The shared per-element offset scales each harmonic's phase slope by
    h / h_primary; the implied sine may leave [-1, 1], in which case the
    beam is evanescent and None is returned.
    """
    s = (harmonic / primary_harmonic) * math.sin(primary_angle_rad)
    if abs(s) > 1.0:
        return None
    return math.asin(s)


def synthesize_surface(
    genome: WaveformGenome,
    layout: ArrayLayout,
    model: ElementModel,
    primary: tuple[int, float],
    dual: tuple[int, float] | None = None,
) -> list[tuple[VoltageWaveform, VoltageWaveform]]:
    """Replicate the optimized waveform with per-element steering offsets.

    ``primary`` is (harmonic, angle_rad): element n gets the phase offset
    k*n*d*sin(angle)/harmonic on both waveforms, which points that
    harmonic's beam at the angle.  Every other harmonic follows the same
    gradient; its landing angle is a consequence, not a promise.

    ``dual`` (harmonic, angle_rad) is experimental: the magnetic
    waveform follows the second target's gradient instead.  Splitting
    the gradients deforms the element response, so both achieved angles
    should be read off the synthesized pattern rather than assumed.
    """
    h1, theta1 = primary
    if h1 == 0:
        raise GeometryError("harmonic 0 cannot be steered by a waveform phase offset")
    if abs(theta1) > math.pi / 2:
        raise GeometryError("steering angle must lie within +/- pi/2")
    w_e, w_m = genome.decode(model.varactor)
    kd = layout.wavenumber * layout.pitch_m
    slope_e = kd * math.sin(theta1) / h1
    slope_m = slope_e
    if dual is not None:
        h2, theta2 = dual
        if h2 == 0:
            raise GeometryError("harmonic 0 cannot be steered by a waveform phase offset")
        slope_m = kd * math.sin(theta2) / h2
    pairs = []
    for n in range(layout.n_elements):
        pairs.append((w_e.with_phase_offset(n * slope_e), w_m.with_phase_offset(n * slope_m)))
    return pairs


def save_genome(path, result: OptimizeResult, objective: BeamObjective, config: GAConfig) -> None:
    """Write a self-describing JSON record for reproducible replay."""
    payload = {
        "format": "hmsim-genome",
        "version": 1,
        "fitness": result.best_fitness,
        "evaluations": result.evaluations,
        "fourier_order": result.best_genome.fourier_order,
        "mod_freq_hz": result.best_genome.mod_freq_hz,
        "vector": [float(x) for x in result.best_genome.vector],
        "objective": [
            {"harmonic": t.harmonic, "side": t.side, "weight": t.weight}
            for t in objective.targets
        ],
        "ga": {
            "population": config.population,
            "generations": config.generations,
            "crossover_rate": config.crossover_rate,
            "mutation_rate": config.mutation_rate,
            "mutation_scale": config.mutation_scale,
            "elites": config.elites,
            "seed": config.seed,
        },
        "history": [float(x) for x in result.history],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def load_genome(path) -> WaveformGenome:
    with open(path) as fh:
        payload = json.load(fh)
    if payload.get("format") != "hmsim-genome":
        raise GeometryError(f"{path} is not a genome file")
    return WaveformGenome(
        np.array(payload["vector"], dtype=float),
        int(payload["fourier_order"]),
        float(payload["mod_freq_hz"]),
    )
