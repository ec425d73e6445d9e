"""Circuit-level simulator for varactor-tuned Huygens metasurface relays.

Builds the bias-to-scattering map of the tunable elements, synthesizes
steered single- and multi-armed beams through time-modulated bias
waveforms, optimizes those waveforms with a genetic search, and
evaluates the resulting link budgets in simple 2-D room scenes.
"""

from .beams import (
    ArrayLayout,
    BeamPattern,
    ExcitationVector,
    angular_efficiency,
    array_factor,
    beam_efficiency,
    compute_pattern,
    find_peak,
    steer_phases,
)
from .circuit import (
    CircuitValues,
    MetaAtomGeometry,
    VaractorModel,
    calibrate_geometry,
    gap_capacitance,
    loop_inductance,
    resonant_frequency,
    total_capacitance,
    varactor_capacitance,
)
from .errors import (
    BiasRangeError,
    CalibrationError,
    ClippingError,
    ConfigError,
    CoverageGapError,
    DegenerateGeometryError,
    DivergenceError,
    GeometryError,
    HmsimError,
    NyquistError,
    OptimizationFailedError,
    SchemaError,
    SearchFailedError,
)
from .modulation import (
    HarmonicSpectrum,
    ModulationSettings,
    ResponseSeries,
    SurfaceSpectra,
    VoltageWaveform,
    harmonic_decompose,
    per_element_spectra,
    sample_response,
    waveform_value,
)
from .optimizer import (
    BeamObjective,
    BeamTarget,
    GAConfig,
    OptimizeResult,
    WaveformGenome,
    consequence_angle,
    evaluate_objective,
    load_genome,
    optimize,
    save_genome,
    serrodyne_seed,
    synthesize_surface,
)
from .scenario import (
    BeamSearchResult,
    LinkEntry,
    SceneGeometry,
    beam_search,
    blockage_check,
    compute_geometry_angles,
    direct_budget,
    free_space_loss_db,
    link_budget,
)
from .sheet import (
    Branch,
    ElementModel,
    HuygensPatternTable,
    SheetResponse,
    VoltagePair,
    build_pattern_table,
    element_response,
    phase_coverage_rad,
    phase_to_voltages,
    sheet_admittance,
)

__version__ = "0.1.0"
