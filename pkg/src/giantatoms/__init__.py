"""Entanglement dynamics of two three-point giant atoms on a 1D waveguide
with tunable directional (chiral) coupling."""

from .model import (
    ChiralitySpec,
    CouplingPoint,
    GiantAtom,
    InitialState,
    INITIAL_EG,
    INITIAL_GE,
    LayoutConfiguration,
    LayoutError,
    Preset,
    PRESET_POSITIONS,
    epsilon,
    make_layout,
    make_preset,
    rates_from_chirality,
    validate_layout,
)
from .coefficients import (
    CoefficientSet,
    check_dissipator_psd,
    coefficients,
    coefficients_nonchiral,
    phase_distance,
)
from .dynamics import (
    AmplitudePair,
    EffectiveHamiltonian,
    ModeClass,
    ModeReport,
    PhysicalityError,
    Trajectory,
    build_heff,
    concurrence,
    dark_modes,
    propagate_closed,
    propagate_numeric,
    propagate_numeric_batch,
    trajectory,
)
from .experiments import (
    CALIBRATION_TARGETS,
    CalibrationResult,
    ChiralityScanResult,
    InitialStateComparison,
    MaxResult,
    PhaseKind,
    SpecialPhase,
    SteadyStateReport,
    SweepGrid,
    all_orderings,
    calibrate_presets,
    chirality_scan,
    compare_initial_states,
    detect_steady,
    evaluate_concurrence,
    find_max,
    find_special_phases,
    layout_from_pattern,
    sweep,
)
from .io_cli import (
    ConfigError,
    ExperimentSpec,
    GridRange,
    SvgOptions,
    cli_main,
    parse_experiment_config,
    render_svg_heatmap,
    serialize_results,
    serialize_spec,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
