"""Kicked feedforward chains of excitable FitzHugh-Nagumo cells.

Simulation of the full chain, the exact singular-limit return-map machinery,
steady-state classification (periodic responses, mixed-mode oscillations,
blocked propagation), regime-boundary location, and traveling-wave
diagnostics, with a CLI front end.
"""

from .analysis import (
    BLOCKED,
    COMPLEX_MMO,
    LABELS,
    SIMPLE_MMO,
    SIMPLE_PERIODIC,
    UNCLASSIFIED,
    MmoSignature,
    PeriodVerdict,
    RegimeReport,
    SpikeTrain,
    WaveReport,
    classify_node,
    classify_regime,
    default_transient,
    detect_period,
    extract_loops,
    filtering_report,
    locate_boundary,
    propagation_lag,
    spike_trains,
    wave_diagnostics,
)
from .errors import (
    BoundaryInconsistencyError,
    BranchDomainError,
    DivergenceError,
    ExcitabilityError,
    FhnChainError,
    FlowSingularityError,
    GeometryError,
    InsufficientDataError,
    NoFixedPointError,
    ParameterError,
)
from .integrator import (
    BACKEND,
    CellState,
    ChainState,
    KickLog,
    SimResult,
    apply_kick,
    available_backends,
    detect_crossings,
    rk4_step,
    simulate,
)
from .model import (
    DEFAULTS,
    ModelParams,
    PhaseLandmarks,
    cubic,
    cubic_inverse,
    cubic_slope,
    landmarks,
)
from .singular import (
    FixedPointResult,
    ResetWindowCurves,
    ReturnMapSample,
    SingularPoint,
    fixed_point,
    flow,
    kick_resolve,
    reset_window_curves,
    return_map,
    time_of_flight,
)

__version__ = "0.1.0"
