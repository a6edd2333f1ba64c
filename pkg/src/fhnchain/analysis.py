"""Steady-state analytics for chain runs.

Turns kick logs and sampled trajectories into spike trains, periodicity
verdicts, loop signatures, per-node regime labels, regime-boundary
locations, and traveling-wave diagnostics.

Loops are delimited by the kicks a node receives.  A loop is "Large" when
its voltage peak clears the firing threshold, else "small".  Small loops
split further by geometry: a "flutter" peaks right of the rest abscissa
(a genuine sub-threshold oscillation around the rest point), while a
"glide" stays left of it (the kick arrived so early that the state merely
slid back toward rest).  Flutters are what make a pattern mixed-mode; a
periodic pattern whose small loops are all glides is a plain periodic
depolarization train at a multiple of the forcing period.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import quad

from .errors import (
    BoundaryInconsistencyError,
    DivergenceError,
    InsufficientDataError,
    ParameterError,
)
from .integrator import SimResult, simulate
from .model import ModelParams, cubic

SIMPLE_PERIODIC = "SimplePeriodic"
SIMPLE_MMO = "SimpleMMO"
COMPLEX_MMO = "ComplexMMO"
BLOCKED = "Blocked"
UNCLASSIFIED = "Unclassified"

LABELS = (SIMPLE_PERIODIC, SIMPLE_MMO, COMPLEX_MMO, BLOCKED, UNCLASSIFIED)

#: Voltage beyond which a node counts as blown up (the bounded attractors
#: stay within |u| < 2.5 for the default constants).
U_BLOWUP = 3.0

#: Recurrence tolerance at kick instants (sup-norm on (u, v)).
RECURRENCE_TOL = 1e-3

#: Minimum post-transient kicks for a periodicity verdict.
MIN_KICKS = 6

LARGE = "Large"
SMALL = "small"


def default_transient(alpha: float) -> float:
    """Discard horizon: fixed 200 for fast forcing, 4 periods otherwise."""
    return 200.0 if alpha <= 10.0 else 4.0 * alpha


@dataclass(frozen=True)
class SpikeTrain:
    """Ordered kick-arrival times at one node."""

    node: int
    times: np.ndarray

    def __post_init__(self):
        if len(self.times) > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError(f"kick times at node {self.node} not strictly increasing")


def spike_trains(result: SimResult) -> list[SpikeTrain]:
    return [SpikeTrain(node=j + 1, times=times)
            for j, times in enumerate(result.kicks.times)]


@dataclass(frozen=True)
class PeriodVerdict:
    periodic: bool
    period: float
    n_intervals: int  # kick intervals per period (0 when aperiodic)


def detect_period(states: np.ndarray, times: np.ndarray,
                  tol: float = RECURRENCE_TOL) -> PeriodVerdict:
    """Smallest block length m whose kick-instant states recur within tol.

    Compares the last two m-blocks of (u, v) states elementwise in sup-norm;
    the period is the mean time offset between matched kicks.  Needs at
    least MIN_KICKS instants.
    """
    states = np.asarray(states, dtype=float)
    times = np.asarray(times, dtype=float)
    n = len(times)
    if n < MIN_KICKS:
        raise InsufficientDataError(
            f"need at least {MIN_KICKS} kick instants, got {n}")
    for m in range(1, n // 2 + 1):
        if np.max(np.abs(states[n - 2 * m:n - m] - states[n - m:])) < tol:
            period = float(np.mean(times[n - m:] - times[n - 2 * m:n - m]))
            return PeriodVerdict(True, period, m)
    return PeriodVerdict(False, 0.0, 0)


def extract_loops(t: np.ndarray, u: np.ndarray, kick_times: np.ndarray,
                  thresh: float) -> list[str]:
    """Label the inter-kick loops Large/small by their voltage peak."""
    labels, _ = _loops_with_peaks(t, u, kick_times, thresh)
    return labels


def _loops_with_peaks(t, u, kick_times, thresh):
    if len(kick_times) < 2:
        raise InsufficientDataError(
            f"need at least 2 kicks to delimit a loop, got {len(kick_times)}")
    labels, peaks = [], []
    for lo, hi in zip(kick_times[:-1], kick_times[1:]):
        seg = u[(t >= lo) & (t <= hi)]
        if len(seg) == 0:
            raise InsufficientDataError(f"no samples inside loop [{lo}, {hi}]")
        peak = float(seg.max())
        peaks.append(peak)
        labels.append(LARGE if peak >= thresh else SMALL)
    return labels, peaks


@dataclass(frozen=True)
class MmoSignature:
    """Steady-state loop pattern over one detected period.

    `pattern` is rotated to its lexicographically smallest cyclic form.
    `large_runs` lists the lengths of consecutive-Large stretches between
    small loops (cyclically); it is empty when no small loop breaks the
    train, so `max_consecutive_large` is 0 for a pure depolarization train.
    """

    pattern: tuple[str, ...]
    n_large: int
    n_small: int
    period: float
    periodic: bool
    large_runs: tuple[int, ...]
    flutter_count: int  # small loops peaking right of the rest abscissa

    @property
    def max_consecutive_large(self) -> int:
        return max(self.large_runs) if self.large_runs else 0


def _canonical_rotation(pattern: tuple[str, ...]) -> tuple[str, ...]:
    rotations = [pattern[i:] + pattern[:i] for i in range(len(pattern))]
    return min(rotations)


def _large_runs(pattern: tuple[str, ...]) -> tuple[int, ...]:
    if SMALL not in pattern or LARGE not in pattern:
        return ()
    first_small = pattern.index(SMALL)
    rotated = pattern[first_small:] + pattern[:first_small]
    runs, current = [], 0
    for label in rotated[1:]:
        if label == LARGE:
            current += 1
        else:
            runs.append(current)
            current = 0
    runs.append(current)
    return tuple(runs)


@dataclass(frozen=True)
class RegimeReport:
    """Label, signature, and steady period of one node's response."""

    alpha: float
    label: str
    signature: MmoSignature | None
    steady_period: float | None
    node: int = 1


def _blocked(result: SimResult, node: int, alpha: float) -> bool:
    u = result.node_u(node)
    if len(u) and float(np.max(u)) > U_BLOWUP:
        return True
    # Dwell test: trapped on the upswing branch for more than three
    # forcing periods without resetting left.
    right = u > 1.0
    if not right.any():
        return False
    edges = np.flatnonzero(np.diff(right.astype(np.int8)))
    bounds = np.concatenate(([0], edges + 1, [len(right)]))
    dt_sample = result.t[1] - result.t[0] if len(result.t) > 1 else 0.0
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        if right[lo] and (hi - lo) * dt_sample > 3.0 * alpha:
            return True
    return False


def classify_node(result: SimResult, node: int) -> RegimeReport:
    """Regime verdict for one node of a finished run, from its kick log."""
    params = result.params
    if _blocked(result, node, params.alpha):
        return RegimeReport(alpha=params.alpha, label=BLOCKED, signature=None,
                            steady_period=None, node=node)

    kick_times = result.kicks.node_times(node)
    mask = kick_times >= params.t_transient
    kick_times = kick_times[mask]
    states = np.stack([result.kicks.u_pre[node - 1][mask],
                       result.kicks.v_pre[node - 1][mask]], axis=1) \
        if mask.any() else np.empty((0, 2))
    try:
        verdict = detect_period(states, kick_times)
    except InsufficientDataError:
        return RegimeReport(alpha=params.alpha, label=UNCLASSIFIED,
                            signature=None, steady_period=None, node=node)
    if not verdict.periodic:
        return RegimeReport(alpha=params.alpha, label=UNCLASSIFIED,
                            signature=None, steady_period=None, node=node)

    m = verdict.n_intervals
    window = kick_times[-(m + 1):]
    labels, peaks = _loops_with_peaks(
        result.t, result.node_u(node), window, params.K)
    pattern = _canonical_rotation(tuple(labels))
    flutters = sum(1 for lab, peak in zip(labels, peaks)
                   if lab == SMALL and peak > params.c)
    signature = MmoSignature(
        pattern=pattern,
        n_large=pattern.count(LARGE),
        n_small=pattern.count(SMALL),
        period=verdict.period,
        periodic=True,
        large_runs=_large_runs(pattern),
        flutter_count=flutters,
    )
    label = _label_for(signature)
    return RegimeReport(alpha=params.alpha, label=label, signature=signature,
                        steady_period=verdict.period, node=node)


def _label_for(sig: MmoSignature) -> str:
    if sig.n_large == 0:
        return UNCLASSIFIED
    if sig.flutter_count == 0:
        # Any small loops present are glides; the depolarization train is
        # plain periodic (possibly at a multiple of the forcing period).
        return SIMPLE_PERIODIC
    if sig.n_large == 1 and sig.n_small == 1:
        return SIMPLE_MMO
    return COMPLEX_MMO


def classify_regime(params: ModelParams, sample_every: int = 10,
                    backend: str | None = None) -> RegimeReport:
    """Run the front node alone and classify its steady-state response."""
    single = replace(params, n_cells=1)
    try:
        result = simulate(single, sample_every=sample_every, backend=backend)
    except DivergenceError:
        return RegimeReport(alpha=params.alpha, label=BLOCKED, signature=None,
                            steady_period=None, node=1)
    return classify_node(result, 1)


def filtering_report(result: SimResult) -> list[RegimeReport]:
    """Classify every node of a finished multi-node run, front to back."""
    return [classify_node(result, node)
            for node in range(1, result.params.n_cells + 1)]


def _snap_to_grid(alpha: float, dt: float) -> float:
    return round(alpha / dt) * dt


def locate_boundary(params: ModelParams, label_low: str, label_high: str,
                    bracket: tuple[float, float], width: float = 0.01,
                    sample_every: int = 10) -> float:
    """Bisect the forcing period between two distinct regime labels.

    Midpoints are snapped to the dt grid.  An Unclassified midpoint is
    retried once with a doubled horizon before being reported as an
    inconsistency (carrying both sub-brackets).
    """
    if label_low == label_high:
        raise ParameterError("labels", "bracket labels must differ")
    dt = params.dt
    lo = _snap_to_grid(bracket[0], dt)
    hi = _snap_to_grid(bracket[1], dt)
    if not lo < hi:
        raise ParameterError("bracket", f"need low < high, got {bracket}")

    def label_at(alpha: float) -> str:
        report = classify_regime(replace(params, alpha=alpha),
                                 sample_every=sample_every)
        if report.label == UNCLASSIFIED:
            longer = replace(params, alpha=alpha, t_end=2.0 * params.t_end)
            report = classify_regime(longer, sample_every=sample_every)
        return report.label

    got_low = label_at(lo)
    got_high = label_at(hi)
    if got_low != label_low or got_high != label_high:
        raise ParameterError(
            "bracket", f"expected labels {label_low} -> {label_high} at the "
            f"ends, got {got_low} -> {got_high}")

    while hi - lo >= width:
        mid = _snap_to_grid(0.5 * (lo + hi), dt)
        if not lo < mid < hi:
            break
        label_mid = label_at(mid)
        if label_mid == label_low:
            lo = mid
        elif label_mid == label_high:
            hi = mid
        else:
            raise BoundaryInconsistencyError(
                alpha_mid=mid, label_mid=label_mid,
                bracket_low=(lo, mid), bracket_high=(mid, hi))
    return 0.5 * (lo + hi)


def propagation_lag(params: ModelParams) -> float:
    """Stimulus-to-crossing lag estimate for one node at rest.

    Fast-timescale quadrature from the rest abscissa to the firing
    threshold, with the recovery variable frozen at its kicked rest value.
    The wave speed is the reciprocal of this lag.
    """
    rest_v = cubic(params.c)

    def integrand(u: float) -> float:
        return 1.0 / (cubic(u) - rest_v + params.A)

    lo = min(params.c, params.K)
    hi = max(params.c, params.K)
    grid = np.linspace(lo, hi, 257)
    margin = np.min([cubic(x) - rest_v + params.A for x in grid])
    if margin <= 0.0:
        raise ParameterError(
            "A", "kick too small: the fast field stalls before threshold")
    value, _ = quad(integrand, params.c, params.K, epsabs=1e-12, epsrel=1e-12)
    return params.epsilon * value


@dataclass(frozen=True)
class WaveReport:
    """Inter-node kick delays and the traveling-wave summary."""

    delays: np.ndarray  # shape (n_pulses, n_cells - 1); delay of node j+1 after node j
    beta: float         # late-pulse mean inter-node delay
    speed: float        # nodes per time unit, 1/beta
    lag_estimate: float
    relative_discrepancy: float
    propagated: bool
    first_silent_node: int | None


def wave_diagnostics(result: SimResult) -> WaveReport:
    """Tabulate per-pulse inter-node delays and compare with the lag formula.

    A node that never received a kick makes this a propagation-failure
    finding (propagated=False), not an error.
    """
    params = result.params
    n = params.n_cells
    if n < 3:
        raise ParameterError("n_cells", f"wave diagnostics need >= 3 nodes, got {n}")
    counts = [result.kicks.count(j) for j in range(1, n + 1)]
    if min(counts) == 0:
        # Propagation failure is a finding, not a fault; the lag formula may
        # itself be undefined here (sub-threshold kicks stall the fast field).
        try:
            lag = propagation_lag(params)
        except ParameterError:
            lag = math.nan
        silent = counts.index(0) + 1
        return WaveReport(delays=np.empty((0, n - 1)), beta=math.nan,
                          speed=math.nan, lag_estimate=lag,
                          relative_discrepancy=math.nan, propagated=False,
                          first_silent_node=silent)
    lag = propagation_lag(params)
    n_pulses = min(counts)
    if n_pulses < 3:
        raise InsufficientDataError(
            f"need >= 3 kicks per node for wave diagnostics, got {n_pulses}")
    delays = np.empty((n_pulses, n - 1))
    for j in range(n - 1):
        a = result.kicks.times[j][:n_pulses]
        b = result.kicks.times[j + 1][:n_pulses]
        delays[:, j] = b - a
    beta = float(np.mean(delays[-1]))
    return WaveReport(delays=delays, beta=beta, speed=1.0 / beta,
                      lag_estimate=lag,
                      relative_discrepancy=abs(beta - lag) / lag,
                      propagated=True, first_silent_node=None)
