"""Zero-timescale-ratio hybrid flow on the critical manifold.

At epsilon = 0 the state lives on the attracting branches of the cubic
nullcline; kicks resolve through instantaneous horizontal transport, the
slow drift follows closed-form transit times, and the fold at (1, 2)
triggers an instantaneous jump to the left branch.  The kick-plus-flow
return map on left-branch heights and its fixed point quantify the
periodic threshold-crossing response.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import (
    FlowSingularityError,
    GeometryError,
    NoFixedPointError,
    ParameterError,
)
from .model import CUB, LIN, ModelParams, cubic, cubic_inverse

#: Closest approach to the rest abscissa; the drift time into it diverges
#: logarithmically, so the flow parks this far away instead.
EQUILIBRIUM_GAP = 1e-13

#: Fold coordinates of the default cubic.
FOLD_RIGHT_U, FOLD_RIGHT_V = 1.0, 2.0
FOLD_LEFT_U, FOLD_LEFT_V = -1.0, -2.0


@dataclass(frozen=True)
class SingularPoint:
    """Hybrid state: attracting branch tag plus voltage on that branch."""

    branch: str  # "left" or "right"; the middle branch repels and is never held
    u: float

    def __post_init__(self):
        if self.branch == "left":
            if self.u > FOLD_LEFT_U:
                raise ParameterError("u", f"left branch needs u <= -1, got {self.u}")
        elif self.branch == "right":
            if self.u < FOLD_RIGHT_U:
                raise ParameterError("u", f"right branch needs u >= 1, got {self.u}")
        else:
            raise ParameterError("branch", f"must be 'left' or 'right', got {self.branch!r}")

    @property
    def v(self) -> float:
        return cubic(self.u)


def time_of_flight(u1: float, u2: float, c: float) -> float:
    """Slow-drift duration between voltages u1 and u2 on one branch segment.

    Closed-form antiderivative of slope(u)/(u - c); positive when the
    direction of travel matches the drift (recovery rate u - c).  Both
    endpoints must sit strictly on the same side of the rest abscissa,
    where the drift time diverges.
    """
    if u1 == c or u2 == c:
        raise FlowSingularityError(
            f"transit time into the rest abscissa u={c} is infinite")
    s1 = u1 - c
    s2 = u2 - c
    if (s1 > 0.0) != (s2 > 0.0):
        raise ValueError(
            f"u1={u1} and u2={u2} straddle the rest abscissa {c}; "
            "the slow drift never crosses it")
    log_term = (LIN + 3.0 * CUB * c * c) * math.log(s2 / s1)
    return log_term + 6.0 * CUB * c * (u2 - u1) + 1.5 * CUB * (s2 * s2 - s1 * s1)


def _invert_flight_time(u_start: float, duration: float, lo: float, hi: float,
                        c: float) -> float:
    """Voltage u with time_of_flight(u_start, u) == duration, u in [lo, hi]."""
    return brentq(lambda x: time_of_flight(u_start, x, c) - duration,
                  lo, hi, xtol=1e-13)


def kick_resolve(p: SingularPoint, amp: float) -> SingularPoint:
    """Landing point after a kick of size amp followed by fast horizontal
    transport to the first nullcline intersection on the right.

    From the left branch the kicked height either still meets the left
    branch (a small reset, landing closer to the fold) or drops below the
    left fold and carries across to the right branch (a depolarization).
    From the right branch the landing stays on the right branch.
    """
    w = cubic(p.u) - amp
    if p.branch == "left" and w > FOLD_LEFT_V:
        landing = cubic_inverse(w, "left")
        if landing > p.u:
            return SingularPoint("left", landing)
    if w > FOLD_RIGHT_V:
        raise GeometryError(
            f"kicked height {w} exceeds the right branch range (v <= 2)")
    return SingularPoint("right", cubic_inverse(w, "right"))


def flow(p: SingularPoint, duration: float, c: float) -> SingularPoint:
    """Advance the slow drift for `duration`, jumping at the right fold.

    On the right branch the drift ascends to the fold (1, 2) and relands on
    the left branch at u = -2.  On the left branch the drift approaches the
    rest point from either side without reaching it; the approach is capped
    EQUILIBRIUM_GAP away.
    """
    if duration < 0.0:
        raise ValueError(f"duration must be >= 0, got {duration}")
    remaining = duration
    branch, u = p.branch, p.u
    while True:
        if remaining == 0.0:
            return SingularPoint(branch, u)
        if branch == "right":
            to_fold = time_of_flight(u, FOLD_RIGHT_U, c)
            if remaining < to_fold:
                return SingularPoint(
                    "right", _invert_flight_time(u, remaining, FOLD_RIGHT_U, u, c))
            remaining -= to_fold
            branch, u = "left", cubic_inverse(FOLD_RIGHT_V, "left")
        else:
            if u == c:
                return SingularPoint("left", u)
            cap = c - EQUILIBRIUM_GAP if u < c else c + EQUILIBRIUM_GAP
            if (u < c and u >= cap) or (u > c and u <= cap):
                return SingularPoint("left", u)
            to_cap = time_of_flight(u, cap, c)
            if remaining >= to_cap:
                return SingularPoint("left", cap)
            lo, hi = (u, cap) if u < c else (cap, u)
            return SingularPoint(
                "left", _invert_flight_time(u, remaining, lo, hi, c))


@dataclass(frozen=True)
class ReturnMapSample:
    """One evaluation of the kick-plus-flow map on left-branch heights."""

    v_in: float
    v_out: float
    defined: bool  # False when the flow ends away from the left branch


def return_map(v: float, params: ModelParams) -> ReturnMapSample:
    """Map a left-branch height through kick and a forcing-period drift."""
    start = SingularPoint("left", cubic_inverse(v, "left"))
    end = flow(kick_resolve(start, params.A), params.alpha, params.c)
    return ReturnMapSample(v_in=v, v_out=cubic(end.u),
                           defined=end.branch == "left")


@dataclass(frozen=True)
class FixedPointResult:
    """Fixed point of the return map with bracketing witnesses."""

    v_star: float
    derivative: float
    v_low: float
    v_high: float
    gap_low: float   # map(v_low) - v_low, positive at the bracket bottom
    gap_high: float  # map(v_high) - v_high, negative at the bracket top


def fixed_point(params: ModelParams, alpha_min_search: float = 9.0,
                scan_points: int = 65, bisect_tol: float = 1e-10,
                derivative_step: float = 1e-6) -> FixedPointResult:
    """Locate the unique periodic height of the depolarizing return map.

    Scans left-branch heights whose kick clears the left fold for a sign
    change of map(v) - v, then bisects.  Small-reset heights are excluded:
    the periodic orbit of interest crosses the firing threshold.
    """
    if params.alpha < alpha_min_search:
        raise NoFixedPointError(
            f"alpha={params.alpha} below the search threshold "
            f"{alpha_min_search}; the depolarizing map may have no fixed point")
    rest_v = cubic(params.c)
    v_top = params.A + FOLD_LEFT_V  # kicked height hits the fold exactly
    v_low = rest_v + 1e-9
    if v_top <= v_low:
        raise NoFixedPointError(
            f"kick amplitude A={params.A} admits no depolarizing heights "
            "above the rest height")

    def gap(v: float) -> float:
        sample = return_map(v, params)
        if not sample.defined:
            return math.nan
        return sample.v_out - v

    gap_low = gap(v_low)
    if math.isnan(gap_low):
        raise NoFixedPointError(
            f"map undefined at the rest height for alpha={params.alpha} "
            "(the drift ends off the left branch)")

    if gap_low <= 0.0:
        # Long-relaxation regime: the orbit parks at the equilibrium cap, so
        # the fixed point is pinched between the rest height and v_low.
        # Sign-driven bisection without asserting the noisy lower-end sign.
        lo, hi = rest_v + EQUILIBRIUM_GAP, v_low
        witness_low, witness_high = lo, hi
        g_lo, g_hi = gap(lo), gap_low
    else:
        scan = np.linspace(v_low, v_top, scan_points)
        v_bar = None
        gap_bar = math.nan
        gaps = []
        for v in scan[1:]:
            g = gap(float(v))
            gaps.append(g)
            if not math.isnan(g) and g < 0.0:
                v_bar = float(v)
                gap_bar = g
                break
        if v_bar is None:
            raise NoFixedPointError(
                f"map(v) - v has no sign change on [{v_low}, {v_top}] at "
                f"alpha={params.alpha}",
                scan_v=scan[1:len(gaps) + 1].tolist(), scan_gap=gaps)
        lo, hi = v_low, v_bar
        witness_low, witness_high = lo, hi
        g_lo, g_hi = gap_low, gap_bar

    while hi - lo > bisect_tol:
        mid = 0.5 * (lo + hi)
        g_mid = gap(mid)
        if math.isnan(g_mid):
            raise NoFixedPointError(
                f"map undefined at v={mid} during bisection (alpha={params.alpha})")
        if g_mid > 0.0:
            lo = mid
        else:
            hi = mid
    v_star = 0.5 * (lo + hi)

    h = derivative_step
    derivative = (return_map(v_star + h, params).v_out
                  - return_map(v_star - h, params).v_out) / (2.0 * h)
    return FixedPointResult(v_star=v_star, derivative=derivative,
                            v_low=witness_low, v_high=witness_high,
                            gap_low=g_lo, gap_high=g_hi)


@dataclass(frozen=True)
class ResetWindowCurves:
    """Reference timings behind the one-large-one-small oscillation window.

    `upper_reset_time` and `lower_reset_time` bound the kick arrival times
    (measured from a kick at rest) for which the next kick produces a small
    reset onto the left branch; `approach_times[i]` is the drift duration
    from the left fold to within `deltas[i]` of the rest abscissa, i.e. the
    renewal time after the deepest small reset.
    """

    deltas: np.ndarray
    approach_times: np.ndarray
    upper_reset_time: float
    lower_reset_time: float


def reset_window_curves(c: float = -1.2, amp: float = 1.0,
                        deltas: np.ndarray | None = None) -> ResetWindowCurves:
    """Tabulate the small-reset window timings over a grid of offsets.

    deltas are offsets above the rest abscissa (0 < delta < |c| - 1); the
    approach time diverges logarithmically as delta -> 0.
    """
    rest_v = cubic(c)
    if amp <= rest_v - FOLD_LEFT_V:
        raise ParameterError("A", "kick too small to clear the left fold from rest")
    if amp >= FOLD_RIGHT_V - rest_v:
        raise ParameterError("A", "kick so large the reset heights leave the left branch")
    if deltas is None:
        deltas = np.geomspace(1e-4, 0.95 * (-c - 1.0), 50)
    deltas = np.asarray(deltas, dtype=float)
    if np.any(deltas <= 0.0):
        raise ValueError("deltas must be positive (the rest point is unreachable)")
    if np.any(c + deltas > FOLD_LEFT_U):
        raise ValueError(f"deltas must keep c + delta <= -1, got max {deltas.max()}")

    drop = cubic_inverse(rest_v - amp, "right")
    to_fold = time_of_flight(drop, FOLD_RIGHT_U, c)
    reland = cubic_inverse(FOLD_RIGHT_V, "left")

    def orbit_time_to_height(v_target: float) -> float:
        return to_fold + time_of_flight(reland, cubic_inverse(v_target, "left"), c)

    approach = np.array([time_of_flight(FOLD_LEFT_U, c + d, c) for d in deltas])
    return ResetWindowCurves(
        deltas=deltas,
        approach_times=approach,
        upper_reset_time=orbit_time_to_height(rest_v + amp),
        lower_reset_time=orbit_time_to_height(FOLD_LEFT_V + amp),
    )
