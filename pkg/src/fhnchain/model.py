"""Cubic nonlinearity, its branch-wise inverses, and phase-plane landmarks.

The voltage nullcline is the odd cubic ``LIN*u + CUB*u**3``.  Everything
downstream (closed-form transit times, kick geometry, the compiled stepper)
reads the two coefficients from here, so a different negative-leading cubic
can be swapped in at a single point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import BranchDomainError, ExcitabilityError, ParameterError

LIN = 3.0
CUB = -1.0

#: Default constants used throughout the numerical experiments.
DEFAULTS = {"epsilon": 0.1, "c": -1.2, "A": 1.0, "K": 0.0, "dt": 0.001}

BRANCHES = ("left", "middle", "right")

#: Relative slack when checking that a duration is a multiple of dt.
GRID_TOL = 1e-9


def cubic(u: float) -> float:
    """Nullcline height at voltage u."""
    return LIN * u + CUB * (u * u * u)


def cubic_slope(u: float) -> float:
    """Derivative of the nullcline cubic at voltage u."""
    return LIN + 3.0 * CUB * (u * u)


def cubic_inverse(v: float, branch: str) -> float:
    """Voltage on the requested branch of the cubic with nullcline height v.

    Branches split at the folds u = -1 and u = +1: "left" is u <= -1
    (v >= -2), "middle" is |u| <= 1 (|v| <= 2), "right" is u >= 1 (v <= 2).
    Safeguarded Newton inside a branch-specific bracket; accurate to about
    1e-13 in u even next to the folds where the slope vanishes.
    """
    if branch == "left":
        if v < -2.0:
            raise BranchDomainError(f"left branch needs v >= -2, got {v}")
        lo, hi = -(1.0 + math.sqrt(1.0 + abs(v))), -1.0
    elif branch == "right":
        if v > 2.0:
            raise BranchDomainError(f"right branch needs v <= 2, got {v}")
        lo, hi = 1.0, 1.0 + math.sqrt(1.0 + abs(v))
    elif branch == "middle":
        if abs(v) > 2.0:
            raise BranchDomainError(f"middle branch needs |v| <= 2, got {v}")
        lo, hi = -1.0, 1.0
    else:
        raise ValueError(f"unknown branch {branch!r}")

    # Bracket sign anchor: the cubic is monotone within a branch.
    ga_positive = (cubic(lo) - v) > 0.0
    a, b = lo, hi
    u = 0.5 * (a + b)
    for _ in range(200):
        gu = cubic(u) - v
        if gu == 0.0:
            return u
        if (gu > 0.0) == ga_positive:
            a = u
        else:
            b = u
        slope = cubic_slope(u)
        cand = u - gu / slope if slope != 0.0 else math.inf
        if not (min(a, b) < cand < max(a, b)):
            cand = 0.5 * (a + b)
        if abs(b - a) < 1e-14 or abs(cand - u) < 1e-15 * max(1.0, abs(u)):
            return cand
        u = cand
    return u


@dataclass(frozen=True)
class PhaseLandmarks:
    """Canonical geometric anchors of the phase plane."""

    equilibrium: tuple[float, float]
    fold_right: tuple[float, float] = (1.0, 2.0)
    fold_left: tuple[float, float] = (-1.0, -2.0)
    landing_from_right_fold: float = -2.0
    landing_from_left_fold: float = 2.0


def landmarks(c: float) -> PhaseLandmarks:
    """Landmarks for rest abscissa c (the rest state sits on the cubic)."""
    return PhaseLandmarks(equilibrium=(c, cubic(c)))


def _check_grid_multiple(name: str, value: float, dt: float) -> int:
    steps = round(value / dt)
    if steps < 1 or abs(steps * dt - value) > GRID_TOL * max(1.0, abs(value)):
        raise ParameterError(
            name, f"must be a positive integer multiple of dt={dt}, got {value}"
        )
    return steps


@dataclass(frozen=True)
class ModelParams:
    """Model constants plus numerics settings for one run.

    epsilon = 0 selects the singular limit; the time stepper rejects it and
    the manifold-flow module takes over.
    """

    alpha: float
    epsilon: float = DEFAULTS["epsilon"]
    c: float = DEFAULTS["c"]
    A: float = DEFAULTS["A"]
    K: float = DEFAULTS["K"]
    dt: float = DEFAULTS["dt"]
    n_cells: int = 1
    t_end: float = 600.0
    t_transient: float = 200.0

    def __post_init__(self):
        if self.epsilon < 0.0:
            raise ParameterError("epsilon", f"must be >= 0, got {self.epsilon}")
        if self.dt <= 0.0:
            raise ParameterError("dt", f"must be > 0, got {self.dt}")
        if self.alpha <= 0.0:
            raise ParameterError("alpha", f"must be > 0, got {self.alpha}")
        if self.A <= 0.0:
            raise ParameterError("A", f"must be > 0, got {self.A}")
        if self.c >= -1.0:
            raise ExcitabilityError(self.c)
        if int(self.n_cells) != self.n_cells or self.n_cells < 1:
            raise ParameterError("n_cells", f"must be an integer >= 1, got {self.n_cells}")
        if self.t_transient < 0.0:
            raise ParameterError("t_transient", f"must be >= 0, got {self.t_transient}")
        if self.t_end <= self.t_transient:
            raise ParameterError(
                "t_end", f"must exceed t_transient={self.t_transient}, got {self.t_end}"
            )
        # Kick times are snapped to the integration grid; demand exact
        # representability so runs stay bit-reproducible.
        _check_grid_multiple("alpha", self.alpha, self.dt)
        _check_grid_multiple("t_end", self.t_end, self.dt)

    @property
    def n_steps(self) -> int:
        return round(self.t_end / self.dt)

    @property
    def kick_stride(self) -> int:
        """Steps between scheduled front-node kicks."""
        return round(self.alpha / self.dt)

    @property
    def equilibrium(self) -> tuple[float, float]:
        return (self.c, cubic(self.c))
