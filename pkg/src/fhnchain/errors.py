"""Exception types shared across the package."""

from __future__ import annotations


class FhnChainError(Exception):
    """Base class for package-specific errors."""


class ParameterError(FhnChainError, ValueError):
    """A model or run parameter violates its constraint."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class ExcitabilityError(ParameterError):
    """Rest abscissa outside the excitable regime (requires c < -1)."""

    def __init__(self, c: float):
        super().__init__("c", f"must be < -1 (excitable rest state), got {c}")


class BranchDomainError(FhnChainError, ValueError):
    """Requested value lies outside the range of the requested cubic branch."""


class FlowSingularityError(FhnChainError, ValueError):
    """Slow flow endpoint coincides with the rest abscissa (infinite time)."""


class GeometryError(FhnChainError, ValueError):
    """A kicked point has no landing site on the critical manifold."""


class NoFixedPointError(FhnChainError):
    """The return map has no sign change in the searched bracket."""

    def __init__(self, message: str, scan_v=None, scan_gap=None):
        self.scan_v = scan_v
        self.scan_gap = scan_gap
        super().__init__(message)


class DivergenceError(FhnChainError):
    """State became non-finite (or astronomically large) during integration."""

    def __init__(self, time: float, node: int, partial=None):
        self.time = time
        self.node = node
        self.partial = partial  # SimResult with samples up to the blow-up
        super().__init__(f"state diverged at t={time:g} in node {node}")


class InsufficientDataError(FhnChainError):
    """Too few kicks or samples in the analysis window."""


class BoundaryInconsistencyError(FhnChainError):
    """Bisection midpoint produced a label matching neither bracket end."""

    def __init__(self, alpha_mid: float, label_mid: str,
                 bracket_low: tuple, bracket_high: tuple):
        self.alpha_mid = alpha_mid
        self.label_mid = label_mid
        self.bracket_low = bracket_low
        self.bracket_high = bracket_high
        super().__init__(
            f"label {label_mid!r} at alpha={alpha_mid:g} matches neither "
            f"bracket end; sub-brackets {bracket_low} and {bracket_high}"
        )
