"""Chain integration: RK4 stepping, periodic and triggered kicks, crossing log.

The hot loop lives in a compiled extension (``fhnchain._core``) with a
pure-Python twin (``fhnchain._core_py``) selected at import time; set
``FHNCHAIN_BACKEND=python`` or ``=compiled`` to force one.  Both produce
bit-identical output.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from .errors import DivergenceError, ParameterError
from .model import CUB, LIN, ModelParams, cubic

#: Abort threshold for |u|; far beyond any bounded attractor of the model.
U_DIVERGENCE = 1e100


def _load_backend(name: str):
    if name == "python":
        from . import _core_py
        return _core_py
    if name == "compiled":
        from . import _core
        return _core
    raise ValueError(f"unknown backend {name!r} (use 'compiled' or 'python')")


def _select_default():
    forced = os.environ.get("FHNCHAIN_BACKEND", "auto")
    if forced == "auto":
        try:
            return _load_backend("compiled")
        except ImportError:
            return _load_backend("python")
    return _load_backend(forced)


_KERNEL = _select_default()
BACKEND = _KERNEL.BACKEND


def available_backends() -> list[str]:
    names = []
    for name in ("compiled", "python"):
        try:
            _load_backend(name)
        except ImportError:
            continue
        names.append(name)
    return names


@dataclass(frozen=True)
class CellState:
    """One cell: membrane voltage u and recovery variable v."""

    u: float
    v: float


@dataclass
class ChainState:
    """Ordered cell states plus the previous-step voltages for crossing tests."""

    cells: list[CellState]
    prev_u: list[float]
    t: float = 0.0

    def __post_init__(self):
        if len(self.prev_u) != len(self.cells):
            raise ValueError("prev_u length must match cells")

    @classmethod
    def at_rest(cls, params: ModelParams) -> "ChainState":
        rest = CellState(params.c, cubic(params.c))
        return cls(cells=[rest] * params.n_cells,
                   prev_u=[rest.u] * params.n_cells, t=0.0)


def apply_kick(cell: CellState, amp: float) -> CellState:
    """Instantaneous decrement of the recovery variable by amp."""
    return CellState(cell.u, cell.v - amp)


def rk4_step(state: ChainState, params: ModelParams) -> ChainState:
    """One classical RK4 step of the smooth field for every cell.

    Kicks are not applied here; they are discrete events handled by the
    simulation loop.  Matches the kernels' arithmetic exactly.
    """
    if params.epsilon == 0.0:
        raise ParameterError(
            "epsilon", "no time stepper in the singular limit; use the "
            "manifold flow (fhnchain.singular) instead")
    inv_eps = 1.0 / params.epsilon
    dt = params.dt
    half_dt = 0.5 * dt
    sixth_dt = dt / 6.0
    c = params.c
    new_cells = []
    prev_u = []
    for cell in state.cells:
        u, v = cell.u, cell.v
        k1u = (LIN * u + CUB * (u * u * u) - v) * inv_eps
        k1v = u - c
        u2 = u + half_dt * k1u
        v2 = v + half_dt * k1v
        k2u = (LIN * u2 + CUB * (u2 * u2 * u2) - v2) * inv_eps
        k2v = u2 - c
        u3 = u + half_dt * k2u
        v3 = v + half_dt * k2v
        k3u = (LIN * u3 + CUB * (u3 * u3 * u3) - v3) * inv_eps
        k3v = u3 - c
        u4 = u + dt * k3u
        v4 = v + dt * k3v
        k4u = (LIN * u4 + CUB * (u4 * u4 * u4) - v4) * inv_eps
        k4v = u4 - c
        new_cells.append(CellState(
            u + sixth_dt * (k1u + 2.0 * k2u + 2.0 * k3u + k4u),
            v + sixth_dt * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)))
        prev_u.append(u)
    return ChainState(cells=new_cells, prev_u=prev_u, t=state.t + dt)


def detect_crossings(prev: ChainState, nxt: ChainState, thresh: float) -> list[int]:
    """Nodes (1-based, excluding the last) whose voltage crossed the firing
    threshold on upswing during the step, with the recovery variable still
    negative at step end."""
    hits = []
    n = len(nxt.cells)
    for j in range(n - 1):
        if prev.cells[j].u < thresh <= nxt.cells[j].u and nxt.cells[j].v < 0.0:
            hits.append(j + 1)
    return hits


@dataclass
class KickLog:
    """Per-node kick arrival times with the receiving cell's pre-kick state."""

    times: list[np.ndarray]
    u_pre: list[np.ndarray]
    v_pre: list[np.ndarray]

    @property
    def n_nodes(self) -> int:
        return len(self.times)

    def count(self, node: int) -> int:
        return len(self.times[node - 1])

    def node_times(self, node: int) -> np.ndarray:
        return self.times[node - 1]


@dataclass
class SimResult:
    """Sampled trajectory plus the kick and crossing event logs."""

    params: ModelParams
    t: np.ndarray
    u: np.ndarray  # shape (n_samples, n_cells)
    v: np.ndarray
    kicks: KickLog
    crossings: list[np.ndarray]  # per-node threshold-crossing times
    backend: str = BACKEND
    sample_every: int = 10

    def node_u(self, node: int) -> np.ndarray:
        return self.u[:, node - 1]

    def node_v(self, node: int) -> np.ndarray:
        return self.v[:, node - 1]


def _group_events(node_idx, step_idx, dt, n_cells, extras=()):
    times = []
    extra_groups = [[] for _ in extras]
    for node in range(1, n_cells + 1):
        mask = node_idx == node
        times.append(step_idx[mask] * dt)
        for out, arr in zip(extra_groups, extras):
            out.append(arr[mask])
    return times, extra_groups


def simulate(params: ModelParams, initial: ChainState | None = None,
             sample_every: int = 10, backend: str | None = None) -> SimResult:
    """Run the kicked chain from `initial` (default: every cell at rest).

    The front node is kicked on the schedule 0, alpha, 2*alpha, ... (strictly
    before t_end); a node's upswing threshold crossing during a step kicks
    its right neighbor at the end of that step.  Samples are recorded every
    `sample_every` steps.  Raises DivergenceError (with partial samples
    attached) if the state blows up.
    """
    if params.epsilon == 0.0:
        raise ParameterError(
            "epsilon", "must be > 0 for time integration; the singular limit "
            "is handled by fhnchain.singular")
    if sample_every < 1:
        raise ParameterError("sample_every", f"must be >= 1, got {sample_every}")
    kernel = _KERNEL if backend is None else _load_backend(backend)

    if initial is None:
        initial = ChainState.at_rest(params)
    if len(initial.cells) != params.n_cells:
        raise ParameterError("n_cells", "initial state length mismatch")
    u0 = np.array([cell.u for cell in initial.cells], dtype=np.float64)
    v0 = np.array([cell.v for cell in initial.cells], dtype=np.float64)

    (rec_t, rec_u, rec_v, kick_node, kick_step, kick_upre, kick_vpre,
     cross_node, cross_step, status, div_step, div_node) = kernel.run_chain(
        u0, v0, params.n_steps, params.dt, params.epsilon, params.c,
        LIN, CUB, params.A, params.K, params.kick_stride, sample_every,
        U_DIVERGENCE)

    kick_times, (upre, vpre) = _group_events(
        kick_node, kick_step, params.dt, params.n_cells, (kick_upre, kick_vpre))
    cross_times, _ = _group_events(cross_node, cross_step, params.dt, params.n_cells)

    result = SimResult(
        params=params, t=rec_t, u=rec_u, v=rec_v,
        kicks=KickLog(times=kick_times, u_pre=upre, v_pre=vpre),
        crossings=cross_times, backend=kernel.BACKEND,
        sample_every=sample_every)
    if status != 0:
        raise DivergenceError(time=div_step * params.dt, node=int(div_node),
                              partial=result)
    return result
