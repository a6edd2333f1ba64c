"""Pure-Python chain stepper, the fallback when the compiled core is absent.

Arithmetic mirrors the compiled kernel operation for operation (same
expression shapes, same evaluation order) so the two backends produce
bit-identical trajectories and event logs.
"""

from __future__ import annotations

import math

import numpy as np

BACKEND = "python"


def run_chain(u0, v0, n_steps, dt, eps, c, lin, cub, amp, thresh,
              kick_stride, sample_every, u_divergence):
    """Integrate the chain for n_steps of size dt.

    Returns (sample_t, sample_u, sample_v, kick_node, kick_step, kick_upre,
    kick_vpre, cross_node, cross_step, status, div_step, div_node) where
    status is 0 on completion and 1 after a divergence abort.  Node indices
    are 1-based; kick pre-states are the receiving cell just before the kick.
    """
    n = len(u0)
    if n == 1:
        return _run_single(float(u0[0]), float(v0[0]), n_steps, dt, eps, c,
                           lin, cub, amp, thresh, kick_stride, sample_every,
                           u_divergence)

    u = np.array(u0, dtype=np.float64)
    v = np.array(v0, dtype=np.float64)
    inv_eps = 1.0 / eps
    half_dt = 0.5 * dt
    sixth_dt = dt / 6.0

    n_rec = n_steps // sample_every + 1
    rec_t = np.empty(n_rec)
    rec_u = np.empty((n_rec, n))
    rec_v = np.empty((n_rec, n))
    kick_node, kick_step, kick_upre, kick_vpre = [], [], [], []
    cross_node, cross_step = [], []
    status, div_step, div_node = 0, -1, -1

    rec_i = 0
    for s in range(n_steps):
        if kick_stride > 0 and s % kick_stride == 0:
            kick_node.append(1)
            kick_step.append(s)
            kick_upre.append(float(u[0]))
            kick_vpre.append(float(v[0]))
            v[0] = v[0] - amp
        if s % sample_every == 0:
            rec_t[rec_i] = s * dt
            rec_u[rec_i] = u
            rec_v[rec_i] = v
            rec_i += 1

        k1u = (lin * u + cub * (u * u * u) - v) * inv_eps
        k1v = u - c
        u2 = u + half_dt * k1u
        v2 = v + half_dt * k1v
        k2u = (lin * u2 + cub * (u2 * u2 * u2) - v2) * inv_eps
        k2v = u2 - c
        u3 = u + half_dt * k2u
        v3 = v + half_dt * k2v
        k3u = (lin * u3 + cub * (u3 * u3 * u3) - v3) * inv_eps
        k3v = u3 - c
        u4 = u + dt * k3u
        v4 = v + dt * k3v
        k4u = (lin * u4 + cub * (u4 * u4 * u4) - v4) * inv_eps
        k4v = u4 - c
        u_new = u + sixth_dt * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
        v_new = v + sixth_dt * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)

        bad = ~np.isfinite(u_new) | ~np.isfinite(v_new) | (np.abs(u_new) > u_divergence)
        if bad.any():
            status = 1
            div_step = s + 1
            div_node = int(np.argmax(bad)) + 1
            break

        crossed = (u < thresh) & (thresh <= u_new) & (v_new < 0.0)
        u, v = u_new, v_new
        for j in np.flatnonzero(crossed):
            cross_node.append(int(j) + 1)
            cross_step.append(s + 1)
            if j + 1 < n:
                kick_node.append(int(j) + 2)
                kick_step.append(s + 1)
                kick_upre.append(float(u[j + 1]))
                kick_vpre.append(float(v[j + 1]))
                v[j + 1] = v[j + 1] - amp

    if status == 0 and n_steps % sample_every == 0:
        rec_t[rec_i] = n_steps * dt
        rec_u[rec_i] = u
        rec_v[rec_i] = v
        rec_i += 1

    return (rec_t[:rec_i], rec_u[:rec_i], rec_v[:rec_i],
            np.asarray(kick_node, dtype=np.int64),
            np.asarray(kick_step, dtype=np.int64),
            np.asarray(kick_upre, dtype=np.float64),
            np.asarray(kick_vpre, dtype=np.float64),
            np.asarray(cross_node, dtype=np.int64),
            np.asarray(cross_step, dtype=np.int64),
            status, div_step, div_node)


def _run_single(u, v, n_steps, dt, eps, c, lin, cub, amp, thresh,
                kick_stride, sample_every, u_divergence):
    # Scalar fast path: plain floats beat ufunc dispatch for one cell.
    inv_eps = 1.0 / eps
    half_dt = 0.5 * dt
    sixth_dt = dt / 6.0

    n_rec = n_steps // sample_every + 1
    rec_t = np.empty(n_rec)
    rec_u = np.empty((n_rec, 1))
    rec_v = np.empty((n_rec, 1))
    kick_node, kick_step, kick_upre, kick_vpre = [], [], [], []
    cross_node, cross_step = [], []
    status, div_step, div_node = 0, -1, -1

    rec_i = 0
    for s in range(n_steps):
        if kick_stride > 0 and s % kick_stride == 0:
            kick_node.append(1)
            kick_step.append(s)
            kick_upre.append(u)
            kick_vpre.append(v)
            v = v - amp
        if s % sample_every == 0:
            rec_t[rec_i] = s * dt
            rec_u[rec_i, 0] = u
            rec_v[rec_i, 0] = v
            rec_i += 1

        k1u = (lin * u + cub * (u * u * u) - v) * inv_eps
        k1v = u - c
        u2 = u + half_dt * k1u
        v2 = v + half_dt * k1v
        k2u = (lin * u2 + cub * (u2 * u2 * u2) - v2) * inv_eps
        k2v = u2 - c
        u3 = u + half_dt * k2u
        v3 = v + half_dt * k2v
        k3u = (lin * u3 + cub * (u3 * u3 * u3) - v3) * inv_eps
        k3v = u3 - c
        u4 = u + dt * k3u
        v4 = v + dt * k3v
        k4u = (lin * u4 + cub * (u4 * u4 * u4) - v4) * inv_eps
        k4v = u4 - c
        u_new = u + sixth_dt * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
        v_new = v + sixth_dt * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)

        if not (math.isfinite(u_new) and math.isfinite(v_new)) or abs(u_new) > u_divergence:
            status = 1
            div_step = s + 1
            div_node = 1
            break

        if u < thresh and thresh <= u_new and v_new < 0.0:
            cross_node.append(1)
            cross_step.append(s + 1)
        u, v = u_new, v_new

    if status == 0 and n_steps % sample_every == 0:
        rec_t[rec_i] = n_steps * dt
        rec_u[rec_i, 0] = u
        rec_v[rec_i, 0] = v
        rec_i += 1

    return (rec_t[:rec_i], rec_u[:rec_i], rec_v[:rec_i],
            np.asarray(kick_node, dtype=np.int64),
            np.asarray(kick_step, dtype=np.int64),
            np.asarray(kick_upre, dtype=np.float64),
            np.asarray(kick_vpre, dtype=np.float64),
            np.asarray(cross_node, dtype=np.int64),
            np.asarray(cross_step, dtype=np.int64),
            status, div_step, div_node)
