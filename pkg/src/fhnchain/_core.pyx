# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled chain stepper: fixed-step RK4 with impulsive kick events.

Must stay operation-for-operation identical to the pure-Python twin in
``_core_py`` so both backends yield bit-identical results.
"""

from libc.math cimport fabs, isfinite

import numpy as np

BACKEND = "compiled"


def run_chain(object u0, object v0, long n_steps, double dt, double eps,
              double c, double lin, double cub, double amp, double thresh,
              long kick_stride, long sample_every, double u_divergence):
    """Integrate the chain for n_steps of size dt.

    Same contract as the fallback: returns (sample_t, sample_u, sample_v,
    kick_node, kick_step, kick_upre, kick_vpre, cross_node, cross_step,
    status, div_step, div_node) with 1-based node indices.
    """
    cdef double[::1] u = np.array(u0, dtype=np.float64).ravel()
    cdef double[::1] v = np.array(v0, dtype=np.float64).ravel()
    cdef Py_ssize_t n = u.shape[0]

    cdef double inv_eps = 1.0 / eps
    cdef double half_dt = 0.5 * dt
    cdef double sixth_dt = dt / 6.0

    cdef long n_rec = n_steps // sample_every + 1
    rec_t_arr = np.empty(n_rec)
    rec_u_arr = np.empty((n_rec, n))
    rec_v_arr = np.empty((n_rec, n))
    cdef double[::1] rec_t = rec_t_arr
    cdef double[:, ::1] rec_u = rec_u_arr
    cdef double[:, ::1] rec_v = rec_v_arr
    crossed_arr = np.zeros(n, dtype=np.int8)
    cdef signed char[::1] crossed = crossed_arr

    kick_node, kick_step, kick_upre, kick_vpre = [], [], [], []
    cross_node, cross_step = [], []
    cdef int status = 0
    cdef long div_step = -1, div_node = -1

    cdef long rec_i = 0, s = 0
    cdef Py_ssize_t j, bad
    cdef bint any_cross
    cdef double uj, vj, u2, v2, u3, v3, u4, v4, un, vn
    cdef double k1u, k1v, k2u, k2v, k3u, k3v, k4u, k4v

    for s in range(n_steps):
        if kick_stride > 0 and s % kick_stride == 0:
            kick_node.append(1)
            kick_step.append(s)
            kick_upre.append(u[0])
            kick_vpre.append(v[0])
            v[0] = v[0] - amp
        if s % sample_every == 0:
            rec_t[rec_i] = s * dt
            for j in range(n):
                rec_u[rec_i, j] = u[j]
                rec_v[rec_i, j] = v[j]
            rec_i += 1

        bad = -1
        any_cross = False
        for j in range(n):
            uj = u[j]
            vj = v[j]
            k1u = (lin * uj + cub * (uj * uj * uj) - vj) * inv_eps
            k1v = uj - c
            u2 = uj + half_dt * k1u
            v2 = vj + half_dt * k1v
            k2u = (lin * u2 + cub * (u2 * u2 * u2) - v2) * inv_eps
            k2v = u2 - c
            u3 = uj + half_dt * k2u
            v3 = vj + half_dt * k2v
            k3u = (lin * u3 + cub * (u3 * u3 * u3) - v3) * inv_eps
            k3v = u3 - c
            u4 = uj + dt * k3u
            v4 = vj + dt * k3v
            k4u = (lin * u4 + cub * (u4 * u4 * u4) - v4) * inv_eps
            k4v = u4 - c
            un = uj + sixth_dt * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
            vn = vj + sixth_dt * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)

            if (not (isfinite(un) and isfinite(vn)) or fabs(un) > u_divergence) and bad < 0:
                bad = j
            if uj < thresh and thresh <= un and vn < 0.0:
                crossed[j] = 1
                any_cross = True
            else:
                crossed[j] = 0
            u[j] = un
            v[j] = vn

        if bad >= 0:
            status = 1
            div_step = s + 1
            div_node = bad + 1
            break

        if any_cross:
            for j in range(n):
                if crossed[j]:
                    cross_node.append(j + 1)
                    cross_step.append(s + 1)
                    if j + 1 < n:
                        kick_node.append(j + 2)
                        kick_step.append(s + 1)
                        kick_upre.append(u[j + 1])
                        kick_vpre.append(v[j + 1])
                        v[j + 1] = v[j + 1] - amp

    if status == 0 and n_steps % sample_every == 0:
        rec_t[rec_i] = n_steps * dt
        for j in range(n):
            rec_u[rec_i, j] = u[j]
            rec_v[rec_i, j] = v[j]
        rec_i += 1

    return (rec_t_arr[:rec_i], rec_u_arr[:rec_i], rec_v_arr[:rec_i],
            np.asarray(kick_node, dtype=np.int64),
            np.asarray(kick_step, dtype=np.int64),
            np.asarray(kick_upre, dtype=np.float64),
            np.asarray(kick_vpre, dtype=np.float64),
            np.asarray(cross_node, dtype=np.int64),
            np.asarray(cross_step, dtype=np.int64),
            status, div_step, div_node)
