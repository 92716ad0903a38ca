# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled trial kernel.

Keep every expression tree in sync with _pure.py: the two backends are
required to produce bit-identical trajectories from the same Generator.
Draw order per slot is [x_1 .. x_L, z], one ziggurat call each, which is the
same flat sequence the fallback consumes through standard_normal((n, L+1)).
The build disables FP contraction so these polynomials round like NumPy's.
"""

import numpy as np

from cpython.pycapsule cimport PyCapsule_GetPointer
from libc.math cimport floor
from numpy.random cimport bitgen_t
from numpy.random.c_distributions cimport random_standard_normal


def run_trial(p, gen):
    """One trial; returns (decision, stop_time, stat_a, stat_b) exactly as
    the fallback kernel does."""
    cdef bitgen_t *rng = <bitgen_t *> PyCapsule_GetPointer(
        gen.bit_generator.capsule, "BitGenerator"
    )

    cdef Py_ssize_t L = p.L
    cdef Py_ssize_t T = p.max_steps
    cdef int node_kind = p.node_kind
    cdef int node_clamped = p.node_clamped
    cdef int emit_kind = p.emit_kind
    cdef int fc_mode = p.fc_mode

    cdef double[::1] obs_mean = p.obs_mean
    cdef double[::1] obs_std = p.obs_std
    cdef double[::1] qa = p.qa
    cdef double[::1] qb = p.qb
    cdef double[::1] qc = p.qc
    cdef double[::1] g1 = p.gamma1
    cdef double[::1] g0 = p.gamma0
    cdef double[::1] b1 = p.b1
    cdef double[::1] b0 = p.b0
    cdef double[:, ::1] levels_up = p.levels_up
    cdef double[:, ::1] levels_down = p.levels_down
    cdef double[::1] invd1 = p.inv_d1
    cdef double[::1] invd0 = p.inv_d0
    cdef double[::1] theta1 = p.theta1
    cdef double[::1] a1 = p.a1
    cdef double[::1] a2 = p.a2
    cdef double[::1] theta_star = p.theta_star
    cdef double[::1] inv_sigma_sq = p.inv_sigma_sq
    cdef double[:, ::1] gbound = p.gbound
    cdef double[:, :, ::1] gband = p.gband

    cdef double Af = p.Af, Bf = p.Bf
    cdef double Au = p.Au, Bu = p.Bu
    cdef double Ad = p.Ad, Bd = p.Bd
    cdef double beta1 = p.beta1, beta0 = p.beta0
    cdef double mz = p.mz, sigz = p.sigz

    cdef double[::1] w = np.zeros(L)
    cdef double[::1] wd = np.zeros(L)
    cdef double[::1] s = np.zeros(L)
    cdef signed char[::1] dec = np.full(L, -1, dtype=np.int8)

    cdef double f = 0.0, f1 = 0.0, f0 = 0.0
    cdef double xv, incr, wv, u, ysum, y, th, kd, t1v, br0, br1, e, off
    cdef Py_ssize_t k, l
    cdef int bi, lvl

    for k in range(1, T + 1):
        ysum = 0.0
        kd = <double> k
        for l in range(L):
            xv = obs_mean[l] + obs_std[l] * random_standard_normal(rng)
            e = 0.0
            if node_kind == 0:
                incr = qa[l] * xv * xv + qb[l] * xv + qc[l]
                if node_clamped == 0:
                    w[l] = w[l] + incr
                    wv = w[l]
                    if wv >= g1[l]:
                        if emit_kind == 0:
                            e = b1[l]
                        else:
                            off = (wv - g1[l]) * invd1[l]
                            bi = <int> floor(off)
                            if bi > 3:
                                bi = 3
                            e = levels_up[l, bi]
                    elif wv <= -g0[l]:
                        if emit_kind == 0:
                            e = b0[l]
                        else:
                            off = (-g0[l] - wv) * invd0[l]
                            bi = <int> floor(off)
                            if bi > 3:
                                bi = 3
                            e = levels_down[l, bi]
                else:
                    wv = w[l] + incr
                    if wv < 0.0:
                        wv = 0.0
                    w[l] = wv
                    u = wd[l] + incr
                    if u > 0.0:
                        u = 0.0
                    wd[l] = u
                    if wv >= g1[l]:
                        if emit_kind == 0:
                            e = b1[l]
                        else:
                            off = (wv - g1[l]) * invd1[l]
                            bi = <int> floor(off)
                            if bi > 3:
                                bi = 3
                            e = levels_up[l, bi]
                    elif u <= -g0[l]:
                        if emit_kind == 0:
                            e = b0[l]
                        else:
                            off = (-g0[l] - u) * invd0[l]
                            bi = <int> floor(off)
                            if bi > 3:
                                bi = 3
                            e = levels_down[l, bi]
            else:
                s[l] = s[l] + xv
                th = s[l] / kd
                if th < a1[l]:
                    th = a1[l]
                elif th > a2[l]:
                    th = a2[l]
                br0 = (th * s[l] - kd * (th * th * 0.5)) * inv_sigma_sq[l]
                t1v = theta1[l]
                br1 = ((th - t1v) * s[l] - kd * ((th * th - t1v * t1v) * 0.5)) * inv_sigma_sq[l]
                if br0 >= br1:
                    wv = br0
                else:
                    wv = br1
                if dec[l] < 0 and wv >= gbound[l, k]:
                    dec[l] = 1 if th >= theta_star[l] else 0
                if dec[l] >= 0:
                    if emit_kind == 0:
                        e = b1[l] if dec[l] else b0[l]
                    elif wv >= gbound[l, k]:
                        lvl = 0
                        if wv >= gband[l, k, 0]:
                            lvl = lvl + 1
                        if wv >= gband[l, k, 1]:
                            lvl = lvl + 1
                        if wv >= gband[l, k, 2]:
                            lvl = lvl + 1
                        e = levels_up[l, lvl] if dec[l] else levels_down[l, lvl]
            ysum += e
        y = ysum + mz + sigz * random_standard_normal(rng)
        if fc_mode == 0:
            f = f + (Af * y + Bf)
            if f >= beta1:
                return 1, k, f, 0.0
            if f <= -beta0:
                return 0, k, f, 0.0
        else:
            f1 = f1 + (Au * y + Bu)
            if f1 < 0.0:
                f1 = 0.0
            f0 = f0 + (Ad * y + Bd)
            if f0 > 0.0:
                f0 = 0.0
            if f1 >= beta1:
                return 1, k, f1, f0
            if f0 <= -beta0:
                return 0, k, f1, f0
    if fc_mode == 0:
        return 2, T, f, 0.0
    return 2, T, f1, f0
