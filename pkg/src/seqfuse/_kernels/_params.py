"""Flat, array-backed trial parameters shared by both kernel backends.

The compiled kernel reads these attributes as typed memoryviews, so every
array is float64 and C-contiguous, allocated even when a given algorithm
does not use it (zeros then). The per-trial block (observation means and
LLR coefficients) is rewritten in place by the Monte Carlo driver before
each trial when fading is configured.
"""

from __future__ import annotations

import numpy as np


def _arr(values, shape):
    a = np.zeros(shape, dtype=np.float64)
    if values is not None:
        a[...] = values
    return np.ascontiguousarray(a)


class KernelParams:
    def __init__(
        self,
        L: int,
        max_steps: int,
        node_kind: int,  # 0 sprt, 1 glr
        node_clamped: int,  # 1: clamped statistic pair at the nodes
        emit_kind: int,  # 0 binary, 1 quantized (interval-quantized for glr)
        fc_mode: int,  # 0 dual sprt, 1 clamped pair
        *,
        gamma1=None,
        gamma0=None,
        b1=None,
        b0=None,
        levels_up=None,
        levels_down=None,
        inv_d1=None,
        inv_d0=None,
        theta1=None,
        a1=None,
        a2=None,
        theta_star=None,
        inv_sigma_sq=None,
        gbound=None,  # (L, max_steps + 1), slot-indexed from 1
        gband=None,  # (L, max_steps + 1, 3) upper band boundaries
        Af=0.0,
        Bf=0.0,
        Au=0.0,
        Bu=0.0,
        Ad=0.0,
        Bd=0.0,
        beta1=0.0,
        beta0=0.0,
        mz=0.0,
        sigz=1.0,
    ):
        self.L = int(L)
        self.max_steps = int(max_steps)
        self.node_kind = int(node_kind)
        self.node_clamped = int(node_clamped)
        self.emit_kind = int(emit_kind)
        self.fc_mode = int(fc_mode)

        self.gamma1 = _arr(gamma1, L)
        self.gamma0 = _arr(gamma0, L)
        self.b1 = _arr(b1, L)
        self.b0 = _arr(b0, L)
        self.levels_up = _arr(levels_up, (L, 4))
        self.levels_down = _arr(levels_down, (L, 4))
        self.inv_d1 = _arr(inv_d1, L)
        self.inv_d0 = _arr(inv_d0, L)

        self.theta1 = _arr(theta1, L)
        self.a1 = _arr(a1, L)
        self.a2 = _arr(a2, L)
        self.theta_star = _arr(theta_star, L)
        self.inv_sigma_sq = _arr(inv_sigma_sq, L)
        self.gbound = _arr(gbound, (L, max_steps + 1))
        self.gband = _arr(gband, (L, max_steps + 1, 3))

        self.Af = float(Af)
        self.Bf = float(Bf)
        self.Au = float(Au)
        self.Bu = float(Bu)
        self.Ad = float(Ad)
        self.Bd = float(Bd)
        self.beta1 = float(beta1)
        self.beta0 = float(beta0)
        self.mz = float(mz)
        self.sigz = float(sigz)

        # Per-trial block, overwritten by the driver.
        self.obs_mean = np.zeros(L, dtype=np.float64)
        self.obs_std = np.ones(L, dtype=np.float64)
        self.qa = np.zeros(L, dtype=np.float64)
        self.qb = np.zeros(L, dtype=np.float64)
        self.qc = np.zeros(L, dtype=np.float64)
