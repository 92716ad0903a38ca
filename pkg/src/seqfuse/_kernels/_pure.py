"""NumPy trial kernel (fallback when the compiled extension is missing).

Both backends must produce bit-identical results from the same Generator.
That pins down several choices here:

* draws are consumed in slot order as [x_1 .. x_L, z] per slot; the chunked
  standard_normal((n, L+1)) fill visits exactly that sequence;
* running sums use add.accumulate with the carry folded into the first row,
  which reproduces the compiled kernel's sequential additions;
* the per-slot emission sum is accumulated column by column (a pairwise
  np.sum would round differently);
* no transcendental functions: thresholds and boundary tables arrive
  precomputed, increments are polynomials in the draws.

Over-drawing at the end of a trial is harmless because every trial owns a
fresh stream; only the consumed prefix influences the outputs.
"""

from __future__ import annotations

import numpy as np

_CHUNK = 128


def run_trial(p, gen):
    """One trial. Returns (decision, stop_time, stat_a, stat_b) where
    decision is 0 (H0), 1 (H1) or 2 (truncated), and the stats are the final
    fusion statistic (dual) or the clamped pair."""
    if p.node_kind == 0 and p.node_clamped:
        return _trial_clamped_nodes(p, gen)
    return _trial_main(p, gen)


def _trial_main(p, gen):
    L = p.L
    T = p.max_steps
    w_carry = np.zeros(L)
    s_carry = np.zeros(L)
    dec = np.full(L, -1, dtype=np.int8)
    f = 0.0
    f1 = 0.0
    f0 = 0.0
    done = 0
    while done < T:
        n = min(_CHUNK, T - done)
        draws = gen.standard_normal((n, L + 1))
        x = p.obs_mean + p.obs_std * draws[:, :L]
        if p.node_kind == 0:
            e, w_carry = _sprt_emissions(p, x, w_carry)
        else:
            e, s_carry = _glr_emissions(p, x, s_carry, dec, done)
        acc = np.zeros(n)
        for l in range(L):
            acc += e[:, l]
        y = acc + p.mz + p.sigz * draws[:, L]
        if p.fc_mode == 0:
            incr = p.Af * y + p.Bf
            incr[0] += f
            path = np.add.accumulate(incr)
            hit = (path >= p.beta1) | (path <= -p.beta0)
            if hit.any():
                i = int(np.argmax(hit))
                fi = float(path[i])
                return (1 if fi >= p.beta1 else 0), done + i + 1, fi, 0.0
            f = float(path[-1])
        else:
            au, bu, ad, bd = p.Au, p.Bu, p.Ad, p.Bd
            for i in range(n):
                yv = y[i]
                f1 = f1 + (au * yv + bu)
                if f1 < 0.0:
                    f1 = 0.0
                f0 = f0 + (ad * yv + bd)
                if f0 > 0.0:
                    f0 = 0.0
                if f1 >= p.beta1:
                    return 1, done + i + 1, float(f1), float(f0)
                if f0 <= -p.beta0:
                    return 0, done + i + 1, float(f1), float(f0)
        done += n
    if p.fc_mode == 0:
        return 2, T, float(f), 0.0
    return 2, T, float(f1), float(f0)


def _sprt_emissions(p, x, w_carry):
    incr = p.qa * x * x + p.qb * x + p.qc
    incr[0] += w_carry
    w = np.add.accumulate(incr, axis=0)
    up = w >= p.gamma1
    dn = w <= -p.gamma0
    if p.emit_kind == 0:
        e = np.where(up, p.b1, np.where(dn, p.b0, 0.0))
    else:
        cols = np.arange(p.L)
        bi_up = np.where(up, np.minimum(np.floor((w - p.gamma1) * p.inv_d1), 3.0), 0.0)
        bi_dn = np.where(dn, np.minimum(np.floor((-p.gamma0 - w) * p.inv_d0), 3.0), 0.0)
        e_up = p.levels_up[cols, bi_up.astype(np.int64)]
        e_dn = p.levels_down[cols, bi_dn.astype(np.int64)]
        e = np.where(up, e_up, np.where(dn, e_dn, 0.0))
    return e, w[-1].copy()


def _glr_emissions(p, x, s_carry, dec, done):
    n, L = x.shape
    xs = x.copy()
    xs[0] += s_carry
    s = np.add.accumulate(xs, axis=0)
    k = np.arange(done + 1, done + n + 1, dtype=np.float64)[:, None]
    th = np.clip(s / k, p.a1, p.a2)
    branch0 = (th * s - k * (th * th * 0.5)) * p.inv_sigma_sq
    t1 = p.theta1
    branch1 = ((th - t1) * s - k * ((th * th - t1 * t1) * 0.5)) * p.inv_sigma_sq
    w = np.maximum(branch0, branch1)
    gb = p.gbound[:, done + 1 : done + n + 1].T
    e = np.zeros((n, L))
    for l in range(L):
        side = int(dec[l])
        start = 0
        if side < 0:
            m = w[:, l] >= gb[:, l]
            if not m.any():
                continue
            start = int(np.argmax(m))
            side = 1 if th[start, l] >= p.theta_star[l] else 0
            dec[l] = side
        if p.emit_kind == 0:
            e[start:, l] = p.b1[l] if side else p.b0[l]
        else:
            wl = w[start:, l]
            bands = p.gband[l, done + 1 + start : done + n + 1, :]
            lvl = (
                (wl >= bands[:, 0]).astype(np.int64)
                + (wl >= bands[:, 1])
                + (wl >= bands[:, 2])
            )
            levels = p.levels_up[l] if side else p.levels_down[l]
            e[start:, l] = np.where(wl >= gb[start:, l], levels[lvl], 0.0)
    return e, s[-1].copy()


def _trial_clamped_nodes(p, gen):
    # Clamped statistic pairs at the nodes are order-dependent slot by slot,
    # so this path mirrors the compiled loop directly.
    L = p.L
    T = p.max_steps
    wu = np.zeros(L)
    wd = np.zeros(L)
    f = 0.0
    f1 = 0.0
    f0 = 0.0
    done = 0
    while done < T:
        n = min(_CHUNK, T - done)
        draws = gen.standard_normal((n, L + 1))
        for i in range(n):
            ysum = 0.0
            for l in range(L):
                xv = p.obs_mean[l] + p.obs_std[l] * draws[i, l]
                incr = p.qa[l] * xv * xv + p.qb[l] * xv + p.qc[l]
                v = wu[l] + incr
                if v < 0.0:
                    v = 0.0
                wu[l] = v
                u = wd[l] + incr
                if u > 0.0:
                    u = 0.0
                wd[l] = u
                if v >= p.gamma1[l]:
                    if p.emit_kind == 0:
                        ysum += p.b1[l]
                    else:
                        bi = int(np.floor((v - p.gamma1[l]) * p.inv_d1[l]))
                        if bi > 3:
                            bi = 3
                        ysum += p.levels_up[l, bi]
                elif u <= -p.gamma0[l]:
                    if p.emit_kind == 0:
                        ysum += p.b0[l]
                    else:
                        bi = int(np.floor((-p.gamma0[l] - u) * p.inv_d0[l]))
                        if bi > 3:
                            bi = 3
                        ysum += p.levels_down[l, bi]
            y = ysum + p.mz + p.sigz * draws[i, L]
            if p.fc_mode == 0:
                f = f + (p.Af * y + p.Bf)
                if f >= p.beta1:
                    return 1, done + i + 1, float(f), 0.0
                if f <= -p.beta0:
                    return 0, done + i + 1, float(f), 0.0
            else:
                f1 = f1 + (p.Au * y + p.Bu)
                if f1 < 0.0:
                    f1 = 0.0
                f0 = f0 + (p.Ad * y + p.Bd)
                if f0 > 0.0:
                    f0 = 0.0
                if f1 >= p.beta1:
                    return 1, done + i + 1, float(f1), float(f0)
                if f0 <= -p.beta0:
                    return 0, done + i + 1, float(f1), float(f0)
        done += n
    if p.fc_mode == 0:
        return 2, T, float(f), 0.0
    return 2, T, float(f1), float(f0)


def statistic_path(p, gen, horizon):
    """Run one trial without stopping and record the fusion statistic after
    every slot. Returns (path_a, path_b): the dual statistic and zeros, or
    the clamped pair. Used for ensemble-mean diagnostics."""
    if horizon > p.max_steps:
        raise ValueError("horizon exceeds the precomputed boundary tables")
    if p.node_kind == 0 and p.node_clamped:
        raise NotImplementedError("path recording supports plain SPRT and GLR nodes")
    L = p.L
    w_carry = np.zeros(L)
    s_carry = np.zeros(L)
    dec = np.full(L, -1, dtype=np.int8)
    fa = np.empty(horizon)
    fb = np.zeros(horizon)
    f = 0.0
    f1 = 0.0
    f0 = 0.0
    done = 0
    while done < horizon:
        n = min(_CHUNK, horizon - done)
        draws = gen.standard_normal((n, L + 1))
        x = p.obs_mean + p.obs_std * draws[:, :L]
        if p.node_kind == 0:
            e, w_carry = _sprt_emissions(p, x, w_carry)
        else:
            e, s_carry = _glr_emissions(p, x, s_carry, dec, done)
        acc = np.zeros(n)
        for l in range(L):
            acc += e[:, l]
        y = acc + p.mz + p.sigz * draws[:, L]
        if p.fc_mode == 0:
            incr = p.Af * y + p.Bf
            incr[0] += f
            path = np.add.accumulate(incr)
            fa[done : done + n] = path
            f = float(path[-1])
        else:
            for i in range(n):
                yv = y[i]
                f1 = f1 + (p.Au * yv + p.Bu)
                if f1 < 0.0:
                    f1 = 0.0
                f0 = f0 + (p.Ad * yv + p.Bd)
                if f0 > 0.0:
                    f0 = 0.0
                fa[done + i] = f1
                fb[done + i] = f0
        done += n
    return fa, fb
