"""Pure numpy kernels: trial simulation and protocol search.

This is the fallback for environments without the compiled extension and the
reference the compiled kernel is tested against. The two must agree bitwise,
so every floating-point operation here is ordered exactly as in the C loops:
vectorization only runs across trials (or relay maps), never across the
state/symbol/output loops, and reductions that C performs sequentially are
accumulated column by column rather than with numpy's pairwise sums.

Trials are processed in fixed-size chunks to bound memory; per-trial results
are chunk-independent because every trial owns its own counter-based stream
and trials never interact.
"""

from __future__ import annotations

import numpy as np

from ._philox import uniforms_for_trials

BACKEND_NAME = "python"

_CHUNK = 1 << 14


def _sample_symbols(thresholds: np.ndarray, u: np.ndarray) -> np.ndarray:
    # Inverse CDF: thresholds are the first m-1 cumulative sums. side='right'
    # walks past zero-width intervals, so zero-probability symbols are never
    # produced even when u lands exactly on a repeated threshold.
    return np.searchsorted(thresholds, u, side="right")


def _decode(
    z: np.ndarray,
    h: int,
    x_bits: np.ndarray,
    p_rows: np.ndarray,
    q_rows: np.ndarray,
    n_states: np.ndarray,
    agree: np.ndarray,
    g: np.ndarray,
    off_g: np.ndarray,
    trans: np.ndarray,
    off_trans: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Exact forward-recursion likelihood of z under hypothesis h.

    Returns (dead, exponent, significand) per trial, where the likelihood is
    significand * 2^exponent with significand in [0.5, 1), or dead when the
    observation is impossible under h. Scaling by the per-step state maximum
    keeps the significand representable at any blocklength; the scale is
    folded into (significand, exponent) through frexp, which is exact.
    """
    t_count, n = z.shape
    m = p_rows.shape[1]
    max_states = int(n_states.max())
    alpha = np.zeros((t_count, max_states), dtype=np.float64)
    beta = np.zeros((t_count, max_states), dtype=np.float64)
    alpha[:, 0] = 1.0
    sig = np.full(t_count, 0.5, dtype=np.float64)
    ex = np.ones(t_count, dtype=np.int64)
    dead = np.zeros(t_count, dtype=bool)
    for k in range(n):
        s_in = int(n_states[k])
        s_out = int(n_states[k + 1])
        zk = z[:, k]
        if agree[k]:
            for s in range(s_in):
                w = int(g[off_g[k] + s])
                alpha[:, s] = alpha[:, s] * q_rows[w, zk]
        else:
            beta[:, :s_out] = 0.0
            prow = p_rows[int(x_bits[h, k])]
            base = int(off_trans[k])
            for s in range(s_in):
                w = int(g[off_g[k] + s])
                tmp = alpha[:, s] * q_rows[w, zk]
                for y in range(m):
                    tgt = int(trans[base + s * m + y])
                    beta[:, tgt] += tmp * prow[y]
            alpha, beta = beta, alpha
        cur = alpha[:, :s_out]
        mx = cur.max(axis=1)
        now_dead = mx == 0.0
        dead |= now_dead
        cur /= np.where(now_dead, 1.0, mx)[:, None]
        f_sig, f_ex = np.frexp(mx)
        sig = sig * f_sig
        ex = ex + f_ex
        sig, r_ex = np.frexp(sig)
        ex = ex + r_ex
    s_fin = int(n_states[-1])
    acc = alpha[:, 0].copy()
    for s in range(1, s_fin):
        acc += alpha[:, s]
    tot = acc * sig
    f_sig, f_ex = np.frexp(tot)
    return dead, ex + f_ex, f_sig


def simulate_range(
    seed: int,
    trial_start: int,
    trial_count: int,
    theta: int,
    x_bits: np.ndarray,
    p_rows: np.ndarray,
    q_rows: np.ndarray,
    p_thresh: np.ndarray,
    q_thresh: np.ndarray,
    n_states: np.ndarray,
    agree: np.ndarray,
    g: np.ndarray,
    off_g: np.ndarray,
    trans: np.ndarray,
    off_trans: np.ndarray,
) -> np.ndarray:
    """MAP decisions for trials [trial_start, trial_start + trial_count).

    All trials in the range run hypothesis ``theta``. The returned array
    holds the decoder's decision bit per trial.
    """
    n = x_bits.shape[1]
    m = p_rows.shape[1]
    decisions = np.empty(trial_count, dtype=np.uint8)
    for c0 in range(0, trial_count, _CHUNK):
        c1 = min(c0 + _CHUNK, trial_count)
        t = c1 - c0
        trials = np.arange(trial_start + c0, trial_start + c1, dtype=np.uint64)
        u = uniforms_for_trials(seed, trials, 2 * n)
        y = np.empty((t, n), dtype=np.int64)
        w = np.empty((t, n), dtype=np.int8)
        state = np.zeros(t, dtype=np.int64)
        for k in range(n):
            xb = int(x_bits[theta, k])
            y[:, k] = _sample_symbols(p_thresh[xb], u[:, k])
            w[:, k] = g[off_g[k] + state]
            if not agree[k]:
                state = trans[off_trans[k] + state * m + y[:, k]].astype(np.int64)
        z = np.empty((t, n), dtype=np.int64)
        for k in range(n):
            uz = u[:, n + k]
            z0 = _sample_symbols(q_thresh[0], uz)
            z1 = _sample_symbols(q_thresh[1], uz)
            z[:, k] = np.where(w[:, k] == 1, z1, z0)
        dead0, ex0, sig0 = _decode(
            z, 0, x_bits, p_rows, q_rows, n_states, agree, g, off_g, trans, off_trans
        )
        dead1, ex1, sig1 = _decode(
            z, 1, x_bits, p_rows, q_rows, n_states, agree, g, off_g, trans, off_trans
        )
        one_wins = (ex1 > ex0) | ((ex1 == ex0) & (sig1 > sig0))
        dec = np.where(dead1, 0, np.where(dead0, 1, one_wins)).astype(np.uint8)
        decisions[c0:c1] = dec
    return decisions


def search_protocols(
    py0: np.ndarray,
    py1: np.ndarray,
    qzw: np.ndarray,
    offs: np.ndarray,
    n: int,
    m: int,
    relay_bits: int,
) -> tuple[int, float, float]:
    """Scan every relay map; return (map, pe0, pe1) minimizing pe0 + pe1.

    Relay maps are integers whose bit j is the transmitted bit after the
    prefix with index j. Ties keep the smallest integer. py0/py1 are the
    y-sequence laws under each hypothesis, qzw the per-(z, w) sequence
    likelihood table.
    """
    total = 1 << relay_bits
    my = py0.shape[0]
    mzn, wn = qzw.shape
    idx = np.empty((my, n), dtype=np.int64)
    for yi in range(my):
        rem = yi
        v = 0
        for k in range(n):
            p_mk = m ** (n - 1 - k)
            d = rem // p_mk
            rem -= d * p_mk
            idx[yi, k] = offs[k] + v
            v = v * m + d
    best_sum = np.inf
    best_relay = -1
    best_pe0 = 0.0
    best_pe1 = 0.0
    block = 1 << 12
    for start in range(0, total, block):
        size = min(block, total - start)
        rel = np.arange(start, start + size, dtype=np.int64)
        a0 = np.zeros((size, wn), dtype=np.float64)
        a1 = np.zeros((size, wn), dtype=np.float64)
        rows = np.arange(size)
        for yi in range(my):
            wv = np.zeros(size, dtype=np.int64)
            for k in range(n):
                wv |= ((rel >> idx[yi, k]) & 1) << (n - 1 - k)
            a0[rows, wv] += py0[yi]
            a1[rows, wv] += py1[yi]
        pe0 = np.zeros(size, dtype=np.float64)
        pe1 = np.zeros(size, dtype=np.float64)
        for zi in range(mzn):
            l0 = np.zeros(size, dtype=np.float64)
            l1 = np.zeros(size, dtype=np.float64)
            for wv in range(wn):
                l0 += a0[:, wv] * qzw[zi, wv]
                l1 += a1[:, wv] * qzw[zi, wv]
            one_wins = l1 > l0
            pe0 += np.where(one_wins, l0, 0.0)
            pe1 += np.where(one_wins, 0.0, l1)
        sums = pe0 + pe1
        i = int(np.argmin(sums))
        if sums[i] < best_sum:
            best_sum = float(sums[i])
            best_relay = start + i
            best_pe0 = float(pe0[i])
            best_pe1 = float(pe1[i])
    return best_relay, best_pe0, best_pe1
