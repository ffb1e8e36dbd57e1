"""Counter-based random numbers: Philox4x64 with 10 rounds.

Simulation trials must be bitwise-reproducible regardless of how they are
chunked or scheduled, so every trial owns an independent stream addressed by
key (seed, trial index) and a block counter local to the trial. Block
counters start at 1; with that convention the words produced for a trial are
exactly the raw output of numpy's ``Philox(counter=0, key=(seed, trial))``
bit generator, which the tests use as an oracle.

Uniforms are the top 53 bits of each 64-bit word scaled into [0, 1). Both a
scalar reference implementation and a trial-vectorized numpy implementation
live here; the compiled kernel carries its own inline copy. All three are
checked against each other and against numpy.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "PHILOX_M0",
    "PHILOX_M1",
    "PHILOX_W0",
    "PHILOX_W1",
    "philox4",
    "uniforms",
    "uniforms_for_trials",
]

PHILOX_M0 = 0xD2E7470EE14C6C93
PHILOX_M1 = 0xCA5A826395121157
PHILOX_W0 = 0x9E3779B97F4A7C15
PHILOX_W1 = 0xBB67AE8584CAA73B

_MASK64 = (1 << 64) - 1
_U01_SCALE = 2.0**-53


def philox4(
    counter: tuple[int, int, int, int], key: tuple[int, int]
) -> tuple[int, int, int, int]:
    """One Philox4x64-10 block: 256 bits of output for (counter, key)."""
    x0, x1, x2, x3 = (c & _MASK64 for c in counter)
    k0, k1 = key[0] & _MASK64, key[1] & _MASK64
    for _ in range(10):
        prod0 = PHILOX_M0 * x0
        hi0, lo0 = prod0 >> 64, prod0 & _MASK64
        prod1 = PHILOX_M1 * x2
        hi1, lo1 = prod1 >> 64, prod1 & _MASK64
        x0 = hi1 ^ x1 ^ k0
        x1 = lo1
        x2 = hi0 ^ x3 ^ k1
        x3 = lo0
        k0 = (k0 + PHILOX_W0) & _MASK64
        k1 = (k1 + PHILOX_W1) & _MASK64
    return x0, x1, x2, x3


def uniforms(seed: int, trial: int, count: int) -> list[float]:
    """The first ``count`` uniforms of trial ``trial`` (scalar reference)."""
    out: list[float] = []
    block = 1
    while len(out) < count:
        words = philox4((block, 0, 0, 0), (seed, trial))
        for w in words:
            out.append((w >> 11) * _U01_SCALE)
        block += 1
    return out[:count]


def _mulhilo64(a: np.uint64, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # 64x64 -> 128 bit product via 32-bit limbs; numpy uint64 wraps mod 2^64.
    mask32 = np.uint64(0xFFFFFFFF)
    a_lo = a & mask32
    a_hi = a >> np.uint64(32)
    x_lo = x & mask32
    x_hi = x >> np.uint64(32)
    ll = a_lo * x_lo
    lh = a_lo * x_hi
    hl = a_hi * x_lo
    hh = a_hi * x_hi
    mid = (ll >> np.uint64(32)) + (lh & mask32) + (hl & mask32)
    lo = (ll & mask32) | ((mid & mask32) << np.uint64(32))
    hi = hh + (lh >> np.uint64(32)) + (hl >> np.uint64(32)) + (mid >> np.uint64(32))
    return hi, lo


def _philox4_vec(
    block: int, seed: int, trials: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    x0 = np.full(trials.shape, block, dtype=np.uint64)
    x1 = np.zeros(trials.shape, dtype=np.uint64)
    x2 = np.zeros(trials.shape, dtype=np.uint64)
    x3 = np.zeros(trials.shape, dtype=np.uint64)
    k0 = np.full(trials.shape, seed, dtype=np.uint64)
    k1 = trials.astype(np.uint64)
    m0 = np.uint64(PHILOX_M0)
    m1 = np.uint64(PHILOX_M1)
    w0 = np.uint64(PHILOX_W0)
    w1 = np.uint64(PHILOX_W1)
    for _ in range(10):
        hi0, lo0 = _mulhilo64(m0, x0)
        hi1, lo1 = _mulhilo64(m1, x2)
        x0 = hi1 ^ x1 ^ k0
        x1 = lo1
        x2 = hi0 ^ x3 ^ k1
        x3 = lo0
        k0 = k0 + w0
        k1 = k1 + w1
    return x0, x1, x2, x3


def uniforms_for_trials(seed: int, trials: np.ndarray, count: int) -> np.ndarray:
    """Uniform matrix of shape (len(trials), count), row t for trial trials[t].

    Bitwise identical to stacking ``uniforms(seed, trial, count)`` per trial.
    """
    trials = np.asarray(trials, dtype=np.uint64)
    n_blocks = (count + 3) // 4
    out = np.empty((trials.shape[0], 4 * n_blocks), dtype=np.float64)
    shift = np.uint64(11)
    for b in range(n_blocks):
        words = _philox4_vec(b + 1, seed, trials)
        for w in range(4):
            out[:, 4 * b + w] = (words[w] >> shift).astype(np.float64) * _U01_SCALE
    return out[:, :count]
