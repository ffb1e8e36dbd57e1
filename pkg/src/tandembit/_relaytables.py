"""Depth-indexed state tables for relay strategies.

A relay strategy unrolled against a codeword pair becomes a small layered
automaton: at time k+1 the relay transmits g_k(state_k) and then moves to
state_{k+1} = trans_k(state_k, y_{k+1}). Both the sampler and the exact
forward-recursion decoder consume the same tables, and the tables are built
once in pure Python so the compiled and fallback kernels cannot diverge on
strategy logic.

Layout: states at depth k occupy indices [0, n_states[k]) in depth-local
numbering. g is flattened over depths 0..n-1 via off_g. trans is flattened
over non-agreement depths via off_trans, row-major (state, y), and maps into
depth k+1 numbering. Depths where the codewords agree carry no transition
entries: the best-guess state provably ignores those observations, so the
state set is carried over unchanged (agree[k] = 1).

The best-guess state is the count vector of (disagreement kind, y symbol)
observations. Output symbols that are impossible under both hypotheses at a
given position are never sampled and carry zero probability in the decoder,
so their transition entry is numerically irrelevant; it is pointed at the
successor of the smallest possible symbol to keep the table total.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import BinaryInputChannel
from .errors import CapExceeded, DegenerateStrategy

__all__ = [
    "StrategyTables",
    "STATE_CAP",
    "build_best_guess_tables",
    "build_forward_quantized_tables",
    "likelihood_partition",
]

STATE_CAP = 2_000_000


@dataclass(frozen=True)
class StrategyTables:
    n: int
    m: int
    n_states: np.ndarray  # int32[n+1]
    agree: np.ndarray  # uint8[n]
    g: np.ndarray  # int8, flattened over depths 0..n-1
    off_g: np.ndarray  # int64[n+1]
    trans: np.ndarray  # int32, flattened over non-agreement depths
    off_trans: np.ndarray  # int64[n+1]
    total_states: int


def _freeze(
    n: int,
    m: int,
    per_depth_states: list[int],
    agree: list[int],
    g_parts: list[list[int]],
    trans_parts: list[list[int] | None],
) -> StrategyTables:
    n_states = np.asarray(per_depth_states, dtype=np.int32)
    agree_arr = np.asarray(agree, dtype=np.uint8)
    off_g = np.zeros(n + 1, dtype=np.int64)
    off_trans = np.zeros(n + 1, dtype=np.int64)
    g_flat: list[int] = []
    trans_flat: list[int] = []
    for k in range(n):
        off_g[k] = len(g_flat)
        g_flat.extend(g_parts[k])
        off_trans[k] = len(trans_flat)
        if trans_parts[k] is not None:
            trans_flat.extend(trans_parts[k])
    off_g[n] = len(g_flat)
    off_trans[n] = len(trans_flat)
    return StrategyTables(
        n=n,
        m=m,
        n_states=n_states,
        agree=agree_arr,
        g=np.asarray(g_flat, dtype=np.int8),
        off_g=off_g,
        trans=np.asarray(trans_flat, dtype=np.int32),
        off_trans=off_trans,
        total_states=int(sum(per_depth_states)),
    )


def likelihood_partition(p: BinaryInputChannel) -> tuple[int, ...]:
    """Default forward partition: the MAP input bit for each fresh symbol."""
    return tuple(1 if p.row1[y] > p.row0[y] else 0 for y in range(p.m))


def build_forward_quantized_tables(
    n: int, p: BinaryInputChannel, partition: tuple[int, ...] | None = None
) -> StrategyTables:
    """Tables for forwarding a fixed quantization of the freshest symbol."""
    if partition is None:
        partition = likelihood_partition(p)
    partition = tuple(int(b) for b in partition)
    if len(partition) != p.m:
        raise ValueError(
            f"partition covers {len(partition)} symbols, channel has {p.m}"
        )
    if any(b not in (0, 1) for b in partition):
        raise ValueError("partition values must be bits")
    if n >= 2 and len(set(partition)) == 1:
        raise DegenerateStrategy(
            "constant output partition forwards no information"
        )
    m = p.m
    per_depth = [1] + [2] * n
    agree = [0] * n
    g_parts: list[list[int]] = []
    trans_parts: list[list[int] | None] = []
    for k in range(n):
        if k == 0:
            g_parts.append([0])
            trans_parts.append([partition[y] for y in range(m)])
        else:
            g_parts.append([0, 1])
            trans_parts.append([partition[y] for y in range(m)] * 2)
    return _freeze(n, m, per_depth, agree, g_parts, trans_parts)


def _best_guess_bit(
    counts: tuple[int, ...], kinds: list[tuple[int, int]], m: int, logrow: list[list[float]]
) -> int:
    # Guess 1 only if the hypothesis-1 likelihood strictly wins; ties and
    # impossible-under-both states fall back to 0.
    dead0 = dead1 = False
    terms0: list[float] = []
    terms1: list[float] = []
    for t, (a, b) in enumerate(kinds):
        for y in range(m):
            cnt = counts[t * m + y]
            if cnt == 0:
                continue
            la = logrow[a][y]
            lb = logrow[b][y]
            if la is None:
                dead0 = True
            else:
                terms0.append(cnt * la)
            if lb is None:
                dead1 = True
            else:
                terms1.append(cnt * lb)
    if dead0 and dead1:
        return 0
    if dead0:
        return 1
    if dead1:
        return 0
    return 1 if math.fsum(terms1) > math.fsum(terms0) else 0


def build_best_guess_tables(
    x0: tuple[int, ...],
    x1: tuple[int, ...],
    p: BinaryInputChannel,
    cap: int = STATE_CAP,
) -> StrategyTables:
    """Tables for transmitting the running MAP estimate of the source bit.

    The state is the count vector of (disagreement kind, symbol) pairs seen
    so far; agreement positions cancel from the likelihood ratio and leave
    the state untouched. State sets are sorted tuples, so numbering is
    canonical and independent of construction order.
    """
    n = len(x0)
    if len(x1) != n:
        raise ValueError(f"codeword lengths differ: {n} vs {len(x1)}")
    m = p.m
    kinds = sorted({(a, b) for a, b in zip(x0, x1) if a != b})
    dims = len(kinds) * m
    kind_index = {k: i for i, k in enumerate(kinds)}
    logrow: list[list[float | None]] = [
        [math.log(v) if v > 0.0 else None for v in p.row(bit)] for bit in (0, 1)
    ]

    states: list[tuple[int, ...]] = [(0,) * dims]
    per_depth = [1]
    agree: list[int] = []
    g_parts: list[list[int]] = []
    trans_parts: list[list[int] | None] = []
    total = 1
    for k in range(n):
        g_parts.append([_best_guess_bit(s, kinds, m, logrow) for s in states])
        if x0[k] == x1[k]:
            agree.append(1)
            trans_parts.append(None)
        else:
            agree.append(0)
            t = kind_index[(x0[k], x1[k])]
            possible = [
                y for y in range(m) if p.row(x0[k])[y] > 0.0 or p.row(x1[k])[y] > 0.0
            ]
            fallback = possible[0]
            succ_of: list[list[tuple[int, ...]]] = []
            succ_set: set[tuple[int, ...]] = set()
            for s in states:
                row = []
                for y in range(m):
                    yy = y if (p.row(x0[k])[y] > 0.0 or p.row(x1[k])[y] > 0.0) else fallback
                    nxt = list(s)
                    nxt[t * m + yy] += 1
                    row.append(tuple(nxt))
                succ_of.append(row)
                succ_set.update(row)
            new_states = sorted(succ_set)
            index = {s: i for i, s in enumerate(new_states)}
            trans_parts.append(
                [index[succ] for row in succ_of for succ in row]
            )
            states = new_states
        per_depth.append(len(states))
        total += len(states)
        if total > cap:
            raise CapExceeded(
                f"strategy table needs more than {cap} states", size=total
            )
    return _freeze(n, m, per_depth, agree, g_parts, trans_parts)
