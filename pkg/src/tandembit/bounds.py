"""Finite-blocklength converse bounds for 2-hop bit relaying.

The headline bound says that any n-use protocol over a non-degenerate pair
(P, Q) has

    -ln(pe0 + pe1) <= n E* + (sqrt(2n) + 4) ln(1/p_min) + ln 8

with E* the optimal exponent and p_min the smallest positive transition
probability across both channels. The supporting two-branch ("disjunction")
bounds state that for every binary test at least one of two inequalities
holds, one per hypothesis. They come in three equivalent shapes: a
single-observation form with a variance remainder, a codeword-pair form over
a DMC, and a position-count form written with the four KL divergences of the
tilted output distribution. All are evaluated here; the exhaustive checks
that make the disjunctions testable live in the test suite and the
brute-force oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .channel import (
    BinaryInputChannel,
    SupportKind,
    as_bits,
    p_min,
    pair_p_min,
    support_relation,
)
from .chernoff import _closed_curve, d_c_derivatives, kl, tilt
from .errors import CountOverflow, DegeneratePair, LengthMismatch
from .exponent import _maximize_seq_curve, two_hop_exponent

__all__ = [
    "DisjunctionBound",
    "theorem3_bound",
    "pairwise_test_bounds",
    "dmc_pair_bounds",
    "position_count_bounds",
    "corollary1_bound",
]

_LN4 = math.log(4.0)
_LN8 = math.log(8.0)


@dataclass(frozen=True)
class DisjunctionBound:
    """Two branch bounds of which at least one must hold.

    rhs0 upper-bounds -ln pe0 (the error mass the decision rule assigns
    under hypothesis 0) and rhs1 upper-bounds -ln pe1, both in nats.
    """

    rhs0: float
    rhs1: float
    s: float


def theorem3_bound(n: int, p: BinaryInputChannel, q: BinaryInputChannel) -> float:
    """Converse bound on -ln(pe0 + pe1) for any n-use protocol over (p, q)."""
    n = int(n)
    if n < 1:
        raise ValueError(f"blocklength must be at least 1, got {n}")
    if (
        support_relation(p).kind is SupportKind.DISJOINT
        or support_relation(q).kind is SupportKind.DISJOINT
    ):
        raise DegeneratePair(
            "a channel with disjoint row supports makes the converse bound vacuous"
        )
    e_star = two_hop_exponent(p, q).e_star
    log_inv_pmin = -math.log(pair_p_min(p, q))
    return n * e_star + (math.sqrt(2.0 * n) + 4.0) * log_inv_pmin + _LN8


def pairwise_test_bounds(
    pi: Sequence[float], pi_prime: Sequence[float], s: float
) -> DisjunctionBound:
    """Single-observation disjunction bound with the variance remainder.

    For any decision rule between pi and pi_prime, at least one of
    -ln pe0 <= rhs0 and -ln pe1 <= rhs1 holds. Requires s in (0,1).
    """
    pt = d_c_derivatives(pi, pi_prime, s)
    spread = math.sqrt(-2.0 * pt.d2)
    rhs0 = pt.value - s * pt.d1 + s * spread + _LN4
    rhs1 = pt.value + (1.0 - s) * pt.d1 + (1.0 - s) * spread + _LN4
    return DisjunctionBound(rhs0=rhs0, rhs1=rhs1, s=s)


def _seq_curve_point(
    w0: Sequence[int], w1: Sequence[int], q: BinaryInputChannel, s: float
) -> tuple[float, float, int]:
    """Summed divergence value and first derivative over unequal positions."""
    b0, b1 = as_bits(w0), as_bits(w1)
    if len(b0) != len(b1):
        raise LengthMismatch(f"codeword lengths differ: {len(b0)} vs {len(b1)}")
    vals = []
    d1s = []
    for a, b in zip(b0, b1):
        if a == b:
            continue
        pt = _closed_curve(q.row(a), q.row(b), s)
        vals.append(pt.value)
        d1s.append(pt.d1)
    return math.fsum(vals), math.fsum(d1s), len(b0)


def dmc_pair_bounds(
    w0: Sequence[int] | str, w1: Sequence[int] | str, q: BinaryInputChannel, s: float
) -> DisjunctionBound:
    """Codeword-pair disjunction bound over n uses of a DMC, s in [0,1].

    The variance remainder of the single-shot form is replaced by the
    distribution-free sqrt(2n) ln(1/p_min) term, which is what lets the
    endpoints s in {0,1} participate (derivative limits stay finite).
    """
    s = float(s)
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"s must lie in [0,1], got {s!r}")
    value, d1, n = _seq_curve_point(w0, w1, q, s)
    rem = math.sqrt(2.0 * n) * -math.log(p_min(q)) + _LN4
    rhs0 = value - s * d1 + rem
    rhs1 = value + (1.0 - s) * d1 + rem
    return DisjunctionBound(rhs0=rhs0, rhs1=rhs1, s=s)


def position_count_bounds(
    n01: float, n10: float, n: int, q: BinaryInputChannel, s: float
) -> DisjunctionBound:
    """Position-count form of the codeword-pair bound, s in (0,1).

    n01 and n10 count positions sending (0,1) and (1,0) under the two
    hypotheses. Integer counts reproduce dmc_pair_bounds exactly; real
    values interpolate between count profiles (the counts need not be
    integers for the underlying inequality to hold).
    """
    s = float(s)
    if not 0.0 < s < 1.0:
        raise ValueError(f"s must lie in (0,1), got {s!r}")
    n = int(n)
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    a, b = float(n01), float(n10)
    if a < 0.0 or b < 0.0 or a + b > n * (1.0 + 1e-12):
        raise CountOverflow(f"counts ({n01!r}, {n10!r}) do not fit into n={n} positions")
    q_s = tilt(q.row0, q.row1, s).weights
    q_1ms = tilt(q.row0, q.row1, 1.0 - s).weights
    rem = math.sqrt(2.0 * n) * -math.log(p_min(q)) + _LN4
    rhs0 = a * kl(q_s, q.row0) + b * kl(q_1ms, q.row1) + rem
    rhs1 = a * kl(q_s, q.row1) + b * kl(q_1ms, q.row0) + rem
    return DisjunctionBound(rhs0=rhs0, rhs1=rhs1, s=s)


def corollary1_bound(
    w0: Sequence[int] | str, w1: Sequence[int] | str, q: BinaryInputChannel
) -> float:
    """Bound on -ln(pe0 + pe1) for any test between two channel codewords.

    The tilt parameter is optimized out: the value is the maximum over s of
    the tensorized divergence curve plus the sqrt(2n) remainder.
    """
    b0, b1 = as_bits(w0), as_bits(w1)
    if len(b0) != len(b1):
        raise LengthMismatch(f"codeword lengths differ: {len(b0)} vs {len(b1)}")
    pairs = [(q.row(a), q.row(b)) for a, b in zip(b0, b1) if a != b]
    value, _, _ = _maximize_seq_curve(pairs)
    n = len(b0)
    return value + math.sqrt(2.0 * n) * -math.log(p_min(q)) + _LN4
