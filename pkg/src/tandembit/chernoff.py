"""Chernoff divergence, tilted distributions, and KL divergence.

Conventions used throughout the package:

- Natural logarithm everywhere; every divergence and exponent is in nats.
- The divergence with parameter s of distributions (p0, p1) is
  -ln sum_x p0(x)^(1-s) p1(x)^s. Geometric terms are computed as
  exp((1-s) ln p0 + s ln p1) over the shared support only, which avoids 0^0
  ambiguity and makes the s in {0,1} endpoints come out as the continuity
  limits automatically: at s=0 the sum collapses to the p0-mass of the set
  where p1 is positive, and symmetrically at s=1.
- On the closed interval [0,1] the restricted sum is a smooth, concave
  function of s. Its first derivative is the mean of ln(p0/p1) under the
  tilted distribution and its second derivative is minus the variance of
  ln(p1/p0); both stay finite at the endpoints when supports overlap. The
  public derivative accessor still refuses s in {0,1} because the bounds on
  the derivatives are stated for the open interval; internal callers that
  need the limit values use :func:`_closed_curve`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .channel import BinaryInputChannel, as_bits
from .errors import (
    AbsoluteContinuityViolation,
    AlphabetMismatch,
    DisjointSupport,
    EndpointDerivative,
    LengthMismatch,
)

__all__ = [
    "ChernoffCurvePoint",
    "TiltedDistribution",
    "d_c",
    "d_c_derivatives",
    "tilt",
    "kl",
    "d_c_seq",
    "tilt_seq",
]


@dataclass(frozen=True)
class ChernoffCurvePoint:
    """Divergence value and its first two s-derivatives at one point."""

    s: float
    value: float
    d1: float
    d2: float


@dataclass(frozen=True)
class TiltedDistribution:
    """Normalized geometric mixture p0^(1-s) p1^s over the full alphabet.

    Weights are zero outside the intersection of the two source supports.
    """

    s: float
    weights: tuple[float, ...]


def _as_vector(p: Sequence[float]) -> tuple[float, ...]:
    return tuple(float(v) for v in p)


def _check_pair(p0: Sequence[float], p1: Sequence[float]) -> tuple[tuple[float, ...], tuple[float, ...], list[int]]:
    v0, v1 = _as_vector(p0), _as_vector(p1)
    if len(v0) != len(v1):
        raise AlphabetMismatch(f"alphabet sizes differ: {len(v0)} vs {len(v1)}")
    shared = [x for x in range(len(v0)) if v0[x] > 0.0 and v1[x] > 0.0]
    return v0, v1, shared


def _check_s(s: float) -> float:
    s = float(s)
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"s must lie in [0,1], got {s!r}")
    return s


def d_c(p0: Sequence[float], p1: Sequence[float], s: float) -> float:
    """Divergence -ln sum p0^(1-s) p1^s; endpoints are the continuity limits."""
    s = _check_s(s)
    v0, v1, shared = _check_pair(p0, p1)
    if not shared:
        raise DisjointSupport()
    total = 0.0
    for x in shared:
        total += math.exp((1.0 - s) * math.log(v0[x]) + s * math.log(v1[x]))
    value = -math.log(total)
    # The restricted sum is at most 1, so only float noise can go negative.
    if -1e-12 < value < 0.0:
        value = 0.0
    return value


def _closed_curve(p0: Sequence[float], p1: Sequence[float], s: float) -> ChernoffCurvePoint:
    """Value and derivatives of the restricted curve, valid on closed [0,1]."""
    s = _check_s(s)
    v0, v1, shared = _check_pair(p0, p1)
    if not shared:
        raise DisjointSupport()
    weights = []
    ratios = []
    total = 0.0
    for x in shared:
        l0 = math.log(v0[x])
        l1 = math.log(v1[x])
        w = math.exp((1.0 - s) * l0 + s * l1)
        weights.append(w)
        ratios.append(l1 - l0)
        total += w
    value = -math.log(total)
    if -1e-12 < value < 0.0:
        value = 0.0
    mean = 0.0
    for w, r in zip(weights, ratios):
        mean += (w / total) * r
    var = 0.0
    for w, r in zip(weights, ratios):
        var += (w / total) * (r - mean) * (r - mean)
    return ChernoffCurvePoint(s=s, value=value, d1=-mean, d2=-var)


def d_c_derivatives(p0: Sequence[float], p1: Sequence[float], s: float) -> ChernoffCurvePoint:
    """Divergence with first two s-derivatives, for s strictly inside (0,1)."""
    s = float(s)
    if s <= 0.0 or s >= 1.0:
        raise EndpointDerivative(f"derivatives are defined on the open interval, got s={s!r}")
    return _closed_curve(p0, p1, s)


def tilt(p0: Sequence[float], p1: Sequence[float], s: float) -> TiltedDistribution:
    """Tilted distribution proportional to p0^(1-s) p1^s on the shared support."""
    s = float(s)
    if not 0.0 < s < 1.0:
        raise ValueError(f"tilt parameter must lie in (0,1), got {s!r}")
    v0, v1, shared = _check_pair(p0, p1)
    if not shared:
        raise DisjointSupport()
    weights = [0.0] * len(v0)
    total = 0.0
    for x in shared:
        w = math.exp((1.0 - s) * math.log(v0[x]) + s * math.log(v1[x]))
        weights[x] = w
        total += w
    return TiltedDistribution(s=s, weights=tuple(w / total for w in weights))


def kl(p: Sequence[float], q: Sequence[float]) -> float:
    """Relative entropy sum p ln(p/q) in nats, with 0 ln(0/.) = 0."""
    vp, vq = _as_vector(p), _as_vector(q)
    if len(vp) != len(vq):
        raise AlphabetMismatch(f"alphabet sizes differ: {len(vp)} vs {len(vq)}")
    total = 0.0
    for x in range(len(vp)):
        if vp[x] > 0.0:
            if vq[x] <= 0.0:
                raise AbsoluteContinuityViolation(
                    f"p has mass {vp[x]!r} at symbol {x} where q is zero"
                )
            total += vp[x] * math.log(vp[x] / vq[x])
    return total


def d_c_seq(
    x0: str | Sequence[int], x1: str | Sequence[int], c: BinaryInputChannel, s: float
) -> float:
    """Tensorized divergence of two codewords: the sum of per-position terms.

    Positions where the codewords agree contribute exactly 0.
    """
    x0, x1 = as_bits(x0), as_bits(x1)
    if len(x0) != len(x1):
        raise LengthMismatch(f"codeword lengths differ: {len(x0)} vs {len(x1)}")
    terms = [
        d_c(c.row(a), c.row(b), s)
        for a, b in zip(x0, x1)
        if a != b
    ]
    return math.fsum(terms)


def tilt_seq(
    x0: str | Sequence[int], x1: str | Sequence[int], c: BinaryInputChannel, t: float
) -> list[TiltedDistribution]:
    """Per-position tilted distributions of the product measure."""
    x0, x1 = as_bits(x0), as_bits(x1)
    if len(x0) != len(x1):
        raise LengthMismatch(f"codeword lengths differ: {len(x0)} vs {len(x1)}")
    out = []
    for i, (a, b) in enumerate(zip(x0, x1)):
        try:
            out.append(tilt(c.row(a), c.row(b), t))
        except DisjointSupport:
            raise DisjointSupport(position=i) from None
    return out
