"""1-hop and 2-hop error exponents, maximizer location, and regime analysis.

The 2-hop exponent of a channel pair (P, Q) is the maximum over s in [0, 1/2]
of E_s = min over the two channels of max(curve(s), curve(1-s)), where
curve is each channel's divergence curve in s. The curve of a single channel
is smooth and concave on [0,1] (endpoints via continuity), so the 1-hop
exponent is located analytically: flat and linear curves are recognized in
closed form, and strictly concave curves are maximized by a derivative root.
E_s itself is a min of max-folds and is not concave, so it is maximized by a
dense dyadic grid (4097 points over [0, 1/2], i.e. k/8192) followed by
golden-section refinement of the best bracket to width 1e-10. Ties are broken
toward smaller s to keep outputs deterministic.

An "unbounded" 1-hop exponent (disjoint row supports) is represented by the
UNBOUNDED sentinel, never by a float infinity, so serialization stays
unambiguous.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from .channel import (
    BinaryInputChannel,
    SupportKind,
    support_relation,
)
from .chernoff import _closed_curve, d_c
from .errors import BothDegenerate, DisjointSupport

__all__ = [
    "UNBOUNDED",
    "UnboundedType",
    "TypeKind",
    "TypeClass",
    "Regime",
    "OneHopResult",
    "ExponentReport",
    "one_hop_exponent",
    "e_s",
    "two_hop_exponent",
    "classify_type",
    "trivial_converse",
    "report_jsonable",
]

_GRID_POINTS = 4097
_GOLDEN_TOL = 1e-10
_REGIME_TOL = 1e-8
_NEUTRAL_TOL = 1e-9

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


class UnboundedType:
    """Singleton marker for an unbounded exponent (degenerate channel)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "unbounded"


UNBOUNDED = UnboundedType()


class TypeKind(str, enum.Enum):
    SKEWED = "Skewed"
    BALANCED = "Balanced"
    NEUTRAL = "Neutral"
    NON_UNIQUE_MAXIMUM = "NonUniqueMaximum"


@dataclass(frozen=True)
class TypeClass:
    kind: TypeKind
    argmax_s: float | None


class Regime(str, enum.Enum):
    EQUALS_ONE_HOP_P = "EqualsOneHopP"
    EQUALS_ONE_HOP_Q = "EqualsOneHopQ"
    OPPOSITE_TYPE = "OppositeType"


@dataclass(frozen=True)
class OneHopResult:
    value: float | UnboundedType
    argmax_s: float | None
    unique: bool


@dataclass(frozen=True)
class ExponentReport:
    e_star: float
    s_star: float
    e1_p: float | UnboundedType
    e1_q: float | UnboundedType
    regime: Regime
    type_p: TypeClass | None
    type_q: TypeClass | None
    input_swaps: tuple[bool, bool]
    margin_p: float
    margin_q: float
    margin_opposite: float
    ambiguous: bool
    note: str | None = None


# ---------------------------------------------------------------------------
# Curve analysis
# ---------------------------------------------------------------------------


def _shared_support(row0: Sequence[float], row1: Sequence[float]) -> list[int]:
    return [x for x in range(len(row0)) if row0[x] > 0.0 and row1[x] > 0.0]


def _maximize_seq_curve(
    pairs: list[tuple[Sequence[float], Sequence[float]]]
) -> tuple[float, float, bool]:
    """Maximize a sum of per-position divergence curves over s in [0,1].

    Returns (max value, argmax, unique). The argmax of a flat curve is
    reported as the representative midpoint 0.5 with unique=False.
    Raises DisjointSupport if any position pair shares no symbol.
    """
    linear_const = []
    linear_slope = []
    curved: list[tuple[Sequence[float], Sequence[float]]] = []
    for v0, v1 in pairs:
        shared = _shared_support(v0, v1)
        if not shared:
            raise DisjointSupport()
        ratios = [math.log(v1[x]) - math.log(v0[x]) for x in shared]
        spread = max(ratios) - min(ratios)
        scale = max(1.0, max(abs(r) for r in ratios))
        if spread <= 1e-13 * scale:
            # Constant log-ratio r0 on the shared support: the curve is the
            # line -ln(p0-mass of shared) - s*r0.
            mass = math.fsum(v0[x] for x in shared)
            linear_const.append(-math.log(mass))
            linear_slope.append(-ratios[0])
        else:
            curved.append((v0, v1))

    lin_c = math.fsum(linear_const)
    lin_m = math.fsum(linear_slope)

    def value_at(s: float) -> float:
        total = lin_c + lin_m * s
        for v0, v1 in curved:
            total += _closed_curve(v0, v1, s).value
        return total

    if not curved:
        if not pairs or abs(lin_m) <= 1e-12 * max(1.0, abs(lin_c)):
            return max(0.0, lin_c), 0.5, False
        argmax = 1.0 if lin_m > 0.0 else 0.0
        return max(0.0, value_at(argmax)), argmax, True

    def deriv_at(s: float) -> float:
        total = lin_m
        for v0, v1 in curved:
            total += _closed_curve(v0, v1, s).d1
        return total

    # At least one strictly curved position makes the sum strictly concave,
    # so the derivative is strictly decreasing and has at most one root.
    d0 = deriv_at(0.0)
    d1 = deriv_at(1.0)
    if d0 <= 0.0:
        argmax = 0.0
    elif d1 >= 0.0:
        argmax = 1.0
    else:
        argmax = float(brentq(deriv_at, 0.0, 1.0, xtol=1e-14))
    return max(0.0, value_at(argmax)), argmax, True


def one_hop_exponent(c: BinaryInputChannel) -> OneHopResult:
    """Maximum of the channel's divergence curve over s in [0,1].

    Disjoint row supports make one channel use decisive, so the value is
    UNBOUNDED (flagged via unique=False, argmax None) rather than an error.
    """
    if support_relation(c).kind is SupportKind.DISJOINT:
        return OneHopResult(UNBOUNDED, None, False)
    value, argmax, unique = _maximize_seq_curve([(c.row0, c.row1)])
    return OneHopResult(value, argmax, unique)


def _max_dc_seq(x0: Sequence[int], x1: Sequence[int], c: BinaryInputChannel) -> float:
    """Maximum over s of the tensorized divergence of two codewords."""
    pairs = [(c.row(a), c.row(b)) for a, b in zip(x0, x1) if a != b]
    value, _, _ = _maximize_seq_curve(pairs)
    return value


# ---------------------------------------------------------------------------
# E_s and its maximization
# ---------------------------------------------------------------------------


def _fold(c: BinaryInputChannel, s_lo: float, s_hi: float) -> float:
    return max(d_c(c.row0, c.row1, s_lo), d_c(c.row0, c.row1, s_hi))


def e_s(p: BinaryInputChannel, q: BinaryInputChannel, s: float) -> float:
    """min over the two channels of max(curve(s), curve(1-s)).

    s is canonicalized to min(s, 1-s) before evaluation, so the symmetry
    E_s = E_{1-s} is exact whenever s and 1-s are exact float reflections
    (all dyadic s) and holds to a few ulp otherwise.
    """
    s = float(s)
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"s must lie in [0,1], got {s!r}")
    s_lo = min(s, 1.0 - s)
    s_hi = 1.0 - s_lo
    return min(_fold(p, s_lo, s_hi), _fold(q, s_lo, s_hi))


def _grid_fold(c: BinaryInputChannel, s_vec: np.ndarray) -> np.ndarray:
    """Vectorized max(curve(s), curve(1-s)) on a grid of s values."""
    shared = _shared_support(c.row0, c.row1)
    if not shared:
        raise DisjointSupport()
    l0 = np.log(np.array([c.row0[x] for x in shared]))
    l1 = np.log(np.array([c.row1[x] for x in shared]))

    def vals(sv: np.ndarray) -> np.ndarray:
        mat = np.exp(np.outer(1.0 - sv, l0) + np.outer(sv, l1))
        v = -np.log(mat.sum(axis=1))
        v[(v > -1e-12) & (v < 0.0)] = 0.0
        return v

    return np.maximum(vals(s_vec), vals(1.0 - s_vec))


def _golden_max(
    f: Callable[[float], float], a: float, b: float, tol: float
) -> tuple[float, float]:
    """Golden-section maximization on [a, b], ties toward smaller x."""
    best_x, best_v = a, f(a)
    for x in (b,):
        v = f(x)
        if v > best_v:
            best_x, best_v = x, v
    h = b - a
    if h <= tol:
        return best_x, best_v
    n_iter = int(math.ceil(math.log(tol / h) / math.log(_INV_PHI)))
    c = b - _INV_PHI * h
    d = a + _INV_PHI * h
    fc, fd = f(c), f(d)
    for x, v in ((c, fc), (d, fd)):
        if v > best_v or (v == best_v and x < best_x):
            best_x, best_v = x, v
    for _ in range(n_iter):
        if fc > fd:
            b, d, fd = d, c, fc
            h = b - a
            c = b - _INV_PHI * h
            fc = f(c)
            if fc > best_v or (fc == best_v and c < best_x):
                best_x, best_v = c, fc
        else:
            a, c, fc = c, d, fd
            h = b - a
            d = a + _INV_PHI * h
            fd = f(d)
            if fd > best_v or (fd == best_v and d < best_x):
                best_x, best_v = d, fd
    return best_x, best_v


def classify_type(c: BinaryInputChannel, s_star: float) -> TypeClass:
    """Position of the curve's unique argmax relative to (s_star, 1-s_star).

    Skewed outside the closed window, Balanced strictly inside, Neutral
    within 1e-9 of either boundary. A curve that is constant in s has no
    unique argmax and classifies as NonUniqueMaximum. s_star = 0 is accepted
    (endpoint argmaxes then classify as Neutral).
    """
    s_star = float(s_star)
    if not 0.0 <= s_star <= 0.5:
        raise ValueError(f"s_star must lie in [0, 0.5], got {s_star!r}")
    if support_relation(c).kind is SupportKind.DISJOINT:
        raise DisjointSupport()
    _, argmax, unique = _maximize_seq_curve([(c.row0, c.row1)])
    if not unique:
        return TypeClass(TypeKind.NON_UNIQUE_MAXIMUM, None)
    if abs(argmax - s_star) <= _NEUTRAL_TOL or abs(argmax - (1.0 - s_star)) <= _NEUTRAL_TOL:
        return TypeClass(TypeKind.NEUTRAL, argmax)
    if argmax < s_star or argmax > 1.0 - s_star:
        return TypeClass(TypeKind.SKEWED, argmax)
    return TypeClass(TypeKind.BALANCED, argmax)


def _pick_regime(
    margin_p: float, margin_q: float, margin_opposite: float
) -> tuple[Regime, bool]:
    margins = (
        (margin_p, Regime.EQUALS_ONE_HOP_P),
        (margin_q, Regime.EQUALS_ONE_HOP_Q),
        (margin_opposite, Regime.OPPOSITE_TYPE),
    )
    applicable = sum(1 for m, _ in margins if m <= _REGIME_TOL)
    best = min(margins, key=lambda t: t[0])
    return best[1], applicable >= 2


def two_hop_exponent(
    p: BinaryInputChannel, q: BinaryInputChannel, *, grid_points: int = _GRID_POINTS
) -> ExponentReport:
    """Optimal 2-hop exponent with maximizer, types, and regime analysis."""
    p_disjoint = support_relation(p).kind is SupportKind.DISJOINT
    q_disjoint = support_relation(q).kind is SupportKind.DISJOINT
    if p_disjoint and q_disjoint:
        raise BothDegenerate("both channels separate their inputs perfectly; no finite exponent")
    if p_disjoint or q_disjoint:
        return _reduced_report(p, q, p_disjoint)

    if grid_points < 3:
        raise ValueError(f"grid needs at least 3 points, got {grid_points}")
    denom = 2 * (grid_points - 1)
    s_grid = np.arange(grid_points) / float(denom)
    curve = np.minimum(_grid_fold(p, s_grid), _grid_fold(q, s_grid))
    i = int(np.argmax(curve))

    def objective(s: float) -> float:
        return e_s(p, q, s)

    lo = float(s_grid[max(i - 1, 0)])
    hi = float(s_grid[min(i + 1, grid_points - 1)])
    s_mid = float(s_grid[i])
    v_mid = objective(s_mid)
    s_ref, v_ref = _golden_max(objective, lo, hi, _GOLDEN_TOL)
    if v_ref > v_mid or (v_ref == v_mid and s_ref < s_mid):
        s_star, e_star = s_ref, v_ref
    else:
        s_star, e_star = s_mid, v_mid

    oh_p = one_hop_exponent(p)
    oh_q = one_hop_exponent(q)
    swap_p = d_c(p.row0, p.row1, s_star) < d_c(p.row0, p.row1, 1.0 - s_star)
    swap_q = d_c(q.row0, q.row1, s_star) < d_c(q.row0, q.row1, 1.0 - s_star)
    type_p = classify_type(p, s_star)
    type_q = classify_type(q, s_star)

    margin_p = abs(e_star - oh_p.value)
    margin_q = abs(e_star - oh_q.value)
    opposite = {type_p.kind, type_q.kind} == {TypeKind.SKEWED, TypeKind.BALANCED}
    if opposite:
        fold_p = _fold(p, s_star, 1.0 - s_star)
        fold_q = _fold(q, s_star, 1.0 - s_star)
        margin_opposite = max(abs(fold_p - e_star), abs(fold_q - e_star))
    else:
        margin_opposite = math.inf
    regime, ambiguous = _pick_regime(margin_p, margin_q, margin_opposite)

    return ExponentReport(
        e_star=e_star,
        s_star=s_star,
        e1_p=oh_p.value,
        e1_q=oh_q.value,
        regime=regime,
        type_p=type_p,
        type_q=type_q,
        input_swaps=(bool(swap_p), bool(swap_q)),
        margin_p=margin_p,
        margin_q=margin_q,
        margin_opposite=margin_opposite,
        ambiguous=ambiguous,
    )


def _reduced_report(
    p: BinaryInputChannel, q: BinaryInputChannel, p_disjoint: bool
) -> ExponentReport:
    """One channel separates its inputs perfectly; the other sets the exponent."""
    survivor = q if p_disjoint else p
    oh = one_hop_exponent(survivor)
    a = oh.argmax_s if oh.argmax_s is not None else 0.5
    s_star = min(a, 1.0 - a)
    surv_type = classify_type(survivor, s_star)
    swap = d_c(survivor.row0, survivor.row1, s_star) < d_c(survivor.row0, survivor.row1, 1.0 - s_star)
    which = "first" if p_disjoint else "second"
    note = (
        f"the {which} channel has disjoint row supports, so one use of it resolves "
        f"the bit; the exponent reduces to the other channel's 1-hop exponent"
    )
    return ExponentReport(
        e_star=float(oh.value),
        s_star=s_star,
        e1_p=UNBOUNDED if p_disjoint else oh.value,
        e1_q=oh.value if p_disjoint else UNBOUNDED,
        regime=Regime.EQUALS_ONE_HOP_Q if p_disjoint else Regime.EQUALS_ONE_HOP_P,
        type_p=None if p_disjoint else surv_type,
        type_q=surv_type if p_disjoint else None,
        input_swaps=(False, bool(swap)) if p_disjoint else (bool(swap), False),
        margin_p=math.inf if p_disjoint else 0.0,
        margin_q=0.0 if p_disjoint else math.inf,
        margin_opposite=math.inf,
        ambiguous=False,
        note=note,
    )


def trivial_converse(
    p: BinaryInputChannel, q: BinaryInputChannel
) -> float | UnboundedType:
    """The 2-hop exponent never beats the worse of the two 1-hop exponents."""
    vp = one_hop_exponent(p).value
    vq = one_hop_exponent(q).value
    if isinstance(vp, UnboundedType):
        return vq
    if isinstance(vq, UnboundedType):
        return vp
    return min(vp, vq)


def _num_jsonable(v: float | UnboundedType | None):
    if v is None:
        return None
    if isinstance(v, UnboundedType):
        return "unbounded"
    if isinstance(v, float) and math.isinf(v):
        return None
    return v


def report_jsonable(r: ExponentReport) -> dict:
    def type_d(t: TypeClass | None):
        if t is None:
            return None
        return {"kind": t.kind.value, "argmax_s": t.argmax_s}

    return {
        "e_star": _num_jsonable(r.e_star),
        "s_star": r.s_star,
        "e1_p": _num_jsonable(r.e1_p),
        "e1_q": _num_jsonable(r.e1_q),
        "regime": r.regime.value,
        "type_p": type_d(r.type_p),
        "type_q": type_d(r.type_q),
        "input_swaps": [r.input_swaps[0], r.input_swaps[1]],
        "margin_p": _num_jsonable(r.margin_p),
        "margin_q": _num_jsonable(r.margin_q),
        "margin_opposite": _num_jsonable(r.margin_opposite),
        "ambiguous": r.ambiguous,
        "note": r.note,
    }
