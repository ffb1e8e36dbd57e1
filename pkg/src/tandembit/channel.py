"""Binary-input discrete memoryless channels.

A channel is a 2 x m row-stochastic matrix: row 0 and row 1 are the
conditional output distributions for inputs 0 and 1 over an output alphabet
indexed 0..m-1. Symbol names never enter the core; labels are display-only.

Zero entries are kept exactly as 0.0 (never flushed to a tiny positive):
support structure drives the degenerate reduction and the endpoint limits
downstream, so it must survive validation untouched.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

from .errors import AlphabetMismatch, NegativeEntry, RowSumOutOfTolerance, TooFewOutputs

__all__ = [
    "BinaryInputChannel",
    "SupportKind",
    "SupportRelation",
    "validate",
    "p_min",
    "pair_p_min",
    "support_relation",
    "swap_inputs",
    "bsc",
    "z_channel",
    "bec",
    "noiseless",
    "to_jsonable",
    "as_bits",
]

_INGEST_TOL = 1e-9


@dataclass(frozen=True)
class BinaryInputChannel:
    """Validated channel. Construct through :func:`validate` or a constructor."""

    row0: tuple[float, ...]
    row1: tuple[float, ...]
    label: str | None = None

    @property
    def m(self) -> int:
        return len(self.row0)

    def row(self, bit: int) -> tuple[float, ...]:
        if bit not in (0, 1):
            raise ValueError(f"input symbol must be 0 or 1, got {bit!r}")
        return self.row1 if bit else self.row0


class SupportKind(str, enum.Enum):
    OVERLAPPING = "Overlapping"
    DISJOINT = "Disjoint"


@dataclass(frozen=True)
class SupportRelation:
    kind: SupportKind
    witness: int | None = None


def validate(raw: Sequence[Sequence[float]], label: str | None = None) -> BinaryInputChannel:
    """Check and canonicalize a 2 x m matrix of reals.

    Rows are renormalized only when their sum is within 1e-9 of 1; anything
    further off is rejected rather than silently repaired. After
    renormalization row sums are 1 within 1e-12.
    """
    rows = [tuple(float(v) for v in r) for r in raw]
    if len(rows) != 2:
        raise ValueError(f"expected exactly 2 rows, got {len(rows)}")
    if len(rows[0]) != len(rows[1]):
        raise AlphabetMismatch(
            f"rows have different lengths ({len(rows[0])} vs {len(rows[1])})"
        )
    if len(rows[0]) < 2:
        raise TooFewOutputs(f"need m >= 2 output symbols, got m={len(rows[0])}")
    out: list[tuple[float, ...]] = []
    for i, row in enumerate(rows):
        for j, v in enumerate(row):
            if v < 0.0 or math.isnan(v):
                raise NegativeEntry(f"row {i}, column {j}: entry {v!r} is not a probability")
        total = math.fsum(row)
        if abs(total - 1.0) > _INGEST_TOL:
            raise RowSumOutOfTolerance(f"row {i} sums to {total!r}, outside 1 +/- {_INGEST_TOL}")
        if total != 1.0:
            row = tuple(v / total for v in row)
        out.append(row)
        # Row-sum tolerance implies every positive row holds a positive entry.
        if not any(v > 0.0 for v in row):
            raise RowSumOutOfTolerance(f"row {i} has no positive entry")
    return BinaryInputChannel(out[0], out[1], label)


def p_min(c: BinaryInputChannel) -> float:
    """Smallest strictly positive entry across both rows."""
    return min(v for row in (c.row0, c.row1) for v in row if v > 0.0)


def pair_p_min(p: BinaryInputChannel, q: BinaryInputChannel) -> float:
    """Smallest strictly positive transition probability across both channels."""
    return min(p_min(p), p_min(q))


def support_relation(c: BinaryInputChannel) -> SupportRelation:
    """Disjoint iff no output symbol is reachable from both inputs."""
    for j in range(c.m):
        if c.row0[j] > 0.0 and c.row1[j] > 0.0:
            return SupportRelation(SupportKind.OVERLAPPING, witness=j)
    return SupportRelation(SupportKind.DISJOINT, witness=None)


def swap_inputs(c: BinaryInputChannel) -> BinaryInputChannel:
    return BinaryInputChannel(c.row1, c.row0, c.label)


def bsc(p: float, label: str | None = None) -> BinaryInputChannel:
    """Binary symmetric channel with crossover probability ``p``."""
    if not 0.0 <= p <= 1.0:
        raise NegativeEntry(f"crossover probability must be in [0,1], got {p!r}")
    return BinaryInputChannel((1.0 - p, p), (p, 1.0 - p), label or f"bsc({p:g})")


def z_channel(q: float, label: str | None = None) -> BinaryInputChannel:
    """Z-channel: input 0 is noiseless, input 1 flips to 0 with probability ``q``."""
    if not 0.0 <= q <= 1.0:
        raise NegativeEntry(f"flip probability must be in [0,1], got {q!r}")
    return BinaryInputChannel((1.0, 0.0), (q, 1.0 - q), label or f"z({q:g})")


def bec(eps: float, label: str | None = None) -> BinaryInputChannel:
    """Binary erasure channel: outputs are (0, 1, erasure)."""
    if not 0.0 <= eps <= 1.0:
        raise NegativeEntry(f"erasure probability must be in [0,1], got {eps!r}")
    return BinaryInputChannel((1.0 - eps, 0.0, eps), (0.0, 1.0 - eps, eps), label or f"bec({eps:g})")


def noiseless(label: str | None = None) -> BinaryInputChannel:
    """Noiseless binary channel (identity matrix); rows have disjoint support."""
    return BinaryInputChannel((1.0, 0.0), (0.0, 1.0), label or "noiseless")


def to_jsonable(c: BinaryInputChannel) -> dict:
    return {"name": c.label, "rows": [list(c.row0), list(c.row1)]}


def as_bits(w: str | Sequence[int]) -> tuple[int, ...]:
    """Parse a codeword given as a 0/1 string or an int sequence."""
    if isinstance(w, str):
        items: Sequence = list(w)
    else:
        items = w
    out = []
    for ch in items:
        b = int(ch)
        if b not in (0, 1):
            raise ValueError(f"codeword symbols must be 0 or 1, got {ch!r}")
        out.append(b)
    return tuple(out)
