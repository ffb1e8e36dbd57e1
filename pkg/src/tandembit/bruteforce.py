"""Exhaustive optimal-protocol oracle for tiny blocklengths.

Any randomized protocol is a mixture of deterministic ones and the average
error is linear in the mixture, so the minimum is attained by a
deterministic protocol: a codeword pair plus a total map from every received
prefix to the next relayed bit. At tiny n both spaces are enumerable, the
exact error of every protocol is computable in closed form, and the optimum
certifies the converse bound from the outside.

Enumeration order is pinned so results are reproducible and the search can
be partitioned: codeword pairs ascending by (x0, x1) packed MSB-first, relay
maps ascending as integers whose bit j is the reply to prefix index j.
Prefix index = depth offset + the prefix read as a base-m numeral. Ties keep
the first protocol in that order.

Floats carry the search (both kernel backends produce bitwise-identical
rankings); an exact-rational mode recomputes errors and rankings with
Fraction arithmetic to settle any doubt and to freeze golden values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from ._backend import get_kernels
from .bounds import theorem3_bound
from .channel import BinaryInputChannel, as_bits, pair_p_min
from .errors import CapExceeded
from .exponent import two_hop_exponent

__all__ = [
    "ProtocolTable",
    "ExactErrorTable",
    "CertificationReport",
    "ChainingReport",
    "prefix_offsets",
    "relay_map_size",
    "exact_error",
    "exact_error_rational",
    "optimal_protocol",
    "optimal_protocol_rational",
    "certify_theorem3",
    "check_prefix_chaining",
]


def prefix_offsets(n: int, m: int) -> tuple[int, ...]:
    """Index offset of each prefix depth 0..n-1 in the flat prefix order."""
    offs = []
    acc = 0
    for k in range(n):
        offs.append(acc)
        acc += m**k
    return tuple(offs)


def relay_map_size(n: int, m: int) -> int:
    return sum(m**k for k in range(n))


@dataclass(frozen=True)
class ProtocolTable:
    """A deterministic protocol: codewords plus a total relay map.

    relay[j] is the bit transmitted immediately after the prefix with index
    j; the relay's transmission at time k+1 therefore depends only on
    y_1..y_k, never on the future.
    """

    x0: tuple[int, ...]
    x1: tuple[int, ...]
    relay: tuple[int, ...]
    m: int

    @property
    def n(self) -> int:
        return len(self.x0)

    def __post_init__(self):
        if len(self.x1) != len(self.x0):
            raise ValueError("codeword lengths differ")
        need = relay_map_size(self.n, self.m)
        if len(self.relay) != need:
            raise ValueError(
                f"relay map has {len(self.relay)} entries, needs {need} "
                f"(all prefixes of length 0..{self.n - 1})"
            )
        if any(b not in (0, 1) for b in self.relay):
            raise ValueError("relay entries must be bits")

    def w_next(self, prefix: Sequence[int]) -> int:
        """The bit transmitted right after receiving ``prefix``."""
        offs = prefix_offsets(self.n, self.m)
        v = 0
        for sym in prefix:
            v = v * self.m + sym
        return self.relay[offs[len(prefix)] + v]

    def w_sequence(self, y: Sequence[int]) -> tuple[int, ...]:
        """All n transmitted bits for a full observation sequence."""
        return tuple(self.w_next(y[:k]) for k in range(self.n))

    def relay_int(self) -> int:
        out = 0
        for j, b in enumerate(self.relay):
            out |= b << j
        return out

    @staticmethod
    def from_relay_int(
        x0: Sequence[int], x1: Sequence[int], relay_int: int, m: int
    ) -> "ProtocolTable":
        b0, b1 = as_bits(x0), as_bits(x1)
        size = relay_map_size(len(b0), m)
        relay = tuple((relay_int >> j) & 1 for j in range(size))
        return ProtocolTable(b0, b1, relay, m)


@dataclass(frozen=True)
class ExactErrorTable:
    """Exact conditional errors of one protocol under the MAP decoder.

    per_prefix maps every y-prefix (length 0..n) to (pe0, pe1) conditioned
    on the relay having received that prefix; the empty prefix gives the
    unconditional errors.
    """

    pe0: float
    pe1: float
    per_prefix: dict[tuple[int, ...], tuple[float, float]]

    @property
    def pe_sum(self) -> float:
        return self.pe0 + self.pe1


@dataclass(frozen=True)
class CertificationReport:
    n: int
    protocol: ProtocolTable
    pe0: float
    pe1: float
    pe_sum: float
    lhs: float
    bound: float
    slack: float
    ok: bool
    e_star: float

    def to_jsonable(self) -> dict:
        return {
            "n": self.n,
            "x0": "".join(str(b) for b in self.protocol.x0),
            "x1": "".join(str(b) for b in self.protocol.x1),
            "relay_map": self.protocol.relay_int(),
            "pe0": self.pe0,
            "pe1": self.pe1,
            "pe_sum": self.pe_sum,
            "lhs": self.lhs,
            "bound": self.bound,
            "slack": self.slack,
            "ok": self.ok,
            "e_star": self.e_star,
        }


@dataclass(frozen=True)
class ChainingReport:
    checked: int
    violations: list
    min_slack: float


def _sequences(n: int, m: int):
    seq = [0] * n
    while True:
        yield tuple(seq)
        k = n - 1
        while k >= 0 and seq[k] == m - 1:
            seq[k] = 0
            k -= 1
        if k < 0:
            return
        seq[k] += 1


def _seq_prob(seq: Sequence[int], bits: Sequence[int], rows) -> float:
    out = 1.0
    for sym, bit in zip(seq, bits):
        out *= rows[bit][sym]
    return out


def exact_error(
    pt: ProtocolTable, p: BinaryInputChannel, q: BinaryInputChannel
) -> ExactErrorTable:
    """Exact MAP error of a protocol by summing over all (y, z) paths.

    The decoder observes only z; its likelihoods sum the y-law against the
    relay's induced w-sequences. Per-prefix conditionals come from a
    backward recursion, so the law of total probability holds at every depth
    by construction (up to float rounding).
    """
    return _exact_error_generic(
        pt,
        (p.row0, p.row1),
        (q.row0, q.row1),
        one=1.0,
        fsum=math.fsum,
    )


def exact_error_rational(
    pt: ProtocolTable,
    p_rows: Sequence[Sequence[Fraction]],
    q_rows: Sequence[Sequence[Fraction]],
) -> ExactErrorTable:
    """exact_error with Fraction arithmetic; returned fields stay Fractions."""
    return _exact_error_generic(
        pt,
        tuple(tuple(Fraction(v) for v in row) for row in p_rows),
        tuple(tuple(Fraction(v) for v in row) for row in q_rows),
        one=Fraction(1),
        fsum=lambda terms: sum(terms, Fraction(0)),
    )


def _exact_error_generic(pt: ProtocolTable, p_rows, q_rows, one, fsum):
    n, m = pt.n, pt.m
    mz = len(q_rows[0])
    ys = list(_sequences(n, m))
    zs = list(_sequences(n, mz))
    w_of = {y: pt.w_sequence(y) for y in ys}

    # Decoder likelihoods over z, mixing the y-law with the relayed bits.
    lik = {}
    for z in zs:
        for theta, xw in ((0, pt.x0), (1, pt.x1)):
            terms = []
            for y in ys:
                py = one
                for sym, bit in zip(y, xw):
                    py = py * p_rows[bit][sym]
                qz = one
                for sym, bit in zip(z, w_of[y]):
                    qz = qz * q_rows[bit][sym]
                terms.append(py * qz)
            lik[(theta, z)] = fsum(terms)
    decide_1 = {z: lik[(1, z)] > lik[(0, z)] for z in zs}

    # Error mass per induced w-sequence, reused by every y with that w.
    err_by_w: dict[tuple[int, ...], tuple] = {}
    for w in {w_of[y] for y in ys}:
        e0_terms = []
        e1_terms = []
        for z in zs:
            qz = one
            for sym, bit in zip(z, w):
                qz = qz * q_rows[bit][sym]
            if decide_1[z]:
                e0_terms.append(qz)
            else:
                e1_terms.append(qz)
        err_by_w[w] = (fsum(e0_terms), fsum(e1_terms))

    per_prefix: dict[tuple[int, ...], tuple] = {}
    for y in ys:
        e0, e1 = err_by_w[w_of[y]]
        per_prefix[y] = (e0, e1)
    for k in range(n - 1, -1, -1):
        for prefix in _sequences(k, m):
            t0 = []
            t1 = []
            for sym in range(m):
                child = per_prefix[prefix + (sym,)]
                t0.append(p_rows[pt.x0[k]][sym] * child[0])
                t1.append(p_rows[pt.x1[k]][sym] * child[1])
            per_prefix[prefix] = (fsum(t0), fsum(t1))
    root = per_prefix[()]
    return ExactErrorTable(pe0=root[0], pe1=root[1], per_prefix=per_prefix)


def _default_cap(m: int) -> int:
    return {2: 4, 3: 3}.get(m, 2)


def _build_qzw(q_rows, n: int) -> np.ndarray:
    mz = len(q_rows[0])
    zs = list(_sequences(n, mz))
    out = np.empty((len(zs), 1 << n), dtype=np.float64)
    for zi, z in enumerate(zs):
        for w_int in range(1 << n):
            acc = 1.0
            for k in range(n):
                bit = (w_int >> (n - 1 - k)) & 1
                acc *= q_rows[bit][z[k]]
            out[zi, w_int] = acc
    return out


def optimal_protocol(
    p: BinaryInputChannel,
    q: BinaryInputChannel,
    n: int,
    override_cap: bool = False,
    backend: str | None = None,
) -> tuple[ProtocolTable, ExactErrorTable]:
    """Search every deterministic protocol; return the minimum pe0 + pe1.

    The default cap keeps the enumeration tractable (n <= 4 for binary
    output alphabets, n <= 3 for ternary); pass override_cap=True to
    acknowledge a longer run.
    """
    n = int(n)
    if n < 1:
        raise ValueError(f"blocklength must be at least 1, got {n}")
    m = p.m
    relay_bits = relay_map_size(n, m)
    size = (4**n) * (1 << relay_bits)
    if not override_cap and n > _default_cap(m):
        raise CapExceeded(
            f"n={n} with |Y|={m} enumerates {size} protocols; "
            f"default cap is n={_default_cap(m)} (override to proceed)",
            size=size,
        )
    if relay_bits > 40:
        raise CapExceeded(
            f"relay map space 2^{relay_bits} is not enumerable", size=size
        )
    kern = get_kernels(backend)
    p_rows = (p.row0, p.row1)
    qzw = _build_qzw((q.row0, q.row1), n)
    offs = np.asarray(prefix_offsets(n, m), dtype=np.int64)
    ys = list(_sequences(n, m))

    best = None  # (pe_sum, x0_int, x1_int, relay_int, pe0, pe1)
    for x0_int in range(1 << n):
        x0 = tuple((x0_int >> (n - 1 - k)) & 1 for k in range(n))
        for x1_int in range(1 << n):
            x1 = tuple((x1_int >> (n - 1 - k)) & 1 for k in range(n))
            py0 = np.array([_seq_prob(y, x0, p_rows) for y in ys])
            py1 = np.array([_seq_prob(y, x1, p_rows) for y in ys])
            relay, pe0, pe1 = kern.search_protocols(
                py0, py1, qzw, offs, n, m, relay_bits
            )
            pe_sum = pe0 + pe1
            if best is None or pe_sum < best[0]:
                best = (pe_sum, x0_int, x1_int, relay, pe0, pe1)
    _, x0_int, x1_int, relay_int, _, _ = best
    x0 = tuple((x0_int >> (n - 1 - k)) & 1 for k in range(n))
    x1 = tuple((x1_int >> (n - 1 - k)) & 1 for k in range(n))
    pt = ProtocolTable.from_relay_int(x0, x1, relay_int, m)
    return pt, exact_error(pt, p, q)


def optimal_protocol_rational(
    p_rows: Sequence[Sequence[Fraction]],
    q_rows: Sequence[Sequence[Fraction]],
    n: int,
) -> tuple[ProtocolTable, ExactErrorTable]:
    """Exact-rational full search; the authority for golden values."""
    m = len(p_rows[0])
    relay_bits = relay_map_size(n, m)
    best = None
    for x0_int in range(1 << n):
        x0 = tuple((x0_int >> (n - 1 - k)) & 1 for k in range(n))
        for x1_int in range(1 << n):
            x1 = tuple((x1_int >> (n - 1 - k)) & 1 for k in range(n))
            for relay_int in range(1 << relay_bits):
                pt = ProtocolTable.from_relay_int(x0, x1, relay_int, m)
                table = exact_error_rational(pt, p_rows, q_rows)
                pe_sum = table.pe0 + table.pe1
                if best is None or pe_sum < best[0]:
                    best = (pe_sum, pt, table)
    return best[1], best[2]


def certify_theorem3(
    p: BinaryInputChannel,
    q: BinaryInputChannel,
    n: int,
    override_cap: bool = False,
    backend: str | None = None,
) -> CertificationReport:
    """Check the optimal protocol against the converse bound from outside."""
    bound = theorem3_bound(n, p, q)
    e_star = two_hop_exponent(p, q).e_star
    pt, table = optimal_protocol(p, q, n, override_cap=override_cap, backend=backend)
    lhs = -math.log(table.pe_sum)
    return CertificationReport(
        n=n,
        protocol=pt,
        pe0=table.pe0,
        pe1=table.pe1,
        pe_sum=table.pe_sum,
        lhs=lhs,
        bound=bound,
        slack=bound - lhs,
        ok=lhs <= bound,
        e_star=e_star,
    )


def check_prefix_chaining(
    pt: ProtocolTable,
    p: BinaryInputChannel,
    q: BinaryInputChannel,
    rel_tol: float = 1e-12,
) -> ChainingReport:
    """Verify that conditional errors shrink at most by one transition factor.

    For every prefix and every possible next symbol, the parent's
    conditional error must be at least the child's scaled by the transition
    probability (and a fortiori by the global p_min). Checked for both
    hypotheses; float comparisons get a relative slack.
    """
    table = exact_error(pt, p, q)
    pmin = pair_p_min(p, q)
    n, m = pt.n, pt.m
    checked = 0
    violations = []
    min_slack = math.inf
    for k in range(n):
        for prefix in _sequences(k, m):
            parent = table.per_prefix[prefix]
            for sym in range(m):
                child = table.per_prefix[prefix + (sym,)]
                for theta, xw in ((0, pt.x0), (1, pt.x1)):
                    trans_p = p.row(xw[k])[sym]
                    if trans_p <= 0.0:
                        continue
                    lhs = parent[theta]
                    for factor, form in ((trans_p, "exact"), (pmin, "pmin")):
                        rhs = factor * child[theta]
                        checked += 1
                        slack = lhs - rhs
                        if slack < min_slack:
                            min_slack = slack
                        if lhs < rhs * (1.0 - rel_tol):
                            violations.append(
                                {
                                    "prefix": prefix,
                                    "symbol": sym,
                                    "theta": theta,
                                    "form": form,
                                    "parent": lhs,
                                    "bound": rhs,
                                }
                            )
    return ChainingReport(checked=checked, violations=violations, min_slack=min_slack)
