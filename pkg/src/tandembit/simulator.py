"""Monte Carlo simulation of relay strategies at moderate blocklengths.

A trial draws the relay's observations y under the chosen hypothesis, runs
the strategy to produce the relayed bits w, draws the decoder's observations
z, and decodes with the exact MAP rule for the simulated strategy: the
likelihoods P(z | hypothesis) are computed by forward recursion over the
strategy's state tables, not by a plug-in heuristic. A weak decoder would
make converse compliance trivially easy and exponent fits meaningless.

Reproducibility contract: every trial owns a counter-based random stream
keyed by (seed, global trial index), error counts are integers, and the two
hypotheses take the first and second half of the trial index range. Results
are therefore independent of chunking, scheduling, and kernel backend.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from ._backend import get_kernels
from ._relaytables import (
    STATE_CAP,
    StrategyTables,
    build_best_guess_tables,
    build_forward_quantized_tables,
    likelihood_partition,
)
from .channel import BinaryInputChannel, as_bits
from .errors import CapExceeded, NotEnoughRuns, ZeroErrorCount

__all__ = [
    "StrategyKind",
    "RelayStrategy",
    "SimResult",
    "simulate",
    "wilson_interval",
    "exponent_fit",
    "likelihood_partition",
]

_MAX_N = 10**4
_MAX_TRIALS = 10**9

# 95% two-sided normal quantile, fixed so intervals never depend on scipy.
_Z95 = 1.959963984540054


class StrategyKind(str, enum.Enum):
    FORWARD_QUANTIZED = "ForwardQuantized"
    BEST_GUESS_SO_FAR = "BestGuessSoFar"


@dataclass(frozen=True)
class RelayStrategy:
    """A causal relaying rule; the bit sent at time 1 is always 0."""

    kind: StrategyKind
    partition: tuple[int, ...] | None = None

    @staticmethod
    def best_guess() -> "RelayStrategy":
        return RelayStrategy(StrategyKind.BEST_GUESS_SO_FAR)

    @staticmethod
    def forward_quantized(partition: tuple[int, ...] | None = None) -> "RelayStrategy":
        return RelayStrategy(StrategyKind.FORWARD_QUANTIZED, partition)

    def describe(self) -> str:
        if self.kind is StrategyKind.BEST_GUESS_SO_FAR:
            return "BestGuessSoFar"
        if self.partition is None:
            return "ForwardQuantized(likelihood)"
        return "ForwardQuantized(" + "".join(str(b) for b in self.partition) + ")"


@dataclass(frozen=True)
class SimResult:
    n: int
    trials: int
    trials0: int
    trials1: int
    err0: int
    err1: int
    pe0_hat: float
    pe1_hat: float
    ci95: tuple[float, float]
    reliable: bool
    seed: int
    strategy: str
    encoder: tuple[str, str]

    @property
    def pe_sum(self) -> float:
        return self.pe0_hat + self.pe1_hat

    def to_jsonable(self) -> dict:
        return {
            "n": self.n,
            "trials": self.trials,
            "trials0": self.trials0,
            "trials1": self.trials1,
            "err0": self.err0,
            "err1": self.err1,
            "pe0_hat": self.pe0_hat,
            "pe1_hat": self.pe1_hat,
            "ci95": [self.ci95[0], self.ci95[1]],
            "reliable": self.reliable,
            "seed": self.seed,
            "strategy": self.strategy,
            "encoder": [self.encoder[0], self.encoder[1]],
        }


def wilson_interval(err: int, total: int) -> tuple[float, float]:
    """95% Wilson score interval for a binomial proportion."""
    if total <= 0:
        raise ValueError("total must be positive")
    if not 0 <= err <= total:
        raise ValueError(f"err={err} outside [0, {total}]")
    p = err / total
    z2 = _Z95 * _Z95
    denom = 1.0 + z2 / total
    center = (p + z2 / (2.0 * total)) / denom
    half = (
        _Z95
        * math.sqrt(p * (1.0 - p) / total + z2 / (4.0 * total * total))
        / denom
    )
    lo = max(0.0, center - half)
    hi = min(1.0, center + half)
    # The exact endpoints at the boundary counts; center +- half only misses
    # them by float cancellation noise.
    if err == 0:
        lo = 0.0
    if err == total:
        hi = 1.0
    return lo, hi


def _build_tables(
    strategy: RelayStrategy,
    x0: tuple[int, ...],
    x1: tuple[int, ...],
    p: BinaryInputChannel,
    cap: int,
) -> StrategyTables:
    if strategy.kind is StrategyKind.BEST_GUESS_SO_FAR:
        return build_best_guess_tables(x0, x1, p, cap=cap)
    return build_forward_quantized_tables(len(x0), p, strategy.partition)


def simulate(
    p: BinaryInputChannel,
    q: BinaryInputChannel,
    n: int,
    strategy: RelayStrategy,
    trials: int,
    seed: int,
    encoder: tuple | None = None,
    backend: str | None = None,
    state_cap: int = STATE_CAP,
) -> SimResult:
    """Estimate both conditional error rates of a strategy over (p, q).

    trials are split between the hypotheses: global trial indices
    [0, ceil(trials/2)) run hypothesis 0, the rest hypothesis 1. The default
    encoder is the repetition pair 0^n / 1^n.
    """
    n = int(n)
    if n < 1:
        raise ValueError(f"blocklength must be at least 1, got {n}")
    if n > _MAX_N:
        raise CapExceeded(f"blocklength {n} exceeds the cap {_MAX_N}", size=n)
    trials = int(trials)
    if trials < 2:
        raise ValueError(f"need at least 2 trials, got {trials}")
    if trials > _MAX_TRIALS:
        raise CapExceeded(f"{trials} trials exceed the cap {_MAX_TRIALS}", size=trials)
    if encoder is None:
        x0 = (0,) * n
        x1 = (1,) * n
    else:
        x0, x1 = as_bits(encoder[0]), as_bits(encoder[1])
    if len(x0) != n or len(x1) != n:
        raise ValueError(
            f"encoder codewords must have length n={n}, got {len(x0)} and {len(x1)}"
        )

    tables = _build_tables(strategy, x0, x1, p, state_cap)
    kern = get_kernels(backend)

    x_bits = np.array([x0, x1], dtype=np.int8)
    p_rows = np.array([p.row0, p.row1], dtype=np.float64)
    q_rows = np.array([q.row0, q.row1], dtype=np.float64)
    p_thresh = np.cumsum(p_rows, axis=1)[:, : p.m - 1]
    q_thresh = np.cumsum(q_rows, axis=1)[:, : q.m - 1]

    t0 = (trials + 1) // 2
    t1 = trials - t0
    args = (
        x_bits,
        p_rows,
        q_rows,
        p_thresh,
        q_thresh,
        tables.n_states,
        tables.agree,
        tables.g,
        tables.off_g,
        tables.trans,
        tables.off_trans,
    )
    dec0 = kern.simulate_range(seed, 0, t0, 0, *args)
    dec1 = kern.simulate_range(seed, t0, t1, 1, *args)
    err0 = int(np.count_nonzero(dec0 != 0))
    err1 = int(np.count_nonzero(dec1 != 1))

    lo0, hi0 = wilson_interval(err0, t0)
    lo1, hi1 = wilson_interval(err1, t1)
    return SimResult(
        n=n,
        trials=trials,
        trials0=t0,
        trials1=t1,
        err0=err0,
        err1=err1,
        pe0_hat=err0 / t0,
        pe1_hat=err1 / t1,
        ci95=((hi0 - lo0) / 2.0, (hi1 - lo1) / 2.0),
        reliable=(err0 + err1) >= 20,
        seed=int(seed),
        strategy=strategy.describe(),
        encoder=(
            "".join(str(b) for b in x0),
            "".join(str(b) for b in x1),
        ),
    )


def exponent_fit(results: list[SimResult]) -> tuple[float, float]:
    """Least-squares slope of -ln(pe sum) against n, with standard error.

    Every run with at least one observed error contributes a point; the
    `reliable` flag is a confidence diagnostic, not a fit filter, so a
    thin tail run still anchors the regression (its scatter shows up in
    the standard error instead). A run with zero observed errors cannot
    contribute a finite point at all and is reported as an error rather
    than silently extrapolated. At least 3 distinct blocklengths are
    needed for a slope with a meaningful standard error.
    """
    for r in results:
        if r.err0 + r.err1 == 0:
            raise ZeroErrorCount(
                f"run at n={r.n} observed no errors; error rate too small to estimate"
            )
    distinct = sorted({r.n for r in results})
    if len(distinct) < 3:
        raise NotEnoughRuns(
            f"need at least 3 distinct blocklengths, have {len(distinct)}"
        )
    xs = [float(r.n) for r in results]
    ys = [-math.log(r.pe0_hat + r.pe1_hat) for r in results]
    n_pts = len(xs)
    x_mean = math.fsum(xs) / n_pts
    y_mean = math.fsum(ys) / n_pts
    sxx = math.fsum((x - x_mean) ** 2 for x in xs)
    sxy = math.fsum((x - x_mean) * (y - y_mean) for x, y in zip(xs, ys))
    slope = sxy / sxx
    intercept = y_mean - slope * x_mean
    rss = math.fsum((y - (intercept + slope * x)) ** 2 for x, y in zip(xs, ys))
    # Guard tiny negative noise from the fsum of squared residuals.
    rss = max(0.0, rss)
    stderr = math.sqrt(rss / (n_pts - 2) / sxx)
    return slope, stderr
