"""Monte Carlo simulator: estimates, intervals, fits, strategy handling."""

import math

import numpy as np
import pytest

from tandembit import (
    CapExceeded,
    DegenerateStrategy,
    NotEnoughRuns,
    ProtocolTable,
    RelayStrategy,
    SimResult,
    StrategyKind,
    ZeroErrorCount,
    bsc,
    exact_error,
    exponent_fit,
    simulate,
    wilson_interval,
    z_channel,
)
from tandembit._relaytables import (
    build_best_guess_tables,
    build_forward_quantized_tables,
)


def tables_to_protocol(tables, x0, x1) -> ProtocolTable:
    """Unroll per-depth strategy tables into an explicit prefix map."""
    n, m = tables.n, tables.m
    relay_bits = []
    prefixes = [[()]]
    states = {(): 0}
    for k in range(n):
        layer = prefixes[k]
        nxt = []
        for prefix in layer:
            st = states[prefix]
            relay_bits.append(int(tables.g[tables.off_g[k] + st]))
            if k == n - 1:
                continue
        for prefix in layer:
            st = states[prefix]
            for y in range(m):
                child = prefix + (y,)
                if tables.agree[k]:
                    states[child] = st
                else:
                    states[child] = int(
                        tables.trans[tables.off_trans[k] + st * m + y]
                    )
                nxt.append(child)
        prefixes.append(nxt)
    relay = tuple(relay_bits)
    return ProtocolTable(tuple(x0), tuple(x1), relay, m)


class TestWilson:
    def test_zero_errors_pin_lower_edge(self):
        lo, hi = wilson_interval(0, 1000)
        assert lo == 0.0
        assert 0.0 < hi < 0.01

    def test_all_errors_pin_upper_edge(self):
        lo, hi = wilson_interval(1000, 1000)
        assert hi == 1.0
        assert 0.99 < lo < 1.0

    def test_contains_point_estimate(self):
        for err, tot in ((3, 50), (17, 200), (999, 2000)):
            lo, hi = wilson_interval(err, tot)
            assert lo < err / tot < hi

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            wilson_interval(5, 0)
        with pytest.raises(ValueError):
            wilson_interval(11, 10)

    def test_coverage_at_95(self):
        rng = np.random.default_rng(51)
        p_true, trials = 0.01, 5000
        covered = 0
        for _ in range(1000):
            err = int(rng.binomial(trials, p_true))
            lo, hi = wilson_interval(err, trials)
            covered += lo <= p_true <= hi
        assert covered >= 930


class TestSimulate:
    def test_n1_pe_sum_is_one(self):
        r = simulate(bsc(0.1), bsc(0.2), 1, RelayStrategy.best_guess(), trials=2000, seed=0)
        assert r.pe0_hat + r.pe1_hat == 1.0

    def test_error_decays_with_n(self):
        p, q = bsc(0.1), bsc(0.2)
        r20 = simulate(p, q, 20, RelayStrategy.best_guess(), trials=200_000, seed=9)
        r40 = simulate(p, q, 40, RelayStrategy.best_guess(), trials=200_000, seed=9)
        assert r40.pe_sum < r20.pe_sum

    def test_trial_split(self):
        r = simulate(bsc(0.1), bsc(0.1), 4, RelayStrategy.best_guess(), trials=1001, seed=1)
        assert r.trials0 == 501
        assert r.trials1 == 500
        assert r.trials == 1001

    def test_matches_exact_error_best_guess(self):
        p, q = bsc(0.1), bsc(0.2)
        n = 3
        x0, x1 = (0,) * n, (1,) * n
        tables = build_best_guess_tables(x0, x1, p)
        exact = exact_error(tables_to_protocol(tables, x0, x1), p, q)
        r = simulate(p, q, n, RelayStrategy.best_guess(), trials=400_000, seed=13)
        assert abs(r.pe0_hat - exact.pe0) <= 3 * r.ci95[0]
        assert abs(r.pe1_hat - exact.pe1) <= 3 * r.ci95[1]

    def test_matches_exact_error_forward(self):
        p, q = bsc(0.1), z_channel(0.5)
        n = 3
        x0, x1 = (0, 1, 0), (1, 0, 1)
        strat = RelayStrategy.forward_quantized()
        tables = build_forward_quantized_tables(n, p)
        exact = exact_error(tables_to_protocol(tables, x0, x1), p, q)
        r = simulate(p, q, n, strat, trials=400_000, seed=14, encoder=("010", "101"))
        assert abs(r.pe0_hat - exact.pe0) <= 3 * r.ci95[0]
        assert abs(r.pe1_hat - exact.pe1) <= 3 * r.ci95[1]

    def test_reliability_flag(self):
        r = simulate(bsc(0.01), bsc(0.01), 9, RelayStrategy.best_guess(), trials=100, seed=2)
        assert r.reliable == (r.err0 + r.err1 >= 20)

    def test_deterministic_for_seed(self):
        a = simulate(bsc(0.1), bsc(0.2), 6, RelayStrategy.best_guess(), trials=50_000, seed=77)
        b = simulate(bsc(0.1), bsc(0.2), 6, RelayStrategy.best_guess(), trials=50_000, seed=77)
        assert (a.err0, a.err1) == (b.err0, b.err1)
        c = simulate(bsc(0.1), bsc(0.2), 6, RelayStrategy.best_guess(), trials=50_000, seed=78)
        assert (a.err0, a.err1) != (c.err0, c.err1)

    def test_encoder_length_checked(self):
        with pytest.raises(ValueError):
            simulate(
                bsc(0.1), bsc(0.2), 4, RelayStrategy.best_guess(),
                trials=100, seed=0, encoder=("01", "10"),
            )

    def test_caps(self):
        with pytest.raises(CapExceeded):
            simulate(bsc(0.1), bsc(0.2), 20_000, RelayStrategy.best_guess(), trials=100, seed=0)
        with pytest.raises(CapExceeded):
            simulate(bsc(0.1), bsc(0.2), 4, RelayStrategy.best_guess(), trials=10**9 + 1, seed=0)
        with pytest.raises(ValueError):
            simulate(bsc(0.1), bsc(0.2), 4, RelayStrategy.best_guess(), trials=1, seed=0)

    def test_degenerate_forward_partition(self):
        with pytest.raises(DegenerateStrategy):
            simulate(
                bsc(0.1), bsc(0.2), 3, RelayStrategy.forward_quantized((0, 0)),
                trials=100, seed=0,
            )
        # A single transmission never needs the partition to separate.
        r = simulate(
            bsc(0.1), bsc(0.2), 1, RelayStrategy.forward_quantized((0, 0)),
            trials=100, seed=0,
        )
        assert r.pe_sum == 1.0


class TestStrategy:
    def test_describe(self):
        assert RelayStrategy.best_guess().describe() == "BestGuessSoFar"
        assert RelayStrategy.forward_quantized().describe() == "ForwardQuantized(likelihood)"
        assert RelayStrategy.forward_quantized((0, 1, 1, 0)).describe() == "ForwardQuantized(0110)"

    def test_kinds(self):
        assert RelayStrategy.best_guess().kind is StrategyKind.BEST_GUESS_SO_FAR
        assert RelayStrategy.forward_quantized().kind is StrategyKind.FORWARD_QUANTIZED


def synthetic_result(n: int, err_each: int, trials_each: int = 1 << 20) -> SimResult:
    pe0 = err_each / trials_each
    return SimResult(
        n=n,
        trials=2 * trials_each,
        trials0=trials_each,
        trials1=trials_each,
        err0=err_each,
        err1=err_each,
        pe0_hat=pe0,
        pe1_hat=pe0,
        ci95=(0.0, 0.0),
        reliable=err_each * 2 >= 20,
        seed=0,
        strategy="BestGuessSoFar",
        encoder=("0" * n, "1" * n),
    )


class TestExponentFit:
    def test_exact_synthetic_slope(self):
        # pe sums are exact powers of two, so the three points are collinear
        # to float precision and the slope is ln(2)/10.
        results = [
            synthetic_result(10, 1 << 18),
            synthetic_result(20, 1 << 17),
            synthetic_result(30, 1 << 16),
        ]
        slope, stderr = exponent_fit(results)
        assert slope == pytest.approx(math.log(2.0) / 10.0, abs=1e-12)
        assert stderr < 1e-12

    def test_zero_error_run_rejected(self):
        results = [
            synthetic_result(10, 1 << 18),
            synthetic_result(20, 0),
            synthetic_result(30, 1 << 16),
        ]
        with pytest.raises(ZeroErrorCount):
            exponent_fit(results)

    def test_thin_tail_run_still_anchors_the_fit(self):
        # 5 errors flags the n=30 run unreliable, but any nonzero count
        # must still contribute a point; only zero counts are refused.
        results = [
            synthetic_result(10, 1 << 18),
            synthetic_result(20, 1 << 17),
            synthetic_result(30, 5),
        ]
        assert not results[-1].reliable
        slope, stderr = exponent_fit(results)
        expected = [
            (10.0, -math.log(2 * (1 << 18) / (1 << 20))),
            (20.0, -math.log(2 * (1 << 17) / (1 << 20))),
            (30.0, -math.log(2 * 5 / (1 << 20))),
        ]
        x_mean = sum(x for x, _ in expected) / 3
        y_mean = sum(y for _, y in expected) / 3
        sxx = sum((x - x_mean) ** 2 for x, _ in expected)
        sxy = sum((x - x_mean) * (y - y_mean) for x, y in expected)
        assert slope == pytest.approx(sxy / sxx, rel=1e-12)

    def test_needs_three_distinct_blocklengths(self):
        results = [
            synthetic_result(10, 1 << 18),
            synthetic_result(10, 1 << 18),
            synthetic_result(20, 1 << 17),
        ]
        with pytest.raises(NotEnoughRuns):
            exponent_fit(results)
