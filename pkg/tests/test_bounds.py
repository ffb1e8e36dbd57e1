"""Converse bounds: pinned values, cross-form equivalence, and limits."""

import math

import numpy as np
import pytest

from tandembit import (
    CountOverflow,
    DegeneratePair,
    LengthMismatch,
    bsc,
    corollary1_bound,
    d_c_derivatives,
    dmc_pair_bounds,
    noiseless,
    pair_p_min,
    pairwise_test_bounds,
    position_count_bounds,
    theorem3_bound,
    two_hop_exponent,
    z_channel,
)
from tests.conftest import sample_channel

LN4 = math.log(4.0)
LN8 = math.log(8.0)


class TestPairwiseTestBounds:
    def test_identical_distributions_reduce_to_ln4(self):
        p = (0.3, 0.7)
        b = pairwise_test_bounds(p, p, 0.5)
        assert b.rhs0 == pytest.approx(LN4, abs=1e-14)
        assert b.rhs1 == pytest.approx(LN4, abs=1e-14)

    def test_components(self):
        c = bsc(0.1)
        s = 0.3
        pt = d_c_derivatives(c.row0, c.row1, s)
        spread = math.sqrt(-2.0 * pt.d2)
        b = pairwise_test_bounds(c.row0, c.row1, s)
        assert b.rhs0 == pytest.approx(pt.value - s * pt.d1 + s * spread + LN4, abs=1e-13)
        assert b.rhs1 == pytest.approx(
            pt.value + (1 - s) * pt.d1 + (1 - s) * spread + LN4, abs=1e-13
        )
        assert b.s == s

    def test_endpoints_refused(self):
        c = bsc(0.1)
        for s in (0.0, 1.0):
            with pytest.raises(ValueError):
                pairwise_test_bounds(c.row0, c.row1, s)


class TestDmcPairBounds:
    def test_pinned_bsc_example(self):
        # Two differing positions at s = 1/2: divergence term is symmetric,
        # first-derivative term vanishes, remainder is sqrt(2n) ln(1/pmin) + ln 4.
        b = dmc_pair_bounds("00", "11", bsc(0.1), 0.5)
        expect = 2 * (-math.log(0.6)) + 2.0 * math.log(10.0) + LN4
        assert b.rhs0 == pytest.approx(expect, abs=1e-12)
        assert b.rhs1 == pytest.approx(expect, abs=1e-12)

    def test_closed_interval_accepted(self):
        for s in (0.0, 1.0):
            b = dmc_pair_bounds("01", "10", bsc(0.2), s)
            assert math.isfinite(b.rhs0) and math.isfinite(b.rhs1)

    def test_remainder_uses_full_length(self):
        # Agreeing positions contribute no divergence but still widen the
        # sqrt(2n) remainder.
        short = dmc_pair_bounds("01", "10", bsc(0.1), 0.3)
        padded = dmc_pair_bounds("0100", "1000", bsc(0.1), 0.3)
        diff = padded.rhs0 - short.rhs0
        expect = (math.sqrt(8.0) - math.sqrt(4.0)) * math.log(10.0)
        assert diff == pytest.approx(expect, abs=1e-12)

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            dmc_pair_bounds("01", "0", bsc(0.1), 0.5)


class TestPositionCountBounds:
    def test_matches_codeword_form(self):
        # Counting type-(0,1) and type-(1,0) positions reproduces the
        # codeword-pair bound exactly.
        q = bsc(0.1)
        w0, w1 = "0011", "1101"
        s = 0.3
        via_counts = position_count_bounds(2, 1, 4, q, s)
        via_words = dmc_pair_bounds(w0, w1, q, s)
        assert via_counts.rhs0 == pytest.approx(via_words.rhs0, abs=1e-12)
        assert via_counts.rhs1 == pytest.approx(via_words.rhs1, abs=1e-12)

    def test_equivalence_on_random_channels(self):
        rng = np.random.default_rng(31)
        for _ in range(20):
            q = sample_channel(rng)
            n01 = int(rng.integers(0, 4))
            n10 = int(rng.integers(0, 4))
            pad = int(rng.integers(0, 3))
            n = n01 + n10 + pad
            if n == 0:
                continue
            w0 = "0" * n01 + "1" * n10 + "0" * pad
            w1 = "1" * n01 + "0" * n10 + "0" * pad
            s = float(rng.uniform(0.05, 0.95))
            a = position_count_bounds(n01, n10, n, q, s)
            b = dmc_pair_bounds(w0, w1, q, s)
            assert a.rhs0 == pytest.approx(b.rhs0, abs=1e-12)
            assert a.rhs1 == pytest.approx(b.rhs1, abs=1e-12)

    def test_fractional_counts_accepted(self):
        b = position_count_bounds(1.5, 0.25, 4, bsc(0.1), 0.4)
        assert math.isfinite(b.rhs0)

    def test_count_overflow(self):
        with pytest.raises(CountOverflow):
            position_count_bounds(3, 2, 4, bsc(0.1), 0.4)
        with pytest.raises(CountOverflow):
            position_count_bounds(-0.5, 1, 4, bsc(0.1), 0.4)

    def test_open_interval_required(self):
        with pytest.raises(ValueError):
            position_count_bounds(1, 1, 4, bsc(0.1), 0.0)


class TestCorollary1Bound:
    def test_equal_codewords_pure_remainder(self):
        b = corollary1_bound("00", "00", bsc(0.1))
        assert b == pytest.approx(2.0 * math.log(10.0) + LN4, abs=1e-12)

    def test_dominates_single_s_rate(self):
        # The maximized curve can only raise the divergence part.
        q = bsc(0.15)
        w0, w1 = "0101", "1010"
        b = corollary1_bound(w0, w1, q)
        rem = math.sqrt(8.0) * (-math.log(0.15)) + LN4
        from tandembit import d_c_seq

        for s in np.linspace(0.05, 0.95, 19):
            rate = d_c_seq(w0, w1, q, float(s))
            assert b >= rate + rem - 1e-9

    def test_symmetric_words_closed_form(self):
        # For repetition words over a BSC the curve peaks at s = 1/2.
        q = bsc(0.1)
        b = corollary1_bound("000", "111", q)
        expect = 3 * (-math.log(0.6)) + math.sqrt(6.0) * math.log(10.0) + LN4
        assert b == pytest.approx(expect, abs=1e-10)


class TestTheorem3:
    def test_pinned_value_n100(self):
        p, q = bsc(0.1), bsc(0.2)
        e_star = two_hop_exponent(p, q).e_star
        expect = 100 * e_star + (math.sqrt(200.0) + 4.0) * math.log(10.0) + LN8
        assert theorem3_bound(100, p, q) == pytest.approx(expect, abs=1e-9)
        assert theorem3_bound(100, p, q) == pytest.approx(66.1676077, abs=1e-6)

    def test_monotone_in_n(self):
        p, q = bsc(0.1), bsc(0.2)
        vals = [theorem3_bound(n, p, q) for n in (1, 2, 5, 10, 50, 100)]
        assert all(b > a for a, b in zip(vals, vals[1:]))

    def test_per_symbol_limit_is_e_star(self):
        p, q = bsc(0.1), z_channel(0.5)
        e_star = two_hop_exponent(p, q).e_star
        pm = pair_p_min(p, q)
        for n in (10, 1000, 100_000):
            gap = theorem3_bound(n, p, q) / n - e_star
            expect = ((math.sqrt(2.0 * n) + 4.0) * (-math.log(pm)) + LN8) / n
            assert gap == pytest.approx(expect, rel=1e-12)
        assert theorem3_bound(10**8, p, q) / 10**8 - e_star < 2e-3

    def test_rejects_bad_n(self):
        with pytest.raises(ValueError):
            theorem3_bound(0, bsc(0.1), bsc(0.2))

    def test_degenerate_pair_refused(self):
        with pytest.raises(DegeneratePair):
            theorem3_bound(5, noiseless(), bsc(0.2))
        with pytest.raises(DegeneratePair):
            theorem3_bound(5, bsc(0.2), noiseless())
