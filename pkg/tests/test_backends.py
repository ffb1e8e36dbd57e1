"""Compiled and pure-Python kernels must agree bit for bit."""

import numpy as np
import pytest

from tandembit import (
    RelayStrategy,
    available_backends,
    bec,
    bsc,
    default_backend_name,
    get_kernels,
    optimal_protocol,
    simulate,
    z_channel,
)
from tandembit._philox import philox4, uniforms, uniforms_for_trials

HAVE_COMPILED = "compiled" in available_backends()

needs_compiled = pytest.mark.skipif(
    not HAVE_COMPILED, reason="compiled kernels not built"
)


class TestPhilox:
    def test_matches_numpy_raw_stream(self):
        # Per-trial stream keyed (seed, trial); block counters start at 1,
        # which lines up with numpy's Philox(counter=0) raw output.
        for seed, trial in ((0, 0), (1, 7), (2**64 - 1, 3), (12345, 2**32)):
            rig = np.random.Philox(counter=0, key=np.array([seed, trial], dtype=np.uint64))
            raw = [int(v) for v in rig.random_raw(12)]
            key = (seed & 0xFFFFFFFFFFFFFFFF, trial & 0xFFFFFFFFFFFFFFFF)
            for block in (1, 2, 3):
                got = philox4((block, 0, 0, 0), key)
                assert tuple(raw[4 * (block - 1) : 4 * block]) == got

    def test_uniform_mapping(self):
        u = uniforms(42, 3, 8)
        rig = np.random.Philox(counter=0, key=np.array([42, 3], dtype=np.uint64))
        expect = [(int(w) >> 11) * 2.0**-53 for w in rig.random_raw(8)]
        assert u == expect

    def test_vectorized_matches_scalar(self):
        mat = uniforms_for_trials(7, np.arange(5), 13)
        assert mat.shape == (5, 13)
        for t in range(5):
            assert list(mat[t]) == uniforms(7, t, 13)

    def test_edge_keys(self):
        mat = uniforms_for_trials(2**64 - 1, np.arange(2), 5)
        for t in range(2):
            assert list(mat[t]) == uniforms(2**64 - 1, t, 5)


@needs_compiled
class TestCrossBackend:
    CASES = [
        (bsc(0.1), bsc(0.2), 8, RelayStrategy.best_guess(), None),
        (bsc(0.1), bsc(0.2), 8, RelayStrategy.forward_quantized(), None),
        (bsc(0.3), z_channel(0.5), 6, RelayStrategy.best_guess(), None),
        (z_channel(0.5), bsc(0.2), 6, RelayStrategy.best_guess(), None),
        (bec(0.3), bsc(0.2), 5, RelayStrategy.best_guess(), None),
        (bec(0.3), bec(0.4), 5, RelayStrategy.forward_quantized((0, 1, 0)), None),
        (bsc(0.1), bec(0.25), 7, RelayStrategy.best_guess(), ("0110100", "1001011")),
    ]

    @pytest.mark.parametrize("case", range(len(CASES)))
    def test_simulate_bitwise_equal(self, case):
        p, q, n, strat, enc = self.CASES[case]
        kw = dict(trials=30_000, seed=1000 + case, encoder=enc)
        a = simulate(p, q, n, strat, backend="compiled", **kw)
        b = simulate(p, q, n, strat, backend="python", **kw)
        assert (a.err0, a.err1) == (b.err0, b.err1)
        assert (a.pe0_hat, a.pe1_hat) == (b.pe0_hat, b.pe1_hat)

    def test_search_identical_results(self):
        for p, q in ((bsc(0.1), bsc(0.2)), (bsc(0.2), z_channel(0.5))):
            for n in (1, 2, 3):
                pc, tc = optimal_protocol(p, q, n, backend="compiled")
                pp, tp = optimal_protocol(p, q, n, backend="python")
                assert pc == pp
                assert (tc.pe0, tc.pe1) == (tp.pe0, tp.pe1)


class TestSelection:
    def test_available_contains_python(self):
        assert "python" in available_backends()

    def test_explicit_name_resolves(self):
        k = get_kernels("python")
        assert k.BACKEND_NAME == "python"

    def test_unknown_name_rejected(self):
        with pytest.raises(ValueError):
            get_kernels("fortran")

    def test_env_override(self, monkeypatch):
        monkeypatch.setenv("TANDEMBIT_BACKEND", "python")
        assert default_backend_name() == "python"
        assert get_kernels().BACKEND_NAME == "python"

    @needs_compiled
    def test_default_prefers_compiled(self, monkeypatch):
        monkeypatch.delenv("TANDEMBIT_BACKEND", raising=False)
        assert default_backend_name() == "compiled"
