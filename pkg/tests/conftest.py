"""Shared test helpers: a fixed-seed channel sampler and CLI flags."""

import numpy as np
import pytest

from tandembit import BinaryInputChannel, validate


def pytest_addoption(parser):
    parser.addoption(
        "--run-n4",
        action="store_true",
        default=False,
        help="run the optional n=4 brute-force certification (slow)",
    )


def sample_channel(
    rng: np.random.Generator, m: int | None = None, min_entry: float = 1e-3
) -> BinaryInputChannel:
    """Draw a random binary-input channel with all entries >= min_entry.

    The floor keeps p_min bounded away from zero so remainder terms and
    finite-difference checks stay well conditioned.
    """
    if m is None:
        m = int(rng.integers(2, 5))
    while True:
        rows = rng.dirichlet(np.ones(m), size=2)
        if rows.min() >= min_entry:
            return validate(rows.tolist(), label=f"random{m}")


def sample_pair(
    rng: np.random.Generator, m_p: int | None = None, m_q: int | None = None
) -> tuple[BinaryInputChannel, BinaryInputChannel]:
    return sample_channel(rng, m_p), sample_channel(rng, m_q)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)
