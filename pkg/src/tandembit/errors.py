"""Semantic exception hierarchy.

Public functions never raise bare ValueError for contract violations; each
failure mode has a named class so callers (and the CLI exit-code mapping) can
dispatch on meaning rather than on message strings.
"""

from __future__ import annotations

__all__ = [
    "TandembitError",
    "NegativeEntry",
    "RowSumOutOfTolerance",
    "TooFewOutputs",
    "AlphabetMismatch",
    "LengthMismatch",
    "DisjointSupport",
    "EndpointDerivative",
    "AbsoluteContinuityViolation",
    "BothDegenerate",
    "DegeneratePair",
    "CountOverflow",
    "CapExceeded",
    "DegenerateStrategy",
    "ZeroErrorCount",
    "NotEnoughRuns",
]


class TandembitError(Exception):
    """Base class for every error raised by this package."""


class NegativeEntry(TandembitError, ValueError):
    """A probability entry is negative."""


class RowSumOutOfTolerance(TandembitError, ValueError):
    """A channel row does not sum to 1 within the ingest tolerance."""


class TooFewOutputs(TandembitError, ValueError):
    """The output alphabet has fewer than two symbols."""


class AlphabetMismatch(TandembitError, ValueError):
    """Two distributions that must share an alphabet have different lengths."""


class LengthMismatch(TandembitError, ValueError):
    """Two codewords that must have equal length do not."""


class DisjointSupport(TandembitError):
    """The two distributions share no output symbol.

    Signals the degenerate reduction: one channel use already separates the
    hypotheses perfectly. ``position`` is set when the failure occurred at a
    specific codeword position.
    """

    def __init__(self, message: str = "supports are disjoint", position: int | None = None):
        super().__init__(message if position is None else f"{message} (position {position})")
        self.position = position


class EndpointDerivative(TandembitError, ValueError):
    """Derivatives were requested at s in {0, 1}; they exist only on (0, 1)."""


class AbsoluteContinuityViolation(TandembitError, ValueError):
    """KL divergence requested with support(p) not contained in support(q)."""


class BothDegenerate(TandembitError):
    """Both channels have disjoint row supports; the exponent is unbounded."""


class DegeneratePair(TandembitError):
    """A finite-blocklength bound was requested for a degenerate channel pair."""


class CountOverflow(TandembitError, ValueError):
    """Position counts exceed the blocklength."""


class CapExceeded(TandembitError):
    """A resource cap would be exceeded; pass the override flag to proceed."""

    def __init__(self, message: str, size: int | None = None):
        super().__init__(message)
        self.size = size


class DegenerateStrategy(TandembitError, ValueError):
    """The relay strategy cannot convey information (e.g. constant forward bit)."""


class ZeroErrorCount(TandembitError):
    """An error-rate estimate is zero; no exponent can be fitted from it."""


class NotEnoughRuns(TandembitError, ValueError):
    """Fewer than three distinct blocklengths remain after filtering."""
