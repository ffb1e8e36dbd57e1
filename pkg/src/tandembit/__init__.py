"""Relaying one bit across a tandem of binary-input channels.

The package computes the optimal two-hop error exponent, evaluates a
finite-blocklength converse bound, and checks both against an exact
brute-force protocol search at tiny blocklengths and a Monte Carlo protocol
simulator at moderate ones.
"""

__version__ = "0.1.0"

from ._backend import available_backends, default_backend_name, get_kernels
from .bounds import (
    DisjunctionBound,
    corollary1_bound,
    dmc_pair_bounds,
    pairwise_test_bounds,
    position_count_bounds,
    theorem3_bound,
)
from .bruteforce import (
    CertificationReport,
    ChainingReport,
    ExactErrorTable,
    ProtocolTable,
    certify_theorem3,
    check_prefix_chaining,
    exact_error,
    exact_error_rational,
    optimal_protocol,
    optimal_protocol_rational,
    prefix_offsets,
    relay_map_size,
)
from .channel import (
    BinaryInputChannel,
    SupportKind,
    SupportRelation,
    as_bits,
    bec,
    bsc,
    noiseless,
    p_min,
    pair_p_min,
    support_relation,
    swap_inputs,
    to_jsonable,
    validate,
    z_channel,
)
from .chernoff import (
    ChernoffCurvePoint,
    TiltedDistribution,
    d_c,
    d_c_derivatives,
    d_c_seq,
    kl,
    tilt,
    tilt_seq,
)
from .errors import (
    AbsoluteContinuityViolation,
    AlphabetMismatch,
    BothDegenerate,
    CapExceeded,
    CountOverflow,
    DegeneratePair,
    DegenerateStrategy,
    DisjointSupport,
    EndpointDerivative,
    LengthMismatch,
    NegativeEntry,
    NotEnoughRuns,
    RowSumOutOfTolerance,
    TandembitError,
    TooFewOutputs,
    ZeroErrorCount,
)
from .exponent import (
    UNBOUNDED,
    ExponentReport,
    OneHopResult,
    Regime,
    TypeClass,
    TypeKind,
    classify_type,
    e_s,
    one_hop_exponent,
    report_jsonable,
    trivial_converse,
    two_hop_exponent,
)
from .simulator import (
    RelayStrategy,
    SimResult,
    StrategyKind,
    exponent_fit,
    simulate,
    wilson_interval,
)

__all__ = [
    "__version__",
    "available_backends",
    "default_backend_name",
    "get_kernels",
    "DisjunctionBound",
    "corollary1_bound",
    "dmc_pair_bounds",
    "pairwise_test_bounds",
    "position_count_bounds",
    "theorem3_bound",
    "CertificationReport",
    "ChainingReport",
    "ExactErrorTable",
    "ProtocolTable",
    "certify_theorem3",
    "check_prefix_chaining",
    "exact_error",
    "exact_error_rational",
    "optimal_protocol",
    "optimal_protocol_rational",
    "prefix_offsets",
    "relay_map_size",
    "BinaryInputChannel",
    "SupportKind",
    "SupportRelation",
    "as_bits",
    "bec",
    "bsc",
    "noiseless",
    "p_min",
    "pair_p_min",
    "support_relation",
    "swap_inputs",
    "to_jsonable",
    "validate",
    "z_channel",
    "ChernoffCurvePoint",
    "TiltedDistribution",
    "d_c",
    "d_c_derivatives",
    "d_c_seq",
    "kl",
    "tilt",
    "tilt_seq",
    "AbsoluteContinuityViolation",
    "AlphabetMismatch",
    "BothDegenerate",
    "CapExceeded",
    "CountOverflow",
    "DegeneratePair",
    "DegenerateStrategy",
    "DisjointSupport",
    "EndpointDerivative",
    "LengthMismatch",
    "NegativeEntry",
    "NotEnoughRuns",
    "RowSumOutOfTolerance",
    "TandembitError",
    "TooFewOutputs",
    "ZeroErrorCount",
    "UNBOUNDED",
    "ExponentReport",
    "OneHopResult",
    "Regime",
    "TypeClass",
    "TypeKind",
    "classify_type",
    "e_s",
    "one_hop_exponent",
    "report_jsonable",
    "trivial_converse",
    "two_hop_exponent",
    "RelayStrategy",
    "SimResult",
    "StrategyKind",
    "exponent_fit",
    "simulate",
    "wilson_interval",
]
