"""Schur multipliers with trace-form symbols and their exact finite-window
dilations: build the symbol from unitaries in a tracial algebra, dilate it
to a single trace-preserving automorphism of a bigger matrix algebra, and
search for such a symbol when only the table is known."""

from .algebra import AlgebraElement, MembershipError, TracialAlgebra, cond_expectation, embed, trace, weighted_trace
from .dilation import (
    DilationSystem,
    beyond_window_residual,
    big_space_pairing,
    build,
    embed_J,
    expectation,
    pairing_closed_form,
    slice_identity_check,
    step,
    verify_dilation,
)
from .multiplier import SchurMultiplier, cp_check, norm_bounds, pairing, rank1, schur_apply
from .representation import (
    TraceRepresentation,
    build_multiplier,
    gauge_normalize,
    random_representation,
    validate,
)
from .search import SearchResult, TargetRejected, brute_oracle, planted_instance, search

__all__ = [
    "AlgebraElement",
    "DilationSystem",
    "MembershipError",
    "SchurMultiplier",
    "SearchResult",
    "TargetRejected",
    "TraceRepresentation",
    "TracialAlgebra",
    "beyond_window_residual",
    "big_space_pairing",
    "brute_oracle",
    "build",
    "build_multiplier",
    "cond_expectation",
    "cp_check",
    "embed",
    "embed_J",
    "expectation",
    "gauge_normalize",
    "norm_bounds",
    "pairing",
    "pairing_closed_form",
    "planted_instance",
    "random_representation",
    "rank1",
    "schur_apply",
    "search",
    "slice_identity_check",
    "step",
    "trace",
    "validate",
    "verify_dilation",
    "weighted_trace",
]

__version__ = "0.1.0"
