"""Exact arithmetic for one-dimensional cut-and-project point sets.

The rings are Z[beta] for the quadratic Pisot units beta^2 = m*beta +- 1.
Everything works on integer pairs (a, b) for a + b*beta; no floats enter any
decision.  The package covers greedy digit expansions and their admissibility
rule, model-set enumeration through the Galois conjugation, closures under
two-point convex combinations, checkable generation witnesses with op-index
reduction and binomial flattening, divisibility certificates, and the
classification of parameters that force model sets.
"""

from .betanum import (
    DEFAULT_MAX_DEPTH,
    DigitString,
    admissible_digits,
    evaluate,
    expand_greedy,
    has_finite_expansion,
    is_admissible,
    iter_admissible,
    representation_of_one,
)
from .convexity import (
    Divisibility,
    Leaf,
    LEAF_ONE,
    LEAF_ZERO,
    Node,
    ParamSet,
    ScanReport,
    SweepRow,
    Witness,
    apply_op,
    characterizing_params,
    classify_forcing,
    closure_bfs,
    divisibility_filter,
    find_rewrite_template,
    flatten_to_binomial,
    forcing_sweep,
    index_cap,
    reduce_witness,
    same_tree,
    scan_witness_completeness,
    verify_witness,
    witness_for,
)
from .errors import (
    BudgetExceededError,
    ChainBrokenError,
    DepthTooSmallError,
    DigitRangeError,
    MissingSeedsError,
    MixedParameterError,
    NoRewriteError,
    NonPositiveError,
    NotFiniteError,
    NotInRingError,
    OutOfRangeError,
    OutOfWindowError,
    ParameterNotAdmissibleError,
    ParseError,
    QcxError,
    RingMismatchError,
    TooFewPointsError,
)
from .modelset import (
    ConvexityReport,
    ConvexityViolation,
    Interval,
    PointSet,
    WindowReconstruction,
    check_convexity,
    enumerate_model_set,
    gap_histogram,
    reconstruct_window,
)
from .quadring import QuadInt, QuadRat, RingSpec, ring_make

__version__ = "0.1.0"

__all__ = [
    "BudgetExceededError",
    "ChainBrokenError",
    "ConvexityReport",
    "ConvexityViolation",
    "DEFAULT_MAX_DEPTH",
    "DepthTooSmallError",
    "DigitRangeError",
    "DigitString",
    "Divisibility",
    "Interval",
    "LEAF_ONE",
    "LEAF_ZERO",
    "Leaf",
    "MissingSeedsError",
    "MixedParameterError",
    "NoRewriteError",
    "NonPositiveError",
    "NotFiniteError",
    "NotInRingError",
    "Node",
    "OutOfRangeError",
    "OutOfWindowError",
    "ParamSet",
    "ParameterNotAdmissibleError",
    "ParseError",
    "PointSet",
    "QcxError",
    "QuadInt",
    "QuadRat",
    "RingMismatchError",
    "RingSpec",
    "ScanReport",
    "SweepRow",
    "TooFewPointsError",
    "WindowReconstruction",
    "Witness",
    "admissible_digits",
    "apply_op",
    "characterizing_params",
    "check_convexity",
    "classify_forcing",
    "closure_bfs",
    "divisibility_filter",
    "enumerate_model_set",
    "evaluate",
    "expand_greedy",
    "find_rewrite_template",
    "flatten_to_binomial",
    "forcing_sweep",
    "gap_histogram",
    "has_finite_expansion",
    "index_cap",
    "is_admissible",
    "iter_admissible",
    "reconstruct_window",
    "reduce_witness",
    "representation_of_one",
    "ring_make",
    "same_tree",
    "scan_witness_completeness",
    "verify_witness",
    "witness_for",
    "__version__",
]
