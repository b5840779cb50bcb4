"""Hadamard rank-2 expressibility analysis of 4x4 binary matrices.

Which full-rank 4x4 matrices over GF(2) can be written as the entrywise
product of two rank-2 matrices?  This package answers the question
exhaustively over GF(2), re-verifies the negatives over the integers by
exact sign enumeration, probes the real-valued case with seeded
multi-restart optimization, and derives the density and zero-pattern
statistics of the two classes.
"""

from .gf2 import (
    ALL_ONES,
    IDENTITY,
    BitMatrix4,
    count_ones,
    entry,
    from_hex,
    from_rows,
    hadamard,
    rank_gf2,
    to_hex,
    to_rows,
)
from .realopt import FactorPair, OptConfig, OptReport, evidence_batch, optimize_single
from .search import (
    ExpressibilityMap,
    NotFullRank,
    RankTable,
    SearchReport,
    build_rank_table,
    counterexamples,
    is_expressible,
    run_search,
    run_search_recording,
)
from .stats import ClassStats, DensityTable, density_table, threshold_accuracy, zero_stats
from .zverify import ZVerdict, rank_z, signed_candidates, verify_all_z, verify_counterexample_z

__version__ = "0.1.0"

__all__ = [
    "ALL_ONES",
    "IDENTITY",
    "BitMatrix4",
    "ClassStats",
    "DensityTable",
    "ExpressibilityMap",
    "FactorPair",
    "NotFullRank",
    "OptConfig",
    "OptReport",
    "RankTable",
    "SearchReport",
    "ZVerdict",
    "build_rank_table",
    "count_ones",
    "counterexamples",
    "density_table",
    "entry",
    "evidence_batch",
    "from_hex",
    "from_rows",
    "hadamard",
    "is_expressible",
    "optimize_single",
    "rank_gf2",
    "rank_z",
    "run_search",
    "run_search_recording",
    "signed_candidates",
    "threshold_accuracy",
    "to_hex",
    "to_rows",
    "verify_all_z",
    "verify_counterexample_z",
    "zero_stats",
]
