"""Crosstalk-aware bus toolkit: an analytical delay model for coupled
on-chip buses, transition-pattern classification, constrained codebook
construction, fixed-length ranking codecs, and delay/throughput reports.
"""
from .bus_model import (DEFAULT_LAMBDA, DEFAULT_TAU0_PS, BusParams,
                        TransitionPattern, TransitionSymbol, pattern_delay)
from .classification import (ClassificationTable, ClassTables, DelayClass,
                             Taxonomy, classify_legacy, classify_middle,
                             classify_side, sweep_lambda, verify_golden,
                             window_class)
from .codebook import (ClassicCodeFamily, Codebook, Codeword,
                       ConstraintConfig, build_codebook, classic_codebook,
                       codebook_size, constraint_matrix, expand_codebook,
                       iolc_size, max_cliques, prune_iolc, read_codebook,
                       seed_codebooks, transition_legal, verify_recursion,
                       verify_theorems, wire_windows, write_codebook)
from .codec import RankTable, build_rank_table, decode, encode
from .errors import (CacforgeError, ClassificationInvalidError, ConfigError,
                     MembershipError, PatternError, UnsupportedConstraintError,
                     WidthError)
from .evaluation import (ComparisonReport, DelayReport, Metrics,
                         codebook_worst_delay, constraint_delay_ceiling,
                         metrics, pair_wire_delays, report, report_json,
                         summary_csv)

__version__ = "0.1.0"

__all__ = [
    "BusParams", "CacforgeError", "ClassicCodeFamily",
    "ClassificationInvalidError", "ClassificationTable", "ClassTables",
    "Codebook", "Codeword", "ComparisonReport", "ConfigError",
    "ConstraintConfig", "DEFAULT_LAMBDA", "DEFAULT_TAU0_PS", "DelayClass",
    "DelayReport", "MembershipError", "Metrics", "PatternError", "RankTable",
    "Taxonomy", "TransitionPattern", "TransitionSymbol",
    "UnsupportedConstraintError", "WidthError", "build_codebook",
    "build_rank_table", "classic_codebook", "classify_legacy",
    "classify_middle", "classify_side", "codebook_size",
    "codebook_worst_delay", "constraint_delay_ceiling", "constraint_matrix",
    "decode", "encode", "expand_codebook", "iolc_size", "max_cliques",
    "metrics", "pair_wire_delays", "pattern_delay", "prune_iolc",
    "read_codebook", "report", "report_json", "seed_codebooks",
    "summary_csv", "sweep_lambda", "transition_legal", "verify_golden",
    "verify_recursion", "verify_theorems", "window_class", "wire_windows",
    "write_codebook",
]
