"""Exact and approximate structural pattern matching and local alignment of RNA structures."""

from .align_dp import MODES, align, best_end, phase1_pair_table, window_dp
from .exact_match import encode_labels, exact_occurrences, kmp_find_all
from .rna_model import (
    RnaStructure,
    StructureError,
    format_rna,
    from_dotbracket,
    make_structure,
    parse_rna,
    partner_map,
    read_structure,
    validate,
)
from .scoring import (
    DEFAULT_SCHEME,
    AlignmentResult,
    ScoringScheme,
    derive_element_scores,
    load_scheme,
    sim_score,
    validate_alignment,
)

__version__ = "0.1.0"

__all__ = [
    "MODES", "align", "best_end", "phase1_pair_table", "window_dp",
    "encode_labels", "exact_occurrences", "kmp_find_all",
    "RnaStructure", "StructureError", "format_rna", "from_dotbracket", "make_structure",
    "parse_rna", "partner_map", "read_structure", "validate",
    "DEFAULT_SCHEME", "AlignmentResult", "ScoringScheme", "derive_element_scores",
    "load_scheme", "sim_score", "validate_alignment",
]
