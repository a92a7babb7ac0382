"""Python bindings for the QUD parsing and analysis toolkit."""

from ._core import (
    __version__,
    attachment_score,
    encode_anchor_query,
    encode_generation_prompt,
    gap_report,
    krippendorff_alpha,
    mask_entities,
    masi_distance,
    parse_mock,
    rerank_percentile,
    rst_to_dep,
    synth_negatives,
    to_dep_tree,
    tree_stats,
    validate_tree,
)

__all__ = [
    "__version__",
    "attachment_score",
    "encode_anchor_query",
    "encode_generation_prompt",
    "gap_report",
    "krippendorff_alpha",
    "mask_entities",
    "masi_distance",
    "parse_mock",
    "rerank_percentile",
    "rst_to_dep",
    "synth_negatives",
    "to_dep_tree",
    "tree_stats",
    "validate_tree",
]
