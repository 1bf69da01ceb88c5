"""Model-size bounds, distances and cover codes for learned database operations."""

from ._core import (
    CoverCode,
    LdbError,
    bound_bits,
    card1d_l1,
    card1d_linf,
    cardinality,
    certify,
    cover_decode,
    cover_encode,
    covering_count_log2,
    eps_star,
    mc_l1,
    quantize,
    range_sum,
    rank,
    rank_l1,
    rank_linf,
    sample_uniform,
    sum1d_l1,
)

__all__ = [
    "CoverCode",
    "LdbError",
    "bound_bits",
    "card1d_l1",
    "card1d_linf",
    "cardinality",
    "certify",
    "cover_decode",
    "cover_encode",
    "covering_count_log2",
    "eps_star",
    "mc_l1",
    "quantize",
    "range_sum",
    "rank",
    "rank_l1",
    "rank_linf",
    "sample_uniform",
    "sum1d_l1",
]
