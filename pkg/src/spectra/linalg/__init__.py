from .matrix import (
    EPS,
    as_matrix,
    column_gram,
    frobenius_norm,
    gershgorin_discs,
    in_gershgorin_union,
    read_csv,
    write_csv,
)
from .rank import ABSOLUTE, DEFAULT_POLICY, RELATIVE, RankPolicy, numerical_rank, rank_from_singular_values
from .svd import SvdResult, singular_values, svd, top_k_subspaces

__all__ = [
    "EPS", "as_matrix", "column_gram", "frobenius_norm", "gershgorin_discs",
    "in_gershgorin_union", "read_csv", "write_csv", "ABSOLUTE", "DEFAULT_POLICY",
    "RELATIVE", "RankPolicy", "numerical_rank", "rank_from_singular_values",
    "SvdResult", "singular_values", "svd", "top_k_subspaces",
]
