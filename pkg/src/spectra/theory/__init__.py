"""Executable checks of the softmax rank claims."""
from .bifurcation import (BifurcationPoint, bifurcation_sweep, default_temperatures, gap_floor_index,
                          gap_rank_coincide, rank1_matrix)
from .gap_bound import (BoundEntry, check_column_stochastic, gap_bound_check, gap_bound_sweep,
                        gap_upper_bound, random_stochastic, tightness_cases)
from .nc import NcResult, etf_gram_target, nc_rank_construction, simplex_etf
from .rank2 import LIMIT_FACTOR, Rank2Result, rank2_full_rank_search, rank2_gram
from .report import CLAIMS, run_verifier, sweep_csv
from .scaling import ScalingExperimentConfig, ScalingPoint, default_scales, low_rank_matrix, scaling_experiment
