from .alignment import DEFAULT_K, AlignmentReport, LayerAlignment, alignment_grid, alignment_report
from .curves import logits_norm_curve, rank_curves
from .gradrank import GradRankCell, gradient_rank_check, shared_rank_pair
from .metrics import (
    SCHEMA_VERSION,
    MetricsReport,
    effective_depth,
    layer_probes,
    metrics_report,
    ood_generalization_loss,
    orthodev,
    solutions_rank,
)
from .probe import ProbeConfig, ProbeResult, fit_linear_probe, train_probe
