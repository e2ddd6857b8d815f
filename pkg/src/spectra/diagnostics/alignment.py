"""Weight/representation singular-vector alignment.

For layer ``i`` the right singular vectors of ``W^i`` and the left singular
vectors of its input ``A^{i-1}`` live in the same space; perfect alignment
(``V_Wᵀ U_A = I``) lets ``‖W A‖`` reach ``‖Σ_W Σ_A‖``.
"""
from dataclasses import dataclass

import numpy as np

from ..errors import DimensionError
from ..linalg import svd

DEFAULT_K = 15


@dataclass(frozen=True)
class LayerAlignment:
    epoch: int
    layer: int  # 1-based
    k: int
    grid: np.ndarray  # |<v_a(W), u_b(A)>|, shape (k, k)

    @property
    def max_cosine(self):
        return float(self.grid.max())


@dataclass(frozen=True)
class AlignmentReport:
    epochs: list
    layers: list  # LayerAlignment, epoch-major

    def network_average(self, epoch):
        vals = [la.max_cosine for la in self.layers if la.epoch == epoch]
        return float(np.mean(vals))

    def curve(self):
        return np.array([self.network_average(e) for e in self.epochs])


def alignment_grid(w, a, k):
    """Absolute cosines between top-k right vectors of ``w`` and top-k left vectors of ``a``."""
    if w.shape[1] != a.shape[0]:
        raise DimensionError(f"W has {w.shape[1]} columns but A has {a.shape[0]} rows")
    k = min(k, min(w.shape), min(a.shape))
    vw = svd(w).vt[:k]
    ua = svd(a).u[:, :k]
    return np.abs(vw @ ua)


def alignment_report(trace, k=DEFAULT_K, epochs=None):
    """Alignment grids for every layer at the recorded (or selected) epochs.

    ``k`` may not exceed the narrowest representation width; the classifier
    layer, whose weight has only ``c`` right singular vectors, uses
    ``min(k, c)``.
    """
    widths = trace.spec.layer_widths[:-1]
    if not 1 <= k <= min(widths):
        raise DimensionError(f"k={k} must lie in [1, {min(widths)}] (narrowest representation)")
    snaps = trace.snapshots if epochs is None else [trace.at_epoch(e) for e in epochs]
    layers = []
    for snap in snaps:
        for i, w in enumerate(snap.weights):
            grid = alignment_grid(w, snap.activations[i], k)
            layers.append(LayerAlignment(snap.epoch, i + 1, grid.shape[0], grid))
    return AlignmentReport([s.epoch for s in snaps], layers)
