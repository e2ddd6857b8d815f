from dataclasses import dataclass

from ..linalg import singular_values

# Shared exact-rank surrogate: both sides cut at this fraction of the larger top singular value.
SHARED_RELATIVE_CUTOFF = 1e-10


@dataclass(frozen=True)
class GradRankCell:
    epoch: int
    layer: int
    grad_rank: int
    act_rank: int
    cutoff: float

    @property
    def bound_ok(self):
        return self.grad_rank <= self.act_rank


def shared_rank_pair(g, a, rel=SHARED_RELATIVE_CUTOFF):
    sg, sa = singular_values(g), singular_values(a)
    top = max(sg[0], sa[0])
    cut = rel * top
    return int((sg > cut).sum()), int((sa > cut).sum()), cut


def gradient_rank_check(trace, rel=SHARED_RELATIVE_CUTOFF):
    """rank(dL/dW^i) vs rank(A^{i-1}) per layer and recorded epoch.

    Both ranks use the same absolute cutoff ``rel * max(σ1(G), σ1(A))`` so the
    bound ``rank(G^i) <= rank(A^{i-1})`` stays checkable in floating point.
    """
    cells = []
    for snap in trace.snapshots:
        for i, g in enumerate(snap.gradients):
            gr, ar, cut = shared_rank_pair(g, snap.activations[i], rel)
            cells.append(GradRankCell(snap.epoch, i + 1, gr, ar, cut))
    return cells
