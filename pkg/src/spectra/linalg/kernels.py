"""One-sided Jacobi sweeps.

Vectors live in the *rows* of ``at`` (the transposed working matrix) so the
inner loops walk contiguous memory.  Columns are visited in round-robin
order: every round is a perfect matching of the indices, so the pairs inside
a round are disjoint and may be processed in any order (or in parallel)
without changing a single bit of the result.
"""
import numpy as np

from .._accel import USE_NUMBA, njit

if USE_NUMBA:
    from numba import prange
else:
    prange = range


def round_robin_schedule(n):
    """Array of shape (rounds, n_pairs, 2) covering every pair exactly once.

    Odd ``n`` gets a phantom index ``-1`` that the kernels skip.
    """
    if n < 2:
        return np.zeros((0, 0, 2), dtype=np.int64)
    players = list(range(n)) + ([-1] if n % 2 else [])
    size = len(players)
    rounds = []
    for _ in range(size - 1):
        pairs = []
        for i in range(size // 2):
            p, q = players[i], players[size - 1 - i]
            if p == -1 or q == -1:
                pairs.append((-1, -1))
            else:
                pairs.append((min(p, q), max(p, q)))
        rounds.append(pairs)
        players = [players[0], players[-1]] + players[1:-1]
    return np.asarray(rounds, dtype=np.int64)


@njit(parallel=True)
def _jacobi_numba(at, vt, schedule, tol, floor2, max_sweeps):
    n_rounds = schedule.shape[0]
    n_pairs = schedule.shape[1]
    m = at.shape[1]
    nv = vt.shape[1]
    rotated = np.zeros(n_pairs, dtype=np.int64)
    for sweep in range(max_sweeps):
        total = 0
        for r in range(n_rounds):
            for k in prange(n_pairs):
                rotated[k] = 0
                p = schedule[r, k, 0]
                q = schedule[r, k, 1]
                if p < 0:
                    continue
                alpha = 0.0
                beta = 0.0
                gamma = 0.0
                for i in range(m):
                    x = at[p, i]
                    y = at[q, i]
                    alpha += x * x
                    beta += y * y
                    gamma += x * y
                if gamma == 0.0 or min(alpha, beta) <= floor2:
                    continue
                if abs(gamma) <= tol * np.sqrt(alpha) * np.sqrt(beta):
                    continue
                zeta = (beta - alpha) / (2.0 * gamma)
                t = 1.0 / (abs(zeta) + np.hypot(1.0, zeta))
                if zeta < 0.0:
                    t = -t
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = c * t
                for i in range(m):
                    x = at[p, i]
                    y = at[q, i]
                    at[p, i] = c * x - s * y
                    at[q, i] = s * x + c * y
                for i in range(nv):
                    x = vt[p, i]
                    y = vt[q, i]
                    vt[p, i] = c * x - s * y
                    vt[q, i] = s * x + c * y
                rotated[k] = 1
            for k in range(n_pairs):
                total += rotated[k]
        if total == 0:
            return sweep + 1, True
    return max_sweeps, False


def _jacobi_numpy(at, vt, schedule, tol, floor2, max_sweeps):
    for sweep in range(max_sweeps):
        total = 0
        for pairs in schedule:
            pairs = pairs[pairs[:, 0] >= 0]
            if pairs.size == 0:
                continue
            P, Q = pairs[:, 0], pairs[:, 1]
            ap, aq = at[P], at[Q]
            alpha = np.einsum("ij,ij->i", ap, ap)
            beta = np.einsum("ij,ij->i", aq, aq)
            gamma = np.einsum("ij,ij->i", ap, aq)
            act = (gamma != 0.0) & (np.minimum(alpha, beta) > floor2)
            act &= np.abs(gamma) > tol * np.sqrt(alpha) * np.sqrt(beta)
            if not act.any():
                continue
            P, Q = P[act], Q[act]
            alpha, beta, gamma = alpha[act], beta[act], gamma[act]
            zeta = (beta - alpha) / (2.0 * gamma)
            t = 1.0 / (np.abs(zeta) + np.hypot(1.0, zeta))
            t = np.where(zeta < 0.0, -t, t)
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = (c * t)[:, None]
            c = c[:, None]
            ap, aq = at[P], at[Q]
            at[P], at[Q] = c * ap - s * aq, s * ap + c * aq
            vp, vq = vt[P], vt[Q]
            vt[P], vt[Q] = c * vp - s * vq, s * vp + c * vq
            total += int(act.sum())
        if total == 0:
            return sweep + 1, True
    return max_sweeps, False


def jacobi_orthogonalize(at, vt, tol, max_sweeps, backend=None):
    """Rotate rows of ``at`` (and ``vt`` alongside) until mutually orthogonal.

    Rows below ``eps * ||at||_F`` are rounding noise and are never rotated;
    otherwise pairs of them can keep rotating forever.  Callers report such
    rows as exact zeros.

    Operates in place.  Returns ``(sweeps, converged)``.  ``backend`` forces
    ``"numba"`` or ``"numpy"``; default follows the ``SPECTRA_NUMBA`` flag.
    """
    schedule = round_robin_schedule(at.shape[0])
    floor2 = float((np.finfo(np.float64).eps * np.linalg.norm(at)) ** 2)
    if backend is None:
        backend = "numba" if USE_NUMBA else "numpy"
    if backend == "numba":
        if not USE_NUMBA:
            raise RuntimeError("numba backend requested but numba is disabled")
        sweeps, ok = _jacobi_numba(at, vt, schedule, float(tol), floor2, int(max_sweeps))
        return int(sweeps), bool(ok)
    return _jacobi_numpy(at, vt, schedule, float(tol), floor2, int(max_sweeps))
