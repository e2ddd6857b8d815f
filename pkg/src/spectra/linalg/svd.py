"""Singular value decomposition by one-sided (Hestenes) Jacobi."""
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConvergenceError, DimensionError
from .kernels import jacobi_orthogonalize
from .matrix import EPS, as_matrix

MAX_SWEEPS = 60
# Aspect ratio above which the tall side is first compressed through the Gram matrix.
GRAM_ASPECT = 8


@dataclass(frozen=True)
class SvdResult:
    """Thin SVD ``m = u @ diag(s) @ vt`` with ``s`` non-increasing.

    ``gram_guarded`` marks singular values whose Gram-stage estimate fell
    below ``sqrt(eps) * s[0]``; those are recomputed by the Jacobi refinement
    pass, never taken from the squared spectrum.
    """

    u: np.ndarray
    s: np.ndarray
    vt: np.ndarray
    sweeps: int = 0
    gram_guarded: np.ndarray = field(default=None, repr=False)

    def reconstruct(self):
        return (self.u * self.s) @ self.vt


def _pair_tol(m_rows):
    return max(m_rows, 1) * EPS


def _complete_orthonormal(q, missing):
    """Fill columns ``missing`` of ``q`` with unit vectors orthogonal to the rest."""
    m = q.shape[0]
    have = [j for j in range(q.shape[1]) if j not in set(missing)]
    basis = q[:, have]
    cand = 0
    for j in missing:
        while True:
            if cand >= m:
                raise ConvergenceError("cannot complete orthonormal basis")
            e = np.zeros(m)
            e[cand] = 1.0
            cand += 1
            for _ in range(2):
                e -= basis @ (basis.T @ e)
            nrm = np.linalg.norm(e)
            if nrm > 0.5:
                e /= nrm
                break
        q[:, j] = e
        basis = np.column_stack([basis, e])
    return q


def _tall_svd(a, compute_u, backend):
    """SVD of ``a`` with rows >= cols. Returns (u, s, v, sweeps, guarded)."""
    m, n = a.shape
    guarded = np.zeros(n, dtype=bool)
    if m > GRAM_ASPECT * n and n > 1:
        g = a.T @ a
        g = 0.5 * (g + g.T)
        gt = np.array(g.T, order="C")
        vt0 = np.eye(n)
        sweeps0, ok = jacobi_orthogonalize(gt, vt0, _pair_tol(n), MAX_SWEEPS, backend)
        if not ok:
            raise ConvergenceError(f"Gram-stage Jacobi did not converge in {MAX_SWEEPS} sweeps")
        lam = np.sqrt(np.einsum("ij,ij->i", gt, gt))  # |eigenvalues| of the PSD Gram
        sig_est = np.sqrt(lam)
        if sig_est.max() > 0:
            guarded = sig_est < np.sqrt(EPS) * sig_est.max()
        at = np.array((a @ vt0.T).T, order="C")
        vt = vt0.copy()
    else:
        sweeps0 = 0
        at = np.array(a.T, order="C")  # kernels rotate in place; never alias the input
        vt = np.eye(n)
    sweeps, ok = jacobi_orthogonalize(at, vt, _pair_tol(m), MAX_SWEEPS, backend)
    if not ok:
        raise ConvergenceError(f"one-sided Jacobi did not converge in {MAX_SWEEPS} sweeps")
    s = np.sqrt(np.einsum("ij,ij->i", at, at))
    # below the kernel's noise floor a column was never orthogonalised
    s[s <= EPS * np.linalg.norm(at)] = 0.0
    order = np.argsort(-s, kind="stable")
    s = s[order]
    at = at[order]
    v = vt[order].T
    guarded = guarded[order]
    u = None
    if compute_u:
        u = np.empty((m, n))
        zero = []
        for j in range(n):
            if s[j] > 0.0:
                u[:, j] = at[j] / s[j]
            else:
                zero.append(j)
        if zero:
            u = _complete_orthonormal(u, zero)
    return u, s, v, sweeps0 + sweeps, guarded


def _fix_signs(u, vt):
    idx = np.argmax(np.abs(u), axis=0)
    signs = np.sign(u[idx, np.arange(u.shape[1])])
    signs[signs == 0] = 1.0
    return u * signs, vt * signs[:, None]


def svd(m, *, backend=None):
    """Thin SVD of a finite real matrix.

    Left/right pairs are sign-normalised so the largest-magnitude entry of each
    left singular vector is positive.  Equal singular values keep the order of
    the Jacobi columns they came from.
    """
    a = as_matrix(m)
    rows, cols = a.shape
    if rows >= cols:
        u, s, v, sweeps, guarded = _tall_svd(a, True, backend)
        vt = v.T
    else:
        v2, s, u2, sweeps, guarded = _tall_svd(a.T, True, backend)
        u, vt = u2, v2.T
    u, vt = _fix_signs(u, vt)
    return SvdResult(u=u, s=s, vt=vt, sweeps=sweeps, gram_guarded=guarded)


def singular_values(m, *, backend=None):
    a = as_matrix(m)
    if a.shape[0] < a.shape[1]:
        a = a.T
    return _tall_svd(a, False, backend)[1]


def top_k_subspaces(m, k):
    """First ``k`` left and right singular vectors, both as columns."""
    a = as_matrix(m)
    kmax = min(a.shape)
    if not 1 <= k <= kmax:
        raise DimensionError(f"k={k} outside [1, {kmax}] for shape {a.shape}")
    res = svd(a)
    return res.u[:, :k].copy(), res.vt[:k].T.copy()
