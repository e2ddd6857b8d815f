"""Dense real matrices.

Matrices are plain 2-D ``float64`` numpy arrays; this module only validates
them and moves them in and out of CSV.
"""
import io

import numpy as np

from ..errors import DimensionError, ValidationError

EPS = float(np.finfo(np.float64).eps)


def as_matrix(m, *, allow_empty=False, name="matrix"):
    """Return ``m`` as a finite 2-D float64 array (no copy when already one)."""
    a = np.asarray(m, dtype=np.float64)
    if a.ndim == 1:
        a = a.reshape(1, -1)
    if a.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {a.shape}")
    if not allow_empty and a.size == 0:
        raise DimensionError(f"{name} is empty (shape {a.shape})")
    if not np.all(np.isfinite(a)):
        raise ValidationError(f"{name} contains non-finite entries")
    return a


def frobenius_norm(m):
    a = as_matrix(m)
    return float(np.sqrt(np.sum(a * a)))


def column_gram(m):
    """``SᵀS`` for the columns of ``m``, symmetrised exactly."""
    a = as_matrix(m)
    g = a.T @ a
    return 0.5 * (g + g.T)


def gershgorin_discs(k):
    """Centres and radii of the Gershgorin discs of a square matrix."""
    k = as_matrix(k)
    if k.shape[0] != k.shape[1]:
        raise DimensionError(f"Gershgorin discs need a square matrix, got {k.shape}")
    centres = np.diag(k).copy()
    radii = np.abs(k).sum(axis=1) - np.abs(centres)
    return centres, radii


def in_gershgorin_union(k, eigenvalues, tol=1e-12):
    """Boolean per eigenvalue: does it fall inside at least one disc?"""
    centres, radii = gershgorin_discs(k)
    lam = np.asarray(eigenvalues, dtype=np.float64).reshape(-1, 1)
    slack = tol * max(1.0, float(np.abs(centres).max() + radii.max()))
    return np.any(np.abs(lam - centres[None, :]) <= radii[None, :] + slack, axis=1)


def write_csv(m, path_or_buf):
    """One row per line, 17 significant digits (round-trips float64 exactly)."""
    a = as_matrix(m, allow_empty=True)
    if hasattr(path_or_buf, "write"):
        np.savetxt(path_or_buf, a, delimiter=",", fmt="%.17g")
        return
    with open(path_or_buf, "w", newline="\n") as fh:
        np.savetxt(fh, a, delimiter=",", fmt="%.17g")


def read_csv(path_or_buf):
    if isinstance(path_or_buf, str) and "\n" in path_or_buf:
        path_or_buf = io.StringIO(path_or_buf)
    a = np.loadtxt(path_or_buf, delimiter=",", dtype=np.float64, ndmin=2)
    return as_matrix(a, allow_empty=True)
