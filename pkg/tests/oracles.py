"""Reference implementations that share no code with the package."""
import numpy as np


def _pairs(n):
    # circle-method rounds, same coverage as any tournament schedule
    idx = list(range(n)) + ([None] if n % 2 else [])
    size = len(idx)
    for _ in range(size - 1):
        ps = [(idx[i], idx[size - 1 - i]) for i in range(size // 2)]
        yield [(min(p, q), max(p, q)) for p, q in ps if p is not None and q is not None]
        idx = [idx[0], idx[-1]] + idx[1:-1]


def symmetric_eigvals_ld(g, tol=None, max_sweeps=100):
    """Two-sided cyclic Jacobi in extended precision on a symmetric matrix."""
    a = np.array(g, dtype=np.longdouble)
    n = a.shape[0]
    eps = np.finfo(np.longdouble).eps
    tol = eps if tol is None else tol
    for _ in range(max_sweeps):
        od = a - np.diag(np.diag(a))
        if np.sqrt((od * od).sum()) <= tol * np.sqrt((a * a).sum()):
            break
        for rnd in _pairs(n):
            if not rnd:
                continue
            P = np.array([p for p, _ in rnd])
            Q = np.array([q for _, q in rnd])
            apq = a[P, Q]
            live = apq != 0
            if not live.any():
                continue
            P, Q, apq = P[live], Q[live], apq[live]
            theta = (a[Q, Q] - a[P, P]) / (2 * apq)
            big = np.abs(theta) > 1e100
            safe = np.where(big, 1, theta)
            t = np.sign(safe) / (np.abs(safe) + np.sqrt(safe * safe + 1))
            t = np.where(big, 1 / (2 * np.where(big, theta, 1)), t)
            t[theta == 0] = 1
            c = 1 / np.sqrt(t * t + 1)
            s = t * c
            rp, rq = a[P, :].copy(), a[Q, :].copy()
            a[P, :] = c[:, None] * rp - s[:, None] * rq
            a[Q, :] = s[:, None] * rp + c[:, None] * rq
            cp, cq = a[:, P].copy(), a[:, Q].copy()
            a[:, P] = c * cp - s * cq
            a[:, Q] = s * cp + c * cq
    return np.sort(np.diag(a))[::-1]


def singular_values_oracle(m):
    """sqrt of the eigenvalues of the smaller Gram matrix, computed in long double."""
    a = np.array(m, dtype=np.longdouble)
    g = a.T @ a if a.shape[0] >= a.shape[1] else a @ a.T
    lam = np.clip(symmetric_eigvals_ld(g), 0, None)
    return np.sqrt(lam).astype(np.float64)


def softmax_col_ref(z):
    z = np.asarray(z, dtype=np.float64)
    e = np.exp(z - z.max(axis=0, keepdims=True))
    return e / e.sum(axis=0, keepdims=True)


def net_loss_ref(weights, x, y, t, loss):
    """Straight-line forward pass for finite differences."""
    a = x
    for w in weights[:-1]:
        a = np.maximum(w @ a, 0.0)
    z = weights[-1] @ a
    p = softmax_col_ref(z / t)
    n = x.shape[1]
    if loss == "cross_entropy":
        return float(-np.mean(np.log(p[y, np.arange(n)])))
    onehot = np.zeros_like(p)
    onehot[y, np.arange(n)] = 1.0
    return float(np.mean((p - onehot) ** 2))
