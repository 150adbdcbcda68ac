"""Independent reference implementations used by the tests."""
import itertools

import mpmath
import numpy as np


def brute_force_lin_gc(x, p):
    """Linear GC via explicit loops and the normal equations."""
    T, d = x.shape

    def resid_var(target, sources):
        rows, ys = [], []
        for t in range(p, T):
            row = [1.0]
            for k in range(1, p + 1):
                for s in sources:
                    row.append(x[t - k, s])
            rows.append(row)
            ys.append(x[t, target])
        A = np.array(rows)
        y = np.array(ys)
        w = np.linalg.solve(A.T @ A, A.T @ y)
        e = y - A @ w
        return float(e @ e) / len(y)

    out = np.zeros((d, d))
    for i in range(d):
        vr = resid_var(i, [i])
        for j in range(d):
            if j != i:
                vf = resid_var(i, [i, j])
                out[j, i] = max(0.0, np.log(vr / vf))
    return out


def mp_lstsq_variance(Q, y, dps=50):
    """Residual variance of the least-squares projection in high precision.

    Uses an SVD so rank-deficient designs are handled.
    """
    with mpmath.workdps(dps):
        A = mpmath.matrix(Q.tolist())
        b = mpmath.matrix(y.tolist())
        U, S, _ = mpmath.svd_r(A, full_matrices=False)
        # float inputs: directions at rounding level are not real rank
        tol = max(S) * mpmath.mpf("1e-10")
        e = b.copy()
        for k in range(len(S)):
            if S[k] > tol:
                u = U[:, k]
                c = sum(u[i] * b[i] for i in range(len(b)))
                e -= c * u
        return float(sum(v ** 2 for v in e) / len(y))


def welch_p_quad(a, b, dps=30):
    """Two-sided Welch p by numerically integrating the Student t density."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    va = a.var(ddof=1) / a.size
    vb = b.var(ddof=1) / b.size
    t = (a.mean() - b.mean()) / np.sqrt(va + vb)
    df = (va + vb) ** 2 / (va ** 2 / (a.size - 1) + vb ** 2 / (b.size - 1))
    with mpmath.workdps(dps):
        nu = mpmath.mpf(df)
        c = mpmath.gamma((nu + 1) / 2) / (mpmath.sqrt(nu * mpmath.pi) * mpmath.gamma(nu / 2))
        dens = lambda u: c * (1 + u * u / nu) ** (-(nu + 1) / 2)
        tail = mpmath.quad(dens, [abs(t), mpmath.inf])
        return float(t), float(2 * tail)


def bh_enumerate(p, q):
    """Step-up rule written directly: reject the k smallest for the largest valid k."""
    m = len(p)
    ranked = sorted(range(m), key=lambda i: (p[i], i))
    k_best = 0
    for k in range(1, m + 1):
        if p[ranked[k - 1]] <= q * k / m:
            k_best = k
    rej = np.zeros(m, dtype=int)
    for i in ranked[:k_best]:
        rej[i] = 1
    return rej


def floyd_warshall(w):
    n = w.shape[0]
    D = np.full((n, n), np.inf)
    for i in range(n):
        D[i, i] = 0.0
        for j in range(n):
            if i != j and w[i, j] > 0:
                D[i, j] = 1.0 / w[i, j]
    for k in range(n):
        for i in range(n):
            for j in range(n):
                if D[i, k] + D[k, j] < D[i, j]:
                    D[i, j] = D[i, k] + D[k, j]
    return D


def enumerate_paths(w):
    """Shortest path lengths by trying every simple path (tiny graphs only)."""
    n = w.shape[0]
    D = np.full((n, n), np.inf)
    np.fill_diagonal(D, 0.0)
    nodes = range(n)
    for i in nodes:
        for j in nodes:
            if i == j:
                continue
            others = [v for v in nodes if v not in (i, j)]
            for r in range(len(others) + 1):
                for mid in itertools.permutations(others, r):
                    path = (i, *mid, j)
                    ok = all(w[u, v] > 0 for u, v in zip(path, path[1:]))
                    if ok:
                        L = sum(1.0 / w[u, v] for u, v in zip(path, path[1:]))
                        D[i, j] = min(D[i, j], L)
    return D


def efficiency_from_dist(D):
    n = D.shape[0]
    s = 0.0
    for i in range(n):
        for j in range(n):
            if i != j and np.isfinite(D[i, j]):
                s += 1.0 / D[i, j]
    return s / (n * (n - 1))


