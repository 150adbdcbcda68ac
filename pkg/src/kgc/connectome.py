"""Functional connectivity, group statistics, and EC/FC mask fusion."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import special

from .tsio import TimeSeriesMatrix


class ConnectomeError(ValueError):
    pass


@dataclass
class SignificanceMask:
    mask: np.ndarray
    alpha: float = float("nan")
    q: float = float("nan")

    def __post_init__(self):
        m = np.asarray(self.mask)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ConnectomeError(f"mask must be square, got shape {m.shape}")
        if not np.isin(m, (0, 1)).all():
            raise ConnectomeError("mask entries must be 0 or 1")
        m = m.astype(np.int8)
        np.fill_diagonal(m, 0)
        self.mask = m

    @property
    def n_selected(self) -> int:
        return int(self.mask.sum())

    @property
    def d(self) -> int:
        return self.mask.shape[0]

    @classmethod
    def full(cls, d: int) -> "SignificanceMask":
        return cls(np.ones((d, d), dtype=np.int8))

    def to_dict(self) -> dict:
        return {"d": self.d, "alpha": self.alpha, "q": self.q,
                "n_selected": self.n_selected,
                "selected": [[int(i), int(j)] for i, j in np.argwhere(self.mask)]}


def pearson_fc(ts: TimeSeriesMatrix) -> np.ndarray:
    """Pearson correlation between channels; constant channels correlate 0."""
    x = ts.data
    if x.shape[0] < 3:
        raise ConnectomeError("need at least 3 time points")
    xc = x - x.mean(axis=0)
    norms = np.sqrt((xc ** 2).sum(axis=0))
    live = norms > 0
    z = np.zeros_like(xc)
    z[:, live] = xc[:, live] / norms[live]
    r = z.T @ z
    r = 0.5 * (r + r.T)
    np.clip(r, -1.0, 1.0, out=r)
    np.fill_diagonal(r, 1.0)
    return r


def fisher_z(r: np.ndarray) -> np.ndarray:
    """``arctanh`` with the unit diagonal mapped to 0 and |r| capped below 1."""
    r = np.clip(np.asarray(r, dtype=float), -1 + 1e-15, 1 - 1e-15)
    z = np.arctanh(r)
    if z.ndim == 2 and z.shape[0] == z.shape[1]:
        np.fill_diagonal(z, 0.0)
    return z


def vectorize(m, mode: str = "full") -> np.ndarray:
    """``full``: row-major d*d entries; ``upper``: strict upper triangle."""
    m = np.asarray(m)
    if mode == "full":
        return m.reshape(-1).copy()
    if mode == "upper":
        return m[np.triu_indices(m.shape[0], k=1)].copy()
    raise ConnectomeError(f"unknown vectorize mode {mode!r}")


def welch_ttest(a, b) -> tuple[float, float]:
    """Two-sided Welch t-test; returns ``(t, p)``.

    Both samples with zero variance: ``(0, 1)`` when the means agree, otherwise
    ``(+-inf, 0)``.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.size < 2 or b.size < 2:
        raise ConnectomeError("each sample needs at least 2 observations")
    ma, mb = a.mean(), b.mean()
    va = a.var(ddof=1) / a.size
    vb = b.var(ddof=1) / b.size
    se2 = va + vb
    if se2 == 0.0:
        if ma == mb:
            return 0.0, 1.0
        return float(np.copysign(np.inf, ma - mb)), 0.0
    t = (ma - mb) / np.sqrt(se2)
    df = se2 ** 2 / (va ** 2 / (a.size - 1) + vb ** 2 / (b.size - 1))
    # two-sided tail of Student t: I_{df/(df+t^2)}(df/2, 1/2)
    p = special.betainc(df / 2.0, 0.5, df / (df + t * t))
    return float(t), float(min(1.0, p))


def _welch_cells(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Vectorized Welch p-values over the trailing axes of subject stacks."""
    na, nb = A.shape[0], B.shape[0]
    ma, mb = A.mean(axis=0), B.mean(axis=0)
    va = A.var(axis=0, ddof=1) / na
    vb = B.var(axis=0, ddof=1) / nb
    se2 = va + vb
    p = np.empty(ma.shape)
    zero = se2 == 0
    p[zero] = np.where(ma[zero] == mb[zero], 1.0, 0.0)
    ok = ~zero
    t = (ma[ok] - mb[ok]) / np.sqrt(se2[ok])
    df = se2[ok] ** 2 / (va[ok] ** 2 / (na - 1) + vb[ok] ** 2 / (nb - 1))
    p[ok] = np.minimum(1.0, special.betainc(df / 2.0, 0.5, df / (df + t * t)))
    return p


def bh_fdr(pvals, q: float = 0.05) -> np.ndarray:
    """Benjamini-Hochberg step-up; returns a 0/1 rejection vector."""
    p = np.asarray(pvals, dtype=float).reshape(-1)
    if ((p < 0) | (p > 1)).any():
        raise ConnectomeError("p-values must lie in [0, 1]")
    m = p.size
    out = np.zeros(m, dtype=np.int8)
    if m == 0:
        return out
    order = np.argsort(p, kind="stable")
    below = p[order] <= q * np.arange(1, m + 1) / m
    if below.any():
        k = np.nonzero(below)[0].max()
        out[order[:k + 1]] = 1
    return out


def cell_pvalues(matrices_a: Sequence, matrices_b: Sequence,
                 symmetric: bool = False) -> np.ndarray:
    """Per-cell Welch p-values (diagonal NaN; mirrored when ``symmetric``)."""
    A = np.asarray([np.asarray(m, dtype=float) for m in matrices_a])
    B = np.asarray([np.asarray(m, dtype=float) for m in matrices_b])
    if A.shape[0] < 2 or B.shape[0] < 2:
        raise ConnectomeError("each group needs at least 2 subjects")
    if A.shape[1:] != B.shape[1:] or A.ndim != 3 or A.shape[1] != A.shape[2]:
        raise ConnectomeError(f"inconsistent matrix shapes {A.shape[1:]} vs {B.shape[1:]}")
    d = A.shape[1]
    if symmetric:
        rows, cols = np.triu_indices(d, k=1)
    else:
        rows, cols = np.nonzero(~np.eye(d, dtype=bool))
    p = np.full((d, d), np.nan)
    p[rows, cols] = _welch_cells(A[:, rows, cols], B[:, rows, cols])
    if symmetric:
        p[cols, rows] = p[rows, cols]
    return p


def group_difference_mask(matrices_a: Sequence, matrices_b: Sequence, alpha: float = 0.01,
                          q: Optional[float] = 0.05, symmetric: bool = False) -> SignificanceMask:
    """Cells with Welch p <= alpha that also survive BH-FDR at level q.

    ``q=None`` applies the alpha gate alone.  With ``symmetric`` only the upper
    triangle is tested (one hypothesis per undirected pair) and mirrored.
    """
    p = cell_pvalues(matrices_a, matrices_b, symmetric)
    d = p.shape[0]
    if symmetric:
        rows, cols = np.triu_indices(d, k=1)
    else:
        rows, cols = np.nonzero(~np.eye(d, dtype=bool))
    pv = p[rows, cols]
    keep = pv <= alpha
    if q is not None:
        keep &= bh_fdr(pv, q).astype(bool)
    mask = np.zeros((d, d), dtype=np.int8)
    mask[rows[keep], cols[keep]] = 1
    if symmetric:
        mask[cols[keep], rows[keep]] = 1
    return SignificanceMask(mask, alpha=float(alpha), q=float("nan") if q is None else float(q))


def threshold_sweep(matrices_a: Sequence, matrices_b: Sequence, alphas: Sequence[float],
                    symmetric: bool = False) -> list[dict]:
    """Selected-cell counts under raw p-value thresholds (no FDR)."""
    p = cell_pvalues(matrices_a, matrices_b, symmetric)
    if symmetric:
        p = np.triu(p, k=1)
        p[np.tril_indices(p.shape[0])] = np.nan
    return [{"alpha": float(a), "n_selected": int(np.nansum(p <= a))} for a in alphas]


def prune_bidirectional(ec_mask: SignificanceMask) -> SignificanceMask:
    m = ec_mask.mask
    both = (m == 1) & (m.T == 1)
    out = m.copy()
    out[both] = 0
    return SignificanceMask(out, ec_mask.alpha, ec_mask.q)


def fuse_masks(ec_mask: SignificanceMask, fc_mask: SignificanceMask) -> SignificanceMask:
    """Directed EC cells whose undirected FC pair is also selected."""
    if ec_mask.d != fc_mask.d:
        raise ConnectomeError(f"dimension mismatch: {ec_mask.d} vs {fc_mask.d}")
    fc_pair = (fc_mask.mask | fc_mask.mask.T).astype(np.int8)
    return SignificanceMask(ec_mask.mask & fc_pair, ec_mask.alpha, ec_mask.q)


def group_mean_diff(matrices_high: Sequence, matrices_low: Sequence) -> np.ndarray:
    H = np.asarray([getattr(m, "values", m) for m in matrices_high], dtype=float)
    L = np.asarray([getattr(m, "values", m) for m in matrices_low], dtype=float)
    if len(H) < 1 or len(L) < 1:
        raise ConnectomeError("each group needs at least one subject")
    if H.shape[1:] != L.shape[1:]:
        raise ConnectomeError(f"dimension mismatch: {H.shape[1:]} vs {L.shape[1:]}")
    return H.mean(axis=0) - L.mean(axis=0)


@dataclass
class SubjectFeatureTable:
    features: np.ndarray
    labels: np.ndarray
    feature_index: list[tuple[int, int, str]] = field(default_factory=list)

    def columns(self, kind: Optional[str] = None, mask: Optional[np.ndarray] = None) -> list[int]:
        """Column numbers of a kind, optionally restricted to cells set in ``mask``."""
        out = []
        for c, (s, t, k) in enumerate(self.feature_index):
            if kind is not None and k != kind:
                continue
            if mask is not None and not mask[s, t]:
                continue
            out.append(c)
        return out

    def column_names(self) -> list[str]:
        return [f"{k}:{s}->{t}" if k == "EC" else f"{k}:{s}-{t}"
                for s, t, k in self.feature_index]


def assemble_features(subjects: Sequence, mask_ec: Optional[SignificanceMask] = None,
                      mask_fc: Optional[SignificanceMask] = None, mode: str = "EC+FC",
                      fc_full: bool = False) -> SubjectFeatureTable:
    """Stack masked, vectorized EC (directed, full) and FC (upper triangle) rows.

    ``subjects`` holds ``(ec, fc, label)`` triples; ``ec`` may be a GCMatrix.
    A ``None`` mask selects every cell, including the diagonal for EC.
    ``fc_full`` vectorizes FC over all d*d cells instead of the upper triangle.
    """
    mode = mode.upper()
    if mode not in ("EC", "FC", "EC+FC"):
        raise ConnectomeError(f"unknown mode {mode!r}")
    if not subjects:
        raise ConnectomeError("no subjects")
    d = np.asarray(getattr(subjects[0][0], "values", subjects[0][0])).shape[0]

    index: list[tuple[int, int, str]] = []
    if "EC" in mode.split("+"):
        if mask_ec is None:
            cells = [(i, j) for i in range(d) for j in range(d)]
        else:
            _check_dim(mask_ec, d)
            cells = [(int(i), int(j)) for i, j in np.argwhere(mask_ec.mask)]
        index += [(i, j, "EC") for i, j in cells]
    if "FC" in mode.split("+"):
        if fc_full:
            cells = [(i, j) for i in range(d) for j in range(d)]
        else:
            cells = [(i, j) for i in range(d) for j in range(i + 1, d)]
        if mask_fc is not None:
            _check_dim(mask_fc, d)
            sel = mask_fc.mask | mask_fc.mask.T
            cells = [(i, j) for i, j in cells if sel[i, j]]
        index += [(i, j, "FC") for i, j in cells]

    rows, labels = [], []
    ec_r = np.array([s for s, t, k in index if k == "EC"], dtype=int)
    ec_c = np.array([t for s, t, k in index if k == "EC"], dtype=int)
    fc_r = np.array([s for s, t, k in index if k == "FC"], dtype=int)
    fc_c = np.array([t for s, t, k in index if k == "FC"], dtype=int)
    for n, (ec, fc, label) in enumerate(subjects):
        ec = np.asarray(getattr(ec, "values", ec), dtype=float)
        fc = np.asarray(fc, dtype=float)
        if ec.shape != (d, d) or fc.shape != (d, d):
            raise ConnectomeError(
                f"subject {n}: expected {d}x{d} matrices, got {ec.shape} and {fc.shape}")
        rows.append(np.concatenate([ec[ec_r, ec_c], fc[fc_r, fc_c]]))
        labels.append(int(label))
    X = np.vstack(rows) if index else np.zeros((len(rows), 0))
    if not np.isfinite(X).all():
        raise ConnectomeError("non-finite feature values")
    return SubjectFeatureTable(X, np.asarray(labels, dtype=int), index)


def _check_dim(mask: SignificanceMask, d: int) -> None:
    if mask.d != d:
        raise ConnectomeError(f"mask is {mask.d}x{mask.d}, matrices are {d}x{d}")
