"""Polynomial feature maps for lagged regressors.

Four maps are available:

* ``LIN`` -- ``[1, x]`` (the order-1 multivariate polynomial)
* ``MP``  -- all monomials of total degree <= r
* ``RP``  -- reduced polynomial: element powers, powers of the coordinate sum
  and element-times-sum cross terms; size ``1 + r + d(2r - 1)``
* ``RSP`` -- RP applied to ``eta * sinh(sigma * x)``

All functions accept a single vector (shape ``(d,)``) or a batch of rows
(shape ``(N, d)``) and return features along the last axis.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import combinations_with_replacement
from math import comb

import numpy as np

KINDS = ("LIN", "MP", "RP", "RSP")
SINH_LIMIT = 700.0


class FeatureMapError(ValueError):
    pass


@dataclass(frozen=True)
class FeatureMapSpec:
    kind: str = "LIN"
    r: int = 1
    eta: float = 1.0
    sigma: float = 1.0

    def __post_init__(self):
        kind = self.kind.upper()
        if kind not in KINDS:
            raise FeatureMapError(f"unknown feature map {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        if kind == "LIN":
            object.__setattr__(self, "r", 1)
        if int(self.r) != self.r or self.r < 1:
            raise FeatureMapError(f"order r must be an integer >= 1, got {self.r}")
        object.__setattr__(self, "r", int(self.r))
        if kind == "RSP" and not (self.eta > 0 and self.sigma > 0):
            raise FeatureMapError("RSP needs eta > 0 and sigma > 0")

    @classmethod
    def parse(cls, text: str) -> "FeatureMapSpec":
        """Parse ``lin``, ``mp:r=2``, ``rp:r=3``, ``rsp:r=2,eta=0.5,sigma=0.3``.

        ``rspf`` is shorthand for RSP with eta = sigma = 1 (default r=2).
        """
        text = text.strip()
        m = re.fullmatch(r"([A-Za-z]+)(?::(.*))?", text)
        if not m:
            raise FeatureMapError(f"bad feature map string {text!r}")
        name = m.group(1).lower()
        params = {}
        if m.group(2):
            for item in m.group(2).split(","):
                key, sep, val = item.partition("=")
                key = key.strip().lower()
                if not sep or key not in ("r", "eta", "sigma"):
                    raise FeatureMapError(f"bad parameter {item!r} in {text!r}")
                try:
                    params[key] = int(val) if key == "r" else float(val)
                except ValueError:
                    raise FeatureMapError(f"bad value {val!r} in {text!r}") from None
        if name == "rspf":
            if "eta" in params or "sigma" in params:
                raise FeatureMapError("rspf fixes eta = sigma = 1")
            return cls("RSP", params.get("r", 2), 1.0, 1.0)
        if name not in ("lin", "mp", "rp", "rsp"):
            raise FeatureMapError(f"unknown feature map {name!r} in {text!r}")
        if name != "rsp" and ("eta" in params or "sigma" in params):
            raise FeatureMapError(f"eta/sigma only apply to rsp, got {text!r}")
        if name == "lin" and params.get("r", 1) != 1:
            raise FeatureMapError("lin has order 1")
        return cls(name.upper(), params.get("r", 1 if name == "lin" else 2),
                   params.get("eta", 1.0), params.get("sigma", 1.0))

    def __str__(self) -> str:
        if self.kind == "LIN":
            return "lin"
        if self.kind == "RSP":
            return f"rsp:r={self.r},eta={self.eta!r},sigma={self.sigma!r}"
        return f"{self.kind.lower()}:r={self.r}"


def expanded_dim(spec: FeatureMapSpec, d: int) -> int:
    if d < 1:
        raise FeatureMapError(f"input dimension must be >= 1, got {d}")
    if spec.kind in ("LIN", "MP"):
        return comb(d + spec.r, spec.r)
    return 1 + spec.r + d * (2 * spec.r - 1)


def _as_rows(x):
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 1:
        return arr[None, :], True
    if arr.ndim != 2:
        raise FeatureMapError(f"expected 1-D or 2-D input, got {arr.ndim}-D")
    return arr, False


def expand_mp(x, r: int) -> np.ndarray:
    """Monomials of degree <= r: constant first, then graded lexicographic."""
    X, single = _as_rows(x)
    n, d = X.shape
    cols = [np.ones(n)]
    for deg in range(1, r + 1):
        for idx in combinations_with_replacement(range(d), deg):
            col = X[:, idx[0]].copy()
            for k in idx[1:]:
                col *= X[:, k]
            cols.append(col)
    Q = np.column_stack(cols)
    return Q[0] if single else Q


def expand_rp(x, r: int) -> np.ndarray:
    """Reduced polynomial terms, in this order:

    ``[1]``, ``x_j**k`` (k = 1..r outer, j inner), ``s**k`` (k = 1..r) with
    ``s = sum_j x_j``, then ``x_j * s**(k-1)`` (k = 2..r outer, j inner).
    """
    X, single = _as_rows(x)
    n, d = X.shape
    s = X.sum(axis=1)
    blocks = [np.ones((n, 1))]
    blocks += [X ** k for k in range(1, r + 1)]
    blocks.append(np.column_stack([s ** k for k in range(1, r + 1)]))
    blocks += [X * (s ** (k - 1))[:, None] for k in range(2, r + 1)]
    Q = np.hstack(blocks)
    return Q[0] if single else Q


def expand_rsp(x, r: int, eta: float = 1.0, sigma: float = 1.0) -> np.ndarray:
    """``expand_rp`` of ``u = eta * sinh(sigma * x)``."""
    if not (eta > 0 and sigma > 0):
        raise FeatureMapError("eta and sigma must be positive")
    X, single = _as_rows(x)
    z = sigma * X
    over = np.abs(z) > SINH_LIMIT
    if over.any():
        row, col = np.argwhere(over)[0]
        where = f"coordinate {col}" if single else f"row {row}, coordinate {col}"
        raise FeatureMapError(
            f"sinh overflow at {where}: |sigma*x| = {abs(z[row, col]):.4g} > {SINH_LIMIT}")
    Q = expand_rp(eta * np.sinh(z), r)
    return Q[0] if single else Q


def expand(x, spec: FeatureMapSpec) -> np.ndarray:
    if spec.kind in ("LIN", "MP"):
        return expand_mp(x, spec.r)
    if spec.kind == "RP":
        return expand_rp(x, spec.r)
    return expand_rsp(x, spec.r, spec.eta, spec.sigma)
