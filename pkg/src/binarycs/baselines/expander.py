"""Iterative gap-voting recovery for bi-adjacency matrices of expander graphs.

Every round computes the gaps ``g = y - A x_hat`` and looks for a variable
whose ``q`` measurements mostly carry the same nonzero gap; that gap is
added to the variable.  Stops once every gap vanishes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..recovery import _longest_window
from ..sparse import SparseVector


def default_max_iters(k: int, n: int, C: float = 10.0) -> int:
    return max(1, math.ceil(C * max(k, 1) * math.log2(max(n, 2))))


@dataclass(frozen=True)
class ExpanderDecodeConfig:
    epsilon: float = 0.25
    max_iters: int = 1000
    gap_tol: float | None = None  # None -> 1e-9 * max(1, max|y|)

    def __post_init__(self):
        if not 0 < self.epsilon <= 0.25:
            raise ValueError(f"epsilon must lie in (0, 1/4], got {self.epsilon}")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")

    def required_votes(self, q: int) -> int:
        # small slack so (1 - 2*eps)*q landing on an integer is not pushed up by rounding
        return math.ceil((1 - 2 * self.epsilon) * q - 1e-9)


@dataclass
class ExpanderResult:
    x: SparseVector
    iterations: int
    converged: bool
    reason: str = ""
    residual_nnz: int = 0


def expander_decode(mat, y, config: ExpanderDecodeConfig = ExpanderDecodeConfig()) -> ExpanderResult:
    y = np.asarray(y, dtype=float)
    if y.shape != (mat.m,):
        raise ValueError(f"measurement vector must have length {mat.m}, got {y.shape}")
    tol = config.gap_tol if config.gap_tol is not None else 1e-9 * max(1.0, float(np.abs(y).max(initial=0)))
    need = config.required_votes(mat.q)
    sup = mat.supports
    gaps = y.copy()
    xhat = np.zeros(mat.n)

    it = 0
    while True:
        live = np.abs(gaps) > tol
        if not live.any():
            return ExpanderResult(SparseVector.from_dense(xhat), it, True)
        if it >= config.max_iters:
            return ExpanderResult(SparseVector.from_dense(xhat), it, False, "max_iters reached",
                                  int(live.sum()))
        votes = mat.column_hits(live)
        chosen = None
        # lowest qualifying index wins
        for j in np.flatnonzero(votes >= need):
            g = gaps[sup[j]]
            s = np.sort(g[np.abs(g) > tol])
            start, length = _longest_window(s, tol)
            if length >= need:
                chosen = (int(j), float(s[start + length // 2]))
                break
        if chosen is None:
            return ExpanderResult(SparseVector.from_dense(xhat), it, False,
                                  "no variable with a majority gap", int(live.sum()))
        j, g = chosen
        xhat[j] += g
        gaps[sup[j]] -= g
        it += 1
