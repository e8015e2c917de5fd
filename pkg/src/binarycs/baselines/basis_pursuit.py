"""l1 minimisation (basis pursuit) by ADMM.

Equality form ``min ||z||_1 s.t. A z = y``: the classic two-block splitting
with the x-step an orthogonal projection onto ``{x : A x = y}``.  The Gram
matrix ``A A^T`` of a polynomial-graph matrix is singular (the rows of every
block sum to the all-ones row), so the projection uses its pseudo-inverse.

Noise-aware form ``min ||z||_1 s.t. ||A z - y||_2 <= radius``: split
``x = z, A x = w`` with ``w`` in the ball; the x-step solves with
``I + A^T A`` through a Cholesky factor of ``I + A A^T``.

Both operate on the column-normalised matrix ``A / sqrt(q)``; the l1
problem is unchanged by that scaling.
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.linalg import cho_factor, cho_solve

_CACHE: "weakref.WeakKeyDictionary" = weakref.WeakKeyDictionary()


@dataclass(frozen=True)
class BasisPursuitConfig:
    abstol: float = 1e-7
    reltol: float = 1e-5
    max_iters: int = 20_000
    radius: float = 0.0
    rho: float = 1.0
    relaxation: float = 1.6
    check_every: int = 10
    polish: bool = True

    def __post_init__(self):
        if self.abstol <= 0 or self.reltol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.radius < 0:
            raise ValueError("radius must be >= 0")
        if not 0 < self.relaxation < 2:
            raise ValueError("relaxation must lie in (0, 2)")


@dataclass
class BasisPursuitResult:
    x: np.ndarray
    iterations: int
    converged: bool
    primal_residual: float
    dual_residual: float

    @property
    def l1_norm(self) -> float:
        return float(np.abs(self.x).sum())


class _Operator:
    def __init__(self, mat):
        self.scale = np.sqrt(mat.q)
        self.a = (mat.to_sparse() / self.scale).tocsr()
        self.at = self.a.T.tocsr()
        self.gram = (self.a @ self.at).toarray()

    @cached_property
    def gram_pinv(self) -> np.ndarray:
        lam, vec = np.linalg.eigh(self.gram)
        keep = lam > 1e-10 * lam.max()
        return (vec[:, keep] / lam[keep]) @ vec[:, keep].T

    @cached_property
    def shifted_chol(self):
        g = self.gram.copy()
        g[np.diag_indices_from(g)] += 1.0
        return cho_factor(g, lower=True)


def _operator(mat) -> _Operator:
    op = _CACHE.get(mat)
    if op is None:
        op = _CACHE[mat] = _Operator(mat)
    return op


def prepare(mat, radius: float = 0.0) -> None:
    """Build the per-matrix factorisations up front (kept out of decode timings)."""
    op = _operator(mat)
    if radius == 0:
        op.gram_pinv
    else:
        op.shifted_chol


def _soft(v, t):
    return np.sign(v) * np.maximum(np.abs(v) - t, 0.0)


def basis_pursuit_decode(mat, y, config: BasisPursuitConfig = BasisPursuitConfig()) -> BasisPursuitResult:
    y = np.asarray(y, dtype=float)
    if y.shape != (mat.m,):
        raise ValueError(f"measurement vector must have length {mat.m}, got {y.shape}")
    if not np.any(y):
        return BasisPursuitResult(np.zeros(mat.n), 0, True, 0.0, 0.0)
    op = _operator(mat)
    if config.radius == 0:
        res = _admm_equality(op, y / op.scale, config)
        if config.polish:
            res.x = _polish(mat, y, res.x)
        return res
    return _admm_ball(op, y / op.scale, config.radius / op.scale, config)


def _stop(r, s, x_norm, z_norm, u_norm, dim, config):
    eps_pri = np.sqrt(dim) * config.abstol + config.reltol * max(x_norm, z_norm)
    eps_dual = np.sqrt(dim) * config.abstol + config.reltol * u_norm
    return r < eps_pri and s < eps_dual


def _admm_equality(op, b, config):
    a, at, kp = op.a, op.at, op.gram_pinv
    n = a.shape[1]
    offset = at @ (kp @ b)
    z = np.zeros(n)
    u = np.zeros(n)
    rho, alpha = config.rho, config.relaxation
    r = s = np.inf
    it = 0
    for it in range(1, config.max_iters + 1):
        v = z - u
        x = v - at @ (kp @ (a @ v)) + offset
        xh = alpha * x + (1 - alpha) * z
        z_old = z
        z = _soft(xh + u, 1.0 / rho)
        u += xh - z
        if it % config.check_every:
            continue
        r = np.linalg.norm(x - z)
        s = rho * np.linalg.norm(z - z_old)
        if _stop(r, s, np.linalg.norm(x), np.linalg.norm(z), rho * np.linalg.norm(u), n, config):
            return BasisPursuitResult(z, it, True, float(r), float(s))
        # residual balancing; u is the scaled dual so it rescales with rho
        if r > 10 * s:
            rho *= 2.0
            u /= 2.0
        elif s > 10 * r:
            rho /= 2.0
            u *= 2.0
    return BasisPursuitResult(z, it, False, float(r), float(s))


def _admm_ball(op, b, radius, config):
    a, at, gram, chol = op.a, op.at, op.gram, op.shifted_chol
    n, m = a.shape[1], a.shape[0]

    def project(v):
        d = v - b
        nrm = np.linalg.norm(d)
        return v if nrm <= radius else b + d * (radius / nrm)

    z = np.zeros(n)
    w = project(np.zeros(m))
    u = np.zeros(n)
    v = np.zeros(m)
    rho, alpha = config.rho, config.relaxation
    r = s = np.inf
    it = 0
    for it in range(1, config.max_iters + 1):
        # x = (I + A^T A)^{-1} (z - u + A^T (w - v)) via Woodbury, A x via the Gram
        p = a @ (z - u)
        wv = w - v
        c = cho_solve(chol, p + gram @ wv)
        x = z - u + at @ (wv - c)
        ax = p + gram @ (wv - c)
        xh = alpha * x + (1 - alpha) * z
        axh = alpha * ax + (1 - alpha) * w
        z_old, w_old = z, w
        z = _soft(xh + u, 1.0 / rho)
        w = project(axh + v)
        u += xh - z
        v += axh - w
        if it % config.check_every:
            continue
        r = np.sqrt(np.sum((x - z) ** 2) + np.sum((ax - w) ** 2))
        s = rho * np.linalg.norm((z - z_old) + at @ (w - w_old))
        x_norm = np.sqrt(np.sum(x**2) + np.sum(ax**2))
        z_norm = np.sqrt(np.sum(z**2) + np.sum(w**2))
        if _stop(r, s, x_norm, z_norm, rho * np.linalg.norm(u + at @ v), n + m, config):
            return BasisPursuitResult(z, it, True, float(r), float(s))
        if r > 10 * s:
            rho *= 2.0
            u /= 2.0
            v /= 2.0
        elif s > 10 * r:
            rho /= 2.0
            u *= 2.0
            v *= 2.0
    return BasisPursuitResult(z, it, False, float(r), float(s))


def _polish(mat, y, z, rel=1e-6):
    """Least-squares refit on the support of ``z``.

    Kept only when it satisfies ``A x = y`` and sits within ``1e-3`` (relative)
    of ``z``, i.e. when ADMM has already located the optimal support.
    """
    supp = np.flatnonzero(np.abs(z) > rel * np.abs(z).max(initial=0.0))
    if supp.size == 0 or supp.size >= mat.m:
        return z
    cols = np.zeros((mat.m, supp.size))
    for i, j in enumerate(supp):
        cols[mat.column_support(int(j)), i] = 1.0
    coef, *_ = np.linalg.lstsq(cols, y, rcond=None)
    feasible = np.linalg.norm(cols @ coef - y) <= 1e-9 * max(1.0, np.linalg.norm(y))
    close = np.linalg.norm(coef - z[supp]) <= 1e-3 * np.linalg.norm(z)
    if feasible and close:
        out = np.zeros(mat.n)
        out[supp] = coef
        return out
    return z
