"""Seeded recovery experiments: generate, encode, corrupt, decode, score, time.

Every trial draws from its own generator, ``default_rng([seed, trial])`` for
the signal and ``default_rng([seed, trial, method_id])`` for the noise, so a
trial's data does not depend on how many trials run or in what order.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import planner
from .baselines import (BasisPursuitConfig, ExpanderDecodeConfig, basis_pursuit_decode,
                        default_max_iters, expander_decode)
from .baselines.basis_pursuit import prepare as prepare_bp
from .field import is_prime
from .matrix import DeVoreMatrix
from .recovery import RecoveryConfig, decode_exact
from .sparse import SparseVector

log = logging.getLogger(__name__)

METHODS = ("new", "expander", "bp")
_PLANNERS = {
    "new": lambda n, k, M, r: planner.plan_new(n, k, M, r),
    "expander": lambda n, k, M, r: planner.plan_expander(n, k, r),
    "bp": lambda n, k, M, r: planner.plan_l1(n, k, r),
}
_METHOD_ID = {name: i for i, name in enumerate(METHODS)}

CSV_HEADER = ["trial", "method", "exact", "l2_err", "linf_err", "support_match", "time_ms", "iters"]
ZERO_EXCLUSION = 0.01


class InfeasiblePlanError(ValueError):
    pass


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def gen_sparse(n: int, k: int, seed, value_range=(-10.0, 10.0)) -> SparseVector:
    """``k`` nonzeros on a uniformly random support, values uniform on ``value_range``
    with ``[-0.01, 0.01]`` excluded."""
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got k={k}, n={n}")
    lo, hi = value_range
    if max(abs(lo), abs(hi)) <= ZERO_EXCLUSION:
        raise ValueError(f"value range {value_range} lies inside the excluded zero band")
    rng = _rng(seed)
    idx = rng.choice(n, size=k, replace=False)
    vals = np.empty(k)
    filled = 0
    while filled < k:
        draw = rng.uniform(lo, hi, size=k - filled)
        draw = draw[np.abs(draw) > ZERO_EXCLUSION]
        vals[filled : filled + draw.size] = draw
        filled += draw.size
    return SparseVector(n, idx, vals)


def gen_shot_noise(m: int, M: int, alpha: float, seed) -> np.ndarray:
    """``alpha`` times standard normals on ``M`` uniformly chosen positions."""
    if not 0 <= M <= m:
        raise ValueError(f"need 0 <= M <= m, got M={M}, m={m}")
    rng = _rng(seed)
    eta = np.zeros(m)
    pos = rng.choice(m, size=M, replace=False)
    eta[pos] = alpha * rng.standard_normal(M)
    return eta


@dataclass
class ExperimentSpec:
    n: int
    k: int
    M: int = 0
    alphas: list = field(default_factory=lambda: [0.0])
    methods: list = field(default_factory=lambda: ["new"])
    trials: int = 1
    seed: int = 0
    q: int | None = None
    r: int = 3
    out: str | None = None
    value_range: tuple = (-10.0, 10.0)
    zero_tol: float = 0.0
    bp_radius: float = 0.0
    workers: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not 0 <= self.k <= self.n:
            raise ValueError("need 0 <= k <= n")
        bad = set(self.methods) - set(METHODS)
        if bad or not self.methods:
            raise ValueError(f"methods must be a nonempty subset of {METHODS}, got {self.methods}")
        if self.M < 0:
            raise ValueError("M must be >= 0")
        self.alphas = [float(a) for a in self.alphas]
        self.value_range = tuple(float(v) for v in self.value_range)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentSpec":
        obj = json.loads(text)
        if "alpha" in obj and "alphas" not in obj:
            obj["alphas"] = [obj.pop("alpha")]
        known = set(cls.__dataclass_fields__)
        unknown = set(obj) - known
        if unknown:
            raise ValueError(f"unknown experiment keys: {sorted(unknown)}")
        return cls(**obj)


@dataclass
class TrialResult:
    trial: int
    method: str
    alpha: float
    exact: bool
    l2_err: float
    linf_err: float
    support_match: bool
    time_ms: float
    iters: int | None = None
    failed: bool = False

    def __post_init__(self):
        if self.l2_err < 0 or self.linf_err < 0:
            raise ValueError("errors must be nonnegative")
        if self.exact and (self.l2_err != 0 or self.linf_err != 0):
            raise ValueError("an exact trial must have zero error")

    def csv_row(self) -> list[str]:
        return [str(self.trial), self.method, str(self.exact).lower(), repr(self.l2_err),
                repr(self.linf_err), str(self.support_match).lower(), f"{self.time_ms:.3f}",
                "" if self.iters is None else str(self.iters)]


@dataclass
class MethodSummary:
    method: str
    alpha: float
    q: int
    m: int
    trials: int
    exact: int
    mean_l2_err: float
    mean_linf_err: float
    mean_time_ms: float
    failures: int


@dataclass
class ExperimentResult:
    spec: ExperimentSpec
    rows: list[TrialResult]
    summary: list[MethodSummary]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for row in self.rows:
            w.writerow(row.csv_row())
        return buf.getvalue()

    def summary_json(self) -> str:
        return json.dumps([asdict(s) for s in self.summary], indent=2)


def summarise(rows, qs) -> list[MethodSummary]:
    out = []
    keys = []
    for r in rows:
        if (r.method, r.alpha) not in keys:
            keys.append((r.method, r.alpha))
    for method, alpha in keys:
        sel = [r for r in rows if r.method == method and r.alpha == alpha]
        q = qs[method]
        out.append(MethodSummary(
            method, alpha, q, q * q, len(sel), sum(r.exact for r in sel),
            float(np.mean([r.l2_err for r in sel])), float(np.mean([r.linf_err for r in sel])),
            float(np.mean([r.time_ms for r in sel])), sum(r.failed for r in sel)))
    return out


def resolve_q(spec: ExperimentSpec, method: str) -> int:
    if spec.q is not None:
        if not is_prime(spec.q) or spec.q**spec.r < spec.n:
            raise InfeasiblePlanError(f"q={spec.q} must be prime with q**r >= n")
        return spec.q
    plan = _PLANNERS[method](spec.n, max(spec.k, 1), spec.M, spec.r)
    if not plan.feasible:
        raise InfeasiblePlanError(plan.diagnostic)
    return plan.q


def _score(x: SparseVector, est: np.ndarray, support_tol: float):
    truth = x.to_dense()
    diff = est - truth
    l2 = float(np.linalg.norm(diff))
    linf = float(np.abs(diff).max(initial=0.0))
    est_support = set(np.flatnonzero(np.abs(est) > support_tol).tolist())
    return l2 == 0.0 and linf == 0.0, l2, linf, est_support == set(x.support)


def _run_one(method, mat, x, y, spec, trial, alpha) -> TrialResult:
    iters = None
    failed = False
    if method == "new":
        cfg = RecoveryConfig(spec.zero_tol)
        t0 = time.perf_counter()
        res = decode_exact(mat, y, cfg)
        dt = time.perf_counter() - t0
        est = res.x.to_dense()
        failed = not res.ok
        support_tol = spec.zero_tol
    elif method == "expander":
        cfg = ExpanderDecodeConfig(max_iters=default_max_iters(spec.k, spec.n))
        t0 = time.perf_counter()
        res = expander_decode(mat, y, cfg)
        dt = time.perf_counter() - t0
        est = res.x.to_dense()
        iters, failed = res.iterations, not res.converged
        support_tol = 0.0
    else:
        cfg = BasisPursuitConfig(radius=spec.bp_radius)
        t0 = time.perf_counter()
        res = basis_pursuit_decode(mat, y, cfg)
        dt = time.perf_counter() - t0
        est = res.x
        iters, failed = res.iterations, not res.converged
        # ADMM iterates carry tiny nonzeros; count only entries that matter
        support_tol = 1e-6 * max(1.0, float(np.abs(est).max(initial=0.0)))
    exact, l2, linf, supp_ok = _score(x, est, support_tol)
    return TrialResult(trial, method, alpha, exact, l2, linf, supp_ok, dt * 1e3, iters, failed)


def run_experiment(spec: ExperimentSpec) -> ExperimentResult:
    qs = {method: resolve_q(spec, method) for method in spec.methods}
    mats = {}
    for method, q in qs.items():
        if q not in mats:
            mats[q] = DeVoreMatrix(q, spec.r, spec.n)
            mats[q].supports  # construction stays out of the timed region
        if method == "bp":
            prepare_bp(mats[q], spec.bp_radius)
    log.info("plan: %s", ", ".join(f"{m} q={q} m={q * q}" for m, q in qs.items()))

    jobs = [(a_i * spec.trials + t, alpha) for a_i, alpha in enumerate(spec.alphas)
            for t in range(spec.trials)]

    def trial_rows(job):
        trial, alpha = job
        x = gen_sparse(spec.n, spec.k, np.random.default_rng([spec.seed, trial]), spec.value_range)
        rows = []
        for method in spec.methods:
            mat = mats[qs[method]]
            noise_rng = np.random.default_rng([spec.seed, trial, _METHOD_ID[method]])
            y = mat.encode(x) + gen_shot_noise(mat.m, min(spec.M, mat.m), alpha, noise_rng)
            rows.append(_run_one(method, mat, x, y, spec, trial, alpha))
        return rows

    if spec.workers > 1:
        with ThreadPoolExecutor(spec.workers) as pool:
            chunks = list(pool.map(trial_rows, jobs))
    else:
        chunks = [trial_rows(job) for job in jobs]
    rows = [r for chunk in chunks for r in chunk]
    result = ExperimentResult(spec, rows, summarise(rows, qs))
    if spec.out:
        Path(spec.out).write_text(result.to_csv())
    return result
