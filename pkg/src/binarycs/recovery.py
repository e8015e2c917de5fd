"""Single-pass decoders for binary matrices satisfying the main assumption.

For every column ``j`` the decoder looks only at the ``q`` measurements that
column ``j`` touches (the reduced vector).  Off the support at most
``k(r-1) + M`` of them are nonzero; on the support more than half of them are
equal to ``x_j``.  So with ``q > 2(k(r-1) + M)`` a majority vote per column
recovers ``x`` exactly, with no iteration.
"""

from __future__ import annotations

import functools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .sparse import SparseVector

# relative slack for "equal" floats in the exact decoder
EQUALITY_RTOL = 2.0**-40


@dataclass(frozen=True)
class RecoveryConfig:
    zero_tol: float = 0.0

    def __post_init__(self):
        if not self.zero_tol >= 0:
            raise ValueError(f"zero_tol must be >= 0, got {self.zero_tol}")

    @property
    def group_spread(self) -> float:
        return 2.0 * self.zero_tol

    @staticmethod
    def majority(q: int) -> int:
        return q // 2 + 1


@dataclass(frozen=True)
class NoiseSpec:
    """Shot noise: at most ``M`` corrupted measurements of arbitrary size ``alpha``."""

    M: int = 0
    alpha: float = 0.0
    seed: int = 0

    def validate(self, m: int) -> None:
        if not 0 <= self.M <= m:
            raise ValueError(f"M={self.M} must lie in [0, m={m}]")


@dataclass(frozen=True)
class SupportTest:
    inside: bool
    count: int = 0


@dataclass
class DecodeStats:
    columns_visited: int = 0
    columns_sorted: int = 0
    comparisons: int = 0


@dataclass
class DecodeResult:
    x: SparseVector
    failures: list[int] = field(default_factory=list)
    stats: DecodeStats = field(default_factory=DecodeStats)

    @property
    def ok(self) -> bool:
        return not self.failures


def reduced_vector(mat, y, j: int) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if y.shape != (mat.m,):
        raise ValueError(f"measurement vector must have length {mat.m}, got {y.shape}")
    return y[mat.column_support(j)]


def _longest_window(s: np.ndarray, spread: float) -> tuple[int, int]:
    """Longest run of the sorted array ``s`` with ``max - min <= spread``.

    Ties in length go to the tighter window, then to the lower start.
    Returns ``(start, length)``.
    """
    ends = np.searchsorted(s, s + spread, side="right")
    lengths = ends - np.arange(s.size)
    best = lengths.max()
    starts = np.flatnonzero(lengths == best)
    if starts.size > 1:
        widths = s[starts + best - 1] - s[starts]
        starts = starts[widths == widths.min()]
    return int(starts[0]), int(best)


class _Counter:
    def __init__(self):
        self.n = 0


def _counting_sort(values, counter: _Counter) -> np.ndarray:
    def cmp(a, b):
        counter.n += 1
        return (a > b) - (a < b)

    return np.array(sorted(values.tolist(), key=functools.cmp_to_key(cmp)))


def _count_window(s: np.ndarray, spread: float, counter: _Counter) -> tuple[int, int]:
    # two-pointer scan, same tie-breaking as _longest_window
    best_start, best_len, best_width = 0, 0, np.inf
    hi = 0
    for lo in range(s.size):
        hi = max(hi, lo)
        while hi + 1 < s.size:
            counter.n += 1
            if s[hi + 1] - s[lo] <= spread:
                hi += 1
            else:
                break
        length, width = hi - lo + 1, s[hi] - s[lo]
        if length > best_len or (length == best_len and width < best_width):
            best_start, best_len, best_width = lo, length, width
    return best_start, best_len


def support_test(ybar, config: RecoveryConfig = RecoveryConfig(), spread: float | None = None) -> SupportTest:
    """Decide whether the column owning ``ybar`` is in the support.

    ``out`` when at most ``q/2`` entries exceed ``zero_tol`` in magnitude;
    otherwise ``in`` with the length of the longest near-equal run
    (entries within ``spread``, default ``2 * zero_tol``).
    """
    ybar = np.asarray(ybar, dtype=float)
    q = ybar.size
    nu = int((np.abs(ybar) > config.zero_tol).sum())
    if nu < config.majority(q):
        return SupportTest(False, 0)
    _, length = _longest_window(np.sort(ybar), config.group_spread if spread is None else spread)
    return SupportTest(True, length)


def _decode_column(ybar: np.ndarray, zero_tol: float, spread: float, robust: bool,
                   counter: _Counter | None = None):
    """Returns ``(value, failed)``; value 0 for columns judged off-support."""
    q = ybar.size
    maj = q // 2 + 1
    if counter is not None:
        counter.n += q
    if int((np.abs(ybar) > zero_tol).sum()) < maj:
        return 0.0, False
    if counter is None:
        s = np.sort(ybar)
        start, length = _longest_window(s, spread)
    else:
        s = _counting_sort(ybar, counter)
        start, length = _count_window(s, spread, counter)
    if length < maj:
        return 0.0, True
    window = s[start : start + length]
    if robust:
        # offset form keeps an all-equal window bit-exact
        return float(window[0] + np.mean(window - window[0])), False
    # more than half of the run equals x_j exactly, so its middle element does
    return float(window[length // 2]), False


def _decode(mat, y, config: RecoveryConfig, robust: bool, workers: int | None,
            instrument: bool) -> DecodeResult:
    y = np.asarray(y, dtype=float)
    if y.shape != (mat.m,):
        raise ValueError(f"measurement vector must have length {mat.m}, got {y.shape}")
    if robust:
        spread = config.group_spread
    else:
        scale = float(np.abs(y).max(initial=0.0))
        spread = max(config.zero_tol, EQUALITY_RTOL * scale)
    zero_tol = config.zero_tol
    stats = DecodeStats()

    if instrument:
        counter = _Counter()
        idx, vals, failed = [], [], []
        for j in range(mat.n):
            ybar = reduced_vector(mat, y, j)
            stats.columns_visited += 1
            before = counter.n
            v, bad = _decode_column(ybar, zero_tol, spread, robust, counter)
            if counter.n - before > ybar.size:
                stats.columns_sorted += 1
            if bad:
                failed.append(j)
            elif v != 0.0:
                idx.append(j)
                vals.append(v)
        stats.comparisons = counter.n
        return DecodeResult(SparseVector(mat.n, idx, vals), failed, stats)

    sup = mat.supports
    maj = RecoveryConfig.majority(mat.q)
    # nu_j for every column at once: A^T applied to the indicator of |y| > zero_tol
    counts = mat.column_hits(np.abs(y) > zero_tol)

    def run(lo: int, hi: int):
        out = []
        for j in lo + np.flatnonzero(counts[lo:hi] >= maj):
            v, bad = _decode_column(y[sup[j]], zero_tol, spread, robust)
            out.append((int(j), v, bad))
        return hi - lo, out

    if workers and workers > 1:
        bounds = np.linspace(0, mat.n, workers + 1).astype(int)
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(run, bounds[:-1], bounds[1:]))
    else:
        parts = [run(0, mat.n)]

    idx, vals, failed = [], [], []
    for visited, out in parts:
        stats.columns_visited += visited
        stats.columns_sorted += len(out)
        for j, v, bad in out:
            if bad:
                failed.append(j)
            elif v != 0.0:
                idx.append(j)
                vals.append(v)
    return DecodeResult(SparseVector(mat.n, idx, vals), failed, stats)


def decode_exact(mat, y, config: RecoveryConfig = RecoveryConfig(), *, workers: int | None = None,
                 instrument: bool = False) -> DecodeResult:
    """Recover a sparse ``x`` from ``y = A x (+ shot noise)`` in one pass.

    A column is in the support when more than ``q/2`` of its reduced entries
    exceed ``config.zero_tol`` in magnitude; its value is then the common
    value of a run of more than ``q/2`` equal entries.  Floats count as equal
    within ``max(zero_tol, 2**-40 * max|y|)``.  Exact whenever
    ``q > 2(k(r-1) + M)``.

    Columns that pass the count test but have no majority run are listed in
    ``failures`` and left at zero.  ``workers`` splits the columns across
    threads; ``instrument=True`` runs a pure-Python per-column loop that
    counts comparisons.
    """
    return _decode(mat, y, config, robust=False, workers=workers, instrument=instrument)


def decode_robust(mat, y, config: RecoveryConfig = RecoveryConfig(), *, workers: int | None = None,
                  instrument: bool = False) -> DecodeResult:
    """Tolerance-based variant for nearly sparse signals and noisy measurements.

    Nonzero means ``|.| > zero_tol``; the group is the longest window of the
    sorted reduced vector with spread ``<= 2 * zero_tol`` and the estimate is
    its average.  If ``||x - x_d||_1 <= zero_tol`` and
    ``q > 2(k(r-1) + M)``, the support of ``x_d`` is recovered and every
    coordinate is within ``zero_tol``.
    """
    return _decode(mat, y, config, robust=True, workers=workers, instrument=instrument)
