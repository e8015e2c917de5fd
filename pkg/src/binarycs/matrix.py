"""Binary measurement matrices built from graphs of polynomials over F_q.

Column ``j`` of the ``q**2 x n`` matrix is the indicator of the graph
``{(x, a_j(x)) : x in F_q}`` of the ``j``-th polynomial of degree ``< r``;
the pair ``(x, v)`` is row ``x*q + v``.  Nothing ``m x n`` is ever stored:
the matrix is represented by its ``n x q`` table of column supports.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .field import PrimeField, coefficient_table, evaluation_table, index_to_poly, poly_eval
from .sparse import SparseVector

EXHAUSTIVE_PAIR_LIMIT = 2_000
BRUTEFORCE_SET_LIMIT = 1_000_000
DEFAULT_SAMPLED_PAIRS = 100_000


@dataclass(frozen=True, eq=False)
class DeVoreMatrix:
    q: int
    r: int = 3
    n: int | None = None

    def __post_init__(self):
        PrimeField(self.q)
        if self.r < 2:
            raise ValueError(f"degree bound r must be >= 2, got {self.r}")
        full = self.q**self.r
        if self.n is None:
            object.__setattr__(self, "n", full)
        if not 1 <= self.n <= full:
            raise ValueError(f"n={self.n} must lie in [1, q**r={full}]")

    @property
    def m(self) -> int:
        return self.q * self.q

    @property
    def shape(self) -> tuple[int, int]:
        return (self.m, self.n)

    @property
    def field(self) -> PrimeField:
        return PrimeField(self.q)

    def __repr__(self):
        return f"DeVoreMatrix(q={self.q}, r={self.r}, n={self.n})"

    @cached_property
    def values_table(self) -> np.ndarray:
        """``[j, x] -> a_j(x)`` for every used column, shape ``(n, q)``."""
        coeffs = coefficient_table(np.arange(self.n), self.q, self.r)
        return evaluation_table(coeffs, self.q)

    @cached_property
    def supports(self) -> np.ndarray:
        """Row indices of the ones of every column, shape ``(n, q)``, rows increasing."""
        return self.values_table + self.q * np.arange(self.q, dtype=np.int64)

    @cached_property
    def row_columns(self) -> tuple[np.ndarray, np.ndarray]:
        """CSR-style ``(indptr, columns)``: the columns with a one in each row."""
        rows = self.supports.ravel()
        order = np.argsort(rows, kind="stable")
        cols = np.repeat(np.arange(self.n, dtype=np.int64), self.q)[order]
        indptr = np.zeros(self.m + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=self.m), out=indptr[1:])
        return indptr, cols

    def column_hits(self, mask) -> np.ndarray:
        """``A^T mask`` for a boolean row mask: per column, how many of its rows are set."""
        mask = np.asarray(mask, dtype=bool)
        live = np.flatnonzero(mask)
        # walking the set rows costs ~live*n/q versus n*q for the gather
        if live.size < self.m // 2:
            indptr, cols = self.row_columns
            starts, stops = indptr[live], indptr[live + 1]
            lengths = stops - starts
            offsets = np.repeat(starts - np.cumsum(lengths) + lengths, lengths)
            picked = cols[offsets + np.arange(lengths.sum())]
            return np.bincount(picked, minlength=self.n)
        return mask[self.supports].sum(axis=1)

    def column_support(self, j: int) -> np.ndarray:
        self._check_column(j)
        if "supports" in self.__dict__:
            return self.supports[j].copy()
        a = index_to_poly(int(j), self.q, self.r)
        fld = self.field
        return np.array([l * self.q + poly_eval(a, l, fld) for l in range(self.q)], dtype=np.int64)

    def _check_column(self, j):
        if not 0 <= j < self.n:
            raise IndexError(f"column {j} outside [0, {self.n})")

    def encode(self, x: SparseVector | np.ndarray) -> np.ndarray:
        """``y = A x`` by scattering each nonzero of ``x`` into its ``q`` rows.

        A dense length-``n`` array is accepted too.
        """
        if not isinstance(x, SparseVector):
            x = np.asarray(x, dtype=float)
            if x.shape != (self.n,):
                raise ValueError(f"vector shape {x.shape} does not match matrix with n={self.n}")
            x = SparseVector.from_dense(x)
        if x.n != self.n:
            raise ValueError(f"vector dimension {x.n} does not match matrix with n={self.n}")
        y = np.zeros(self.m)
        for j, v in zip(x.indices, x.values):
            y[self.column_support(int(j))] += v
        return y

    def column_inner_product(self, j: int, t: int) -> int:
        self._check_column(j)
        self._check_column(t)
        return int(np.intersect1d(self.column_support(j), self.column_support(t)).size)

    def to_sparse(self) -> sp.csc_matrix:
        """The ``m x n`` 0/1 matrix in CSC form (each column holds ``q`` ones)."""
        indptr = np.arange(0, self.n * self.q + 1, self.q)
        data = np.ones(self.n * self.q)
        return sp.csc_matrix((data, self.supports.ravel(), indptr), shape=self.shape)

    # --- serialisation -------------------------------------------------

    def spec_string(self) -> str:
        return f"q={self.q},r={self.r},n={self.n}"

    @classmethod
    def from_spec(cls, spec: str) -> "DeVoreMatrix":
        """Parse ``"q=29,r=3,n=20000"`` or load an exported CSV file."""
        path = Path(spec)
        if path.is_file():
            return cls.load_csv(path)
        params = dict(re.findall(r"([qrn])\s*=\s*(\d+)", spec))
        if "q" not in params:
            raise ValueError(f"cannot parse matrix spec {spec!r}; expected 'q=<prime>,r=<int>,n=<int>'")
        return cls(int(params["q"]), int(params.get("r", 3)), int(params["n"]) if "n" in params else None)

    def write_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(f"# devore q={self.q} r={self.r} n={self.n}\n")
            for j, rows in enumerate(self.supports):
                fh.write(f"{j}," + ",".join(map(str, rows)) + "\n")

    @classmethod
    def load_csv(cls, path) -> "DeVoreMatrix":
        with open(path) as fh:
            header = fh.readline()
            m = re.match(r"#\s*devore\s+q=(\d+)\s+r=(\d+)\s+n=(\d+)", header)
            if not m:
                raise ValueError(f"{path}: missing '# devore q=.. r=.. n=..' header")
            mat = cls(int(m.group(1)), int(m.group(2)), int(m.group(3)))
            rows = np.loadtxt(fh, delimiter=",", dtype=np.int64, ndmin=2)
        if rows.shape != (mat.n, mat.q + 1) or not np.array_equal(rows[:, 0], np.arange(mat.n)):
            raise ValueError(f"{path}: body does not list columns 0..{mat.n - 1}")
        if not np.array_equal(rows[:, 1:], mat.supports):
            raise ValueError(f"{path}: column supports do not match q={mat.q}, r={mat.r}")
        return mat


# --- verification ------------------------------------------------------


@dataclass
class AssumptionReport:
    mode: str
    pairs_checked: int
    max_inner_product: int
    violations: int
    bad_columns: list[int] = field(default_factory=list)
    example_violation: tuple[int, int] | None = None

    @property
    def ok(self) -> bool:
        return self.violations == 0 and not self.bad_columns


def _column_structure_errors(mat) -> list[int]:
    sup = np.asarray(mat.supports)
    q = mat.q
    in_block = (sup // q) == np.arange(q)
    in_range = (sup >= 0) & (sup < q * q)
    return np.flatnonzero(~(in_block & in_range).all(axis=1)).tolist()


def verify_main_assumption(mat, mode: str = "sampled", count: int = DEFAULT_SAMPLED_PAIRS,
                           seed: int | None = None) -> AssumptionReport:
    """Check column weight ``q`` and pairwise inner products ``<= r-1``.

    ``mode="exhaustive"`` checks every pair and is refused above
    ``EXHAUSTIVE_PAIR_LIMIT`` columns; ``mode="sampled"`` draws ``count``
    distinct-column pairs from a generator seeded with ``seed``.
    """
    bad_cols = _column_structure_errors(mat)
    limit = mat.r - 1
    if mode == "exhaustive":
        if mat.n > EXHAUSTIVE_PAIR_LIMIT:
            raise ValueError(
                f"exhaustive check refused: n={mat.n} > {EXHAUSTIVE_PAIR_LIMIT} "
                "(quadratic in n); use sampled mode"
            )
        a = _incidence(mat)
        gram = (a.T @ a).toarray().astype(np.int64)
        np.fill_diagonal(gram, -1)
        iu = np.triu_indices(mat.n, 1)
        ips = gram[iu]
        over = np.flatnonzero(ips > limit)
        example = (int(iu[0][over[0]]), int(iu[1][over[0]])) if over.size else None
        return AssumptionReport("exhaustive", ips.size, int(ips.max(initial=0)), int(over.size),
                                bad_cols, example)
    if mode != "sampled":
        raise ValueError(f"unknown verification mode {mode!r}")
    if seed is None:
        raise ValueError("sampled verification needs an explicit seed")
    if mat.n < 2:
        return AssumptionReport("sampled", 0, 0, 0, bad_cols)
    rng = np.random.default_rng(seed)
    j = rng.integers(0, mat.n, size=count)
    t = (j + rng.integers(1, mat.n, size=count)) % mat.n
    sup = np.asarray(mat.supports)
    ips = (sup[j] == sup[t]).sum(axis=1)
    over = np.flatnonzero(ips > limit)
    example = (int(j[over[0]]), int(t[over[0]])) if over.size else None
    return AssumptionReport("sampled", count, int(ips.max()), int(over.size), bad_cols, example)


def _incidence(mat) -> sp.csc_matrix:
    sup = np.asarray(mat.supports)
    n, q = sup.shape
    return sp.csc_matrix((np.ones(n * q), sup.ravel(), np.arange(0, n * q + 1, q)),
                         shape=(mat.q * mat.q, n))


def expander_beta(mat, h: int) -> Fraction:
    """Expansion defect of the graph of ``mat`` for input sets of size ``<= h``.

    The graph is an ``(h, 1 - beta)``-expander with
    ``beta = (r-1)(h-1)/q`` whenever ``h < q/(r-1) + 1``.
    """
    if h < 1 or not Fraction(h) < Fraction(mat.q, mat.r - 1) + 1:
        raise ValueError(f"h={h} outside [1, q/(r-1)+1) = [1, {mat.q / (mat.r - 1) + 1:g})")
    return Fraction((mat.r - 1) * (h - 1), mat.q)


@dataclass
class ExpansionReport:
    max_set_size: int
    sets_checked: int
    min_ratio: float
    worst_set: tuple[int, ...]


def verify_expansion_bruteforce(mat, K: int, chunk: int = 20_000) -> ExpansionReport:
    """Minimum of ``|N(S)| / (q |S|)`` over every input set with ``1 <= |S| <= K``."""
    total = sum(math.comb(mat.n, s) for s in range(1, K + 1))
    if total > BRUTEFORCE_SET_LIMIT:
        raise ValueError(f"brute-force expansion refused: {total} sets > {BRUTEFORCE_SET_LIMIT}")
    sup = np.asarray(mat.supports)
    best, worst = math.inf, ()
    for s in range(1, K + 1):
        combos = itertools.combinations(range(mat.n), s)
        while True:
            block = np.fromiter(itertools.chain.from_iterable(itertools.islice(combos, chunk)),
                                dtype=np.int64)
            if block.size == 0:
                break
            block = block.reshape(-1, s)
            rows = np.sort(sup[block].reshape(block.shape[0], -1), axis=1)
            sizes = 1 + (np.diff(rows, axis=1) != 0).sum(axis=1)
            ratios = sizes / (mat.q * s)
            i = int(np.argmin(ratios))
            if ratios[i] < best:
                best, worst = float(ratios[i]), tuple(int(c) for c in block[i])
    return ExpansionReport(K, total, best, worst)


def rip_constant_bound(mat, k: int) -> Fraction:
    """Upper bound ``(k-1)(r-1)/q`` on the order-``k`` RIP constant of ``A / sqrt(q)``."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return Fraction((k - 1) * (mat.r - 1), mat.q)


def empirical_rip_constant(mat, k: int, max_subsets: int = BRUTEFORCE_SET_LIMIT) -> float:
    """Exact ``max |lambda - 1|`` over the Gram spectra of all ``k``-column submatrices of ``A/sqrt(q)``."""
    if math.comb(mat.n, k) > max_subsets:
        raise ValueError(f"{math.comb(mat.n, k)} subsets exceed the limit {max_subsets}")
    a = _incidence(mat)
    gram = (a.T @ a).toarray() / mat.q
    worst = 0.0
    for cols in itertools.combinations(range(mat.n), k):
        ev = np.linalg.eigvalsh(gram[np.ix_(cols, cols)])
        worst = max(worst, float(np.abs(ev - 1).max()))
    return worst
