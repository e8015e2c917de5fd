"""Measurement budgets: the prime ``q`` (and ``m = q**2``) each decoder needs.

All three decoders use the same polynomial-graph matrix with ``r = 3`` and
``n <= q**3`` columns; they differ in how large ``q`` must be for sparsity
``k``:

* ``new``      -- single-pass majority vote, ``q > 2(k(r-1) + M)``
* ``l1``       -- basis pursuit via RIP, ``(ceil(t k) - 1)(r-1)/q < delta``
* ``expander`` -- gap voting, ``beta = (r-1)(2k-1)/q <= 1/4`` i.e. ``q >= 8(2k-1)``
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction

from .field import is_prime

# a plan is only worth having if it actually compresses
MAX_COMPRESSION_RATIO = 0.9

METHODS = ("l1", "expander", "new")


def smallest_prime_geq(x) -> int:
    if x < 2:
        raise ValueError(f"smallest_prime_geq expects x >= 2, got {x}")
    p = math.ceil(x)
    while not is_prime(p):
        p += 1
    return p


def icbrt_ceil(n: int) -> int:
    """Smallest integer ``c`` with ``c**3 >= n``."""
    c = max(1, round(n ** (1 / 3)))
    while c**3 < n:
        c += 1
    while c > 1 and (c - 1) ** 3 >= n:
        c -= 1
    return c


@dataclass(frozen=True)
class Plan:
    method: str
    q: int
    n: int
    k: int
    M: int = 0
    r: int = 3

    @property
    def m(self) -> int:
        return self.q * self.q

    @property
    def feasible(self) -> bool:
        return self.m <= MAX_COMPRESSION_RATIO * self.n

    @property
    def diagnostic(self) -> str:
        if self.feasible:
            return ""
        return (f"{self.method}: m = q^2 = {self.m} is not below {MAX_COMPRESSION_RATIO:g} n "
                f"(n = {self.n}); the number of measurements would match or exceed the dimension")


def _first_prime(lower: int, ok) -> int:
    q = smallest_prime_geq(max(lower, 2))
    while not ok(q):
        q = smallest_prime_geq(q + 1)
    return q


def plan_new(n: int, k: int, M: int = 0, r: int = 3) -> Plan:
    if k < 1:
        raise ValueError("k must be >= 1")
    bound = 2 * (k * (r - 1) + M)
    q = _first_prime(max(bound + 1, icbrt_ceil(n)), lambda p: p > bound)
    return Plan("new", q, n, k, M, r)


def plan_l1(n: int, k: int, r: int = 3, t=Fraction(3, 2), delta_target=Fraction(1, 2)) -> Plan:
    """Smallest prime with ``(ceil(t k) - 1)(r-1)/q < delta_target`` and ``q**3 >= n``."""
    t, delta_target = Fraction(t), Fraction(delta_target)
    if t <= 1:
        raise ValueError("t must exceed 1")
    order = math.ceil(t * k)
    num = Fraction((order - 1) * (r - 1))
    q = _first_prime(icbrt_ceil(n), lambda p: num / p < delta_target)
    return Plan("l1", q, n, k, 0, r)


def plan_expander(n: int, k: int, r: int = 3) -> Plan:
    """Smallest prime with ``(r-1)(2k-1)/q <= 1/4``, the expansion needed at ``h = 2k``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    bound = 4 * (r - 1) * (2 * k - 1)
    q = smallest_prime_geq(max(bound, icbrt_ceil(n), 2))
    return Plan("expander", q, n, k, 0, r)


def plan_table(n: int, k_list, M: int = 0, r: int = 3) -> list[Plan]:
    rows = []
    for k in k_list:
        rows.append(plan_l1(n, k, r))
        rows.append(plan_expander(n, k, r))
        rows.append(plan_new(n, k, M, r))
    return rows


def plans_to_csv(plans) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["method", "q", "m", "feasible"])
    for p in plans:
        w.writerow([p.method, p.q, p.m, str(p.feasible).lower()])
    return buf.getvalue()


# --- random constructions, for comparison ----------------------------------


@dataclass(frozen=True)
class SubGaussianParams:
    c: float = 0.5
    delta: float = 0.5
    xi: float = 1e-9
    k: int = 1
    n: int = 2

    def __post_init__(self):
        if self.c <= 0:
            raise ValueError("c must be positive")
        if not (0 < self.delta < 1 and 0 < self.xi < 1):
            raise ValueError("delta and xi must lie in (0, 1)")

    @property
    def gamma(self) -> float:
        return 2.0

    @property
    def zeta(self) -> float:
        return 1.0 / (4.0 * self.c)

    @property
    def alpha_sg(self) -> float:
        return self.gamma * math.exp(-self.zeta) + math.exp(self.zeta)

    @property
    def beta_sg(self) -> float:
        return self.zeta

    @property
    def c_tilde(self) -> float:
        return self.beta_sg**2 / (2.0 * (2.0 * self.alpha_sg + self.beta_sg))


def subgaussian_m(params: SubGaussianParams) -> int:
    """Rows for an i.i.d. sub-Gaussian matrix to have RIP(k, delta) w.p. ``>= 1 - xi``."""
    k, n = params.k, params.n
    bracket = (4 / 3) * k * math.log(math.e * n / k) + 14 * k / 3 + (4 / 3) * math.log(2 / params.xi)
    return math.ceil(bracket / (params.c_tilde * params.delta**2))


def table_subgaussian_m(n: int, k: int, c: float = 0.5, xi: float = 1e-9,
                        t=Fraction(3, 2), delta: float = 0.5) -> int:
    """The sub-Gaussian row count at the RIP order ``ceil(t k)`` and constant used for ``plan_l1``."""
    order = math.ceil(Fraction(t) * k)
    return subgaussian_m(SubGaussianParams(c=c, delta=delta, xi=xi, k=order, n=n))


def random_expander_params(beta: float, eps: float, K: int, n: int) -> tuple[int, int]:
    """Left degree ``d`` and outputs ``m`` making most ``d``-left-regular graphs ``(K, 1-beta)``-expanders."""
    if not 0 < beta < 1:
        raise ValueError("beta must lie in (0, 1)")
    if not 0 < eps < 0.5:
        raise ValueError("eps must lie in (0, 0.5)")
    d = math.ceil(math.log(math.e * n / (2 * eps)) / beta)
    m = math.ceil(math.exp(2 / beta) * d * K)
    return d, m
