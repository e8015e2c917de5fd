"""Prime-field arithmetic and the column-index <-> polynomial bijection.

Field elements are plain ints in ``[0, q-1]``.  A polynomial of degree at
most ``r-1`` is stored as its ``r`` coefficients, lowest power first, and
column ``j`` of the measurement matrix is the polynomial whose coefficients
are the base-``q`` digits of ``j``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import isqrt
from typing import Sequence

import numpy as np

MAX_MODULUS = 2**16


def is_prime(x: int) -> bool:
    if x < 1:
        raise ValueError(f"is_prime expects x >= 1, got {x}")
    if x < 2:
        return False
    if x < 4:
        return True
    if x % 2 == 0:
        return False
    for d in range(3, isqrt(x) + 1, 2):
        if x % d == 0:
            return False
    return True


@dataclass(frozen=True)
class PrimeField:
    q: int

    def __post_init__(self):
        if not isinstance(self.q, (int, np.integer)) or self.q < 2:
            raise ValueError(f"field modulus must be an integer >= 2, got {self.q!r}")
        if self.q > MAX_MODULUS:
            raise ValueError(f"field modulus {self.q} exceeds {MAX_MODULUS}")
        if not is_prime(int(self.q)):
            raise ValueError(f"field modulus must be prime, got {self.q}")

    def check(self, a: int) -> int:
        if not 0 <= a < self.q:
            raise ValueError(f"{a} is not an element of F_{self.q}")
        return int(a)

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.q

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.q

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.q

    def neg(self, a: int) -> int:
        return (-a) % self.q

    def inv(self, a: int) -> int:
        if a % self.q == 0:
            raise ZeroDivisionError("zero has no inverse")
        return pow(int(a), -1, self.q)

    def elements(self) -> range:
        return range(self.q)


@dataclass(frozen=True)
class Poly:
    """Polynomial over F_q with exactly ``r`` coefficients (``coeffs[i]`` multiplies x**i)."""

    coeffs: tuple[int, ...]
    q: int

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))
        for c in self.coeffs:
            if not 0 <= c < self.q:
                raise ValueError(f"coefficient {c} outside [0, {self.q - 1}]")

    @property
    def r(self) -> int:
        return len(self.coeffs)

    def __call__(self, x: int) -> int:
        return poly_eval(self, x, PrimeField(self.q))


def poly_eval(p: Poly | Sequence[int], x: int, field: PrimeField) -> int:
    """Horner evaluation of ``p`` at ``x``, reduced mod ``field.q``."""
    x = field.check(x)
    coeffs = p.coeffs if isinstance(p, Poly) else p
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * x + c) % field.q
    return acc


def index_to_poly(j: int, q: int, r: int) -> Poly:
    if not 0 <= j < q**r:
        raise IndexError(f"column index {j} outside [0, {q}**{r})")
    digits = []
    for _ in range(r):
        j, d = divmod(j, q)
        digits.append(d)
    return Poly(tuple(digits), q)


def poly_to_index(p: Poly) -> int:
    j = 0
    for c in reversed(p.coeffs):
        j = j * p.q + c
    return j


def coefficient_table(indices: np.ndarray, q: int, r: int) -> np.ndarray:
    """Base-q digits of every index, shape ``(len(indices), r)``."""
    indices = np.asarray(indices, dtype=np.int64)
    if indices.size and (indices.min() < 0 or indices.max() >= q**r):
        raise IndexError(f"column index outside [0, {q}**{r})")
    out = np.empty((indices.size, r), dtype=np.int64)
    rem = indices.copy()
    for i in range(r):
        rem, out[:, i] = np.divmod(rem, q)
    return out


def evaluation_table(coeffs: np.ndarray, q: int) -> np.ndarray:
    """Evaluate each row of ``coeffs`` at every point of F_q (vectorised Horner).

    Returns an array of shape ``(len(coeffs), q)`` whose entry ``[j, x]`` is
    ``a_j(x)``.
    """
    coeffs = np.asarray(coeffs, dtype=np.int64)
    xs = np.arange(q, dtype=np.int64)
    acc = np.zeros((coeffs.shape[0], q), dtype=np.int64)
    for i in range(coeffs.shape[1] - 1, -1, -1):
        acc = (acc * xs + coeffs[:, i : i + 1]) % q
    return acc
