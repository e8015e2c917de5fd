import itertools

import numpy as np
import pytest

ACCEPTANCE_RESULTS: dict[str, tuple[bool, str]] = {}


def dense_devore(q: int, r: int, n: int | None = None) -> np.ndarray:
    """Reference q^2 x n matrix straight from the definition: row (x, a(x)) of column a.

    Polynomials are enumerated with itertools.product and evaluated as plain
    power sums, independently of the package's Horner / digit code.
    """
    cols = []
    for digits in itertools.product(range(q), repeat=r):
        coeffs = digits[::-1]  # product varies the last digit fastest -> little-endian
        col = np.zeros(q * q)
        for x in range(q):
            val = sum(c * x**i for i, c in enumerate(coeffs)) % q
            col[x * q + val] = 1
        cols.append(col)
    a = np.array(cols).T
    return a if n is None else a[:, :n]


@pytest.fixture(scope="session")
def dense_oracle():
    cache = {}

    def get(q, r, n=None):
        if (q, r) not in cache:
            cache[q, r] = dense_devore(q, r)
        a = cache[q, r]
        return a if n is None else a[:, :n]

    return get


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE_RESULTS, key=lambda s: int(s.split()[0].rstrip("."))):
        ok, detail = ACCEPTANCE_RESULTS[name]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
