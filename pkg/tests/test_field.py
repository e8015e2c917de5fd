import itertools

import pytest
from hypothesis import given, strategies as st

from binarycs.field import (PrimeField, Poly, coefficient_table, evaluation_table, index_to_poly,
                            is_prime, poly_eval, poly_to_index)


@pytest.mark.parametrize("x, expected", [(1, False), (2, True), (3, True), (4, False), (29, True),
                                         (33, False), (49, False), (7919, True), (7917, False)])
def test_is_prime(x, expected):
    assert is_prime(x) is expected


def test_is_prime_matches_sieve():
    limit = 2000
    sieve = [True] * limit
    sieve[0] = sieve[1] = False
    for p in range(2, limit):
        if sieve[p]:
            for mult in range(p * p, limit, p):
                sieve[mult] = False
    assert [is_prime(x) for x in range(1, limit)] == sieve[1:]


def test_is_prime_rejects_nonpositive():
    with pytest.raises(ValueError):
        is_prime(0)


@pytest.mark.parametrize("q", [0, 1, 4, 9, 15])
def test_field_rejects_non_prime(q):
    with pytest.raises(ValueError):
        PrimeField(q)


def test_field_rejects_huge_modulus():
    with pytest.raises(ValueError):
        PrimeField(65537)


def test_reference_example_polynomial():
    f3 = PrimeField(3)
    a = Poly((1, 2, 1, 1), 3)  # 1 + 2x + x^2 + x^3
    assert poly_eval(a, 0, f3) == 1
    assert poly_eval(a, 1, f3) == 2
    assert poly_eval(a, 2, f3) == 2


def test_zero_polynomial():
    f = PrimeField(7)
    zero = Poly((0, 0, 0), 7)
    assert all(poly_eval(zero, x, f) == 0 for x in f.elements())


def test_poly_eval_domain_error():
    with pytest.raises(ValueError):
        poly_eval(Poly((1, 1), 5), 5, PrimeField(5))


def test_poly_rejects_bad_coefficient():
    with pytest.raises(ValueError):
        Poly((0, 3), 3)


def test_index_to_poly_examples():
    assert index_to_poly(0, 3, 4).coeffs == (0, 0, 0, 0)
    assert index_to_poly(3**2 - 1, 3, 2).coeffs == (2, 2)
    p = index_to_poly(5, 3, 2)
    assert p.coeffs == (2, 1)
    assert p.coeffs[0] + 3 * p.coeffs[1] == 5


def test_index_to_poly_range():
    with pytest.raises(IndexError):
        index_to_poly(27, 3, 3)


@pytest.mark.parametrize("q, r", [(2, 3), (3, 4), (5, 3), (7, 4), (11, 3), (97, 2)])
def test_round_trip_exhaustive(q, r):
    assert q**r <= 10**4
    for j in range(q**r):
        assert poly_to_index(index_to_poly(j, q, r)) == j


@given(st.sampled_from([5, 7, 11, 13, 29, 101]), st.integers(2, 4), st.data())
def test_round_trip_sampled(q, r, data):
    j = data.draw(st.integers(0, q**r - 1))
    assert poly_to_index(index_to_poly(j, q, r)) == j


@pytest.mark.parametrize("q", [2, 3, 5, 7])
def test_field_laws_exhaustive(q):
    f = PrimeField(q)
    els = list(f.elements())
    for a, b in itertools.product(els, repeat=2):
        assert f.add(a, b) == f.add(b, a)
        assert f.mul(a, b) == f.mul(b, a)
        assert f.add(a, f.neg(a)) == 0
    for a, b, c in itertools.product(els, repeat=3):
        assert f.add(f.add(a, b), c) == f.add(a, f.add(b, c))
        assert f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c))
        assert f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c))
    for a in els[1:]:
        assert f.mul(a, f.inv(a)) == 1


@pytest.mark.parametrize("q, r", [(3, 2), (3, 3), (5, 2), (5, 3)])
def test_distinct_polys_agree_on_few_points(q, r):
    f = PrimeField(q)
    graphs = [tuple(poly_eval(index_to_poly(j, q, r), x, f) for x in range(q)) for j in range(q**r)]
    for g1, g2 in itertools.combinations(graphs, 2):
        assert sum(u == v for u, v in zip(g1, g2)) <= r - 1


@pytest.mark.parametrize("q, r", [(3, 4), (5, 3), (13, 3)])
def test_vectorised_tables_match_scalar(q, r):
    f = PrimeField(q)
    idx = list(range(0, q**r, max(1, q**r // 200)))
    coeffs = coefficient_table(idx, q, r)
    vals = evaluation_table(coeffs, q)
    for row, j in enumerate(idx):
        p = index_to_poly(j, q, r)
        assert tuple(coeffs[row]) == p.coeffs
        assert [poly_eval(p, x, f) for x in range(q)] == vals[row].tolist()
