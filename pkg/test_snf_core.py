import random

import pytest

from errors import BudgetExceededError
from models import IntegerMatrix, SnfDiagonal
from snf_core import (local_valuations, minor_count, minors_gcd_profile, normalize_diagonal,
                      snf_integer, snf_mod)


@pytest.fixture
def rng():
    return random.Random(20240611)


def _random_matrix(rng, n, m, bound=9):
    return IntegerMatrix.from_rows([[rng.randint(-bound, bound) for _ in range(m)] for _ in range(n)])


def test_snf_of_diagonal_repairs_divisibility():
    matrix = IntegerMatrix.from_rows([[2, 0], [0, 3]])
    assert snf_integer(matrix).diag == (1, 6)


def test_snf_small_examples():
    assert snf_integer(IntegerMatrix.from_rows([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])).diag == (2, 6, 12)
    assert snf_integer(IntegerMatrix.zeros(2, 3)).diag == (0, 0)
    assert snf_integer(IntegerMatrix.identity(3)).diag == (1, 1, 1)
    assert snf_integer(IntegerMatrix.from_rows([[6, 10]])).diag == (2,)


def test_snf_rank_deficient():
    result = snf_integer(IntegerMatrix.from_rows([[1, 2], [2, 4], [3, 6]]))
    assert result.diag == (1, 0)
    assert result.rank == 1


def test_snf_matches_minor_gcds(rng):
    for _ in range(60):
        n, m = rng.randint(1, 4), rng.randint(1, 4)
        matrix = _random_matrix(rng, n, m)
        assert snf_integer(matrix) == minors_gcd_profile(matrix).diagonal(n, m)


def test_snf_invariant_under_transpose(rng):
    for _ in range(30):
        matrix = _random_matrix(rng, 3, 2)
        assert snf_integer(matrix).diag == snf_integer(matrix.transpose()).diag


def test_snf_mod_prime_power():
    matrix = IntegerMatrix.from_rows([[2, 0], [0, 4]])
    assert snf_mod(matrix, 8).diag == (2, 4)
    assert snf_mod(matrix, 4).diag == (2, 0)
    assert snf_mod(matrix, 2).diag == (0, 0)


def test_snf_mod_composite_normalizes_to_divisors():
    matrix = IntegerMatrix.from_rows([[6, 0], [0, 4]])
    assert snf_mod(matrix, 12).diag == (2, 0)
    with pytest.raises(ValueError):
        snf_mod(matrix, 1)


def test_snf_mod_agrees_with_integer_snf(rng):
    for q in (4, 9, 12, 27):
        for _ in range(20):
            matrix = _random_matrix(rng, 3, 3, 30)
            expected = normalize_diagonal(snf_integer(matrix).diag, q)
            assert snf_mod(matrix, q).diag == expected


def test_local_valuations():
    assert local_valuations([[3, 0], [0, 9]], 3, 3) == (1, 2)
    assert local_valuations([[0, 0], [0, 0]], 5, 2) == (2, 2)


def test_normalize_diagonal():
    assert normalize_diagonal((1, 6, 0), 12) == (1, 6, 0)
    assert normalize_diagonal((2, 24, 36), 12) == (2, 0, 0)


def test_minor_profile():
    profile = minors_gcd_profile(IntegerMatrix.from_rows([[2, 4, 4], [-6, 6, 12], [10, -4, -16]]))
    assert profile.g == (2, 12, 144)
    assert profile.invariant_factors() == (2, 6, 12)


def test_minor_budget():
    assert minor_count(3, 3) == 9 + 9 + 1
    with pytest.raises(BudgetExceededError):
        minors_gcd_profile(IntegerMatrix.identity(4), budget=10)


def test_diagonal_validation():
    with pytest.raises(ValueError):
        SnfDiagonal(2, 2, (2, 3))
    with pytest.raises(ValueError):
        SnfDiagonal(2, 2, (0, 1))


def _multiply(left, right):
    a, b = left.to_rows(), right.to_rows()
    return IntegerMatrix.from_rows([[sum(a[i][t] * b[t][j] for t in range(len(b))) for j in range(len(b[0]))]
                                    for i in range(len(a))])


def _random_unimodular(rng, size, steps=12):
    rows = IntegerMatrix.identity(size).to_rows()
    for _ in range(steps):
        i, j = rng.sample(range(size), 2) if size > 1 else (0, 0)
        move = rng.choice(('add', 'swap', 'negate'))
        if move == 'add' and i != j:
            factor = rng.randint(-3, 3)
            rows[i] = [x + factor * y for x, y in zip(rows[i], rows[j])]
        elif move == 'swap':
            rows[i], rows[j] = rows[j], rows[i]
        else:
            rows[i] = [-x for x in rows[i]]
    return IntegerMatrix.from_rows(rows)


def test_snf_invariant_under_unimodular_change_of_basis(rng):
    for _ in range(40):
        n, m = rng.randint(1, 4), rng.randint(1, 4)
        matrix = _random_matrix(rng, n, m)
        changed = _multiply(_multiply(_random_unimodular(rng, n), matrix), _random_unimodular(rng, m))
        assert snf_integer(changed).diag == snf_integer(matrix).diag


def test_snf_matches_minor_gcds_on_many_small_matrices(rng):
    for trial in range(10_000):
        matrix = _random_matrix(rng, 2, 2 + trial % 2)
        assert snf_integer(matrix) == minors_gcd_profile(matrix).diagonal(matrix.rows, matrix.cols)


def test_snf_mod_composite_splits_over_coprime_factors(rng):
    for _ in range(200):
        matrix = _random_matrix(rng, 3, 3, 40)
        diag = snf_mod(matrix, 12).diag
        assert normalize_diagonal(diag, 4) == snf_mod(matrix, 4).diag
        assert normalize_diagonal(diag, 3) == snf_mod(matrix, 3).diag
