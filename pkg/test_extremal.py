from fractions import Fraction

import mpmath
import pytest
from mpmath import mpf

from arith import bracket
from errors import BudgetExceededError
from extremal import (argmax_argmin, enumerate_bvectors, escape_bound, f0_value, f_value,
                      limit_m_infinity, limit_s_infinity, monotonicity_report)
from local_density import mu_ps_point
from models import BVector


def test_bvector_enumeration_order():
    vectors = [bv.b for bv in enumerate_bvectors(2, 2)]
    assert vectors == [(2, 2), (2, 1), (2, 0), (1, 1), (1, 0), (0, 0)]


def test_f_is_the_local_density():
    bv = BVector(2, (2, 1), 3, 1)
    assert f_value(3, bv) == mu_ps_point(3, 2, bv.n, 3, bv.to_achain())


def test_full_rank_values():
    assert f0_value(2, 2, 0) == Fraction(3, 8)
    assert f0_value(2, 2, 1) == Fraction(21, 32)
    assert f0_value(2, 2, 0) < f0_value(2, 2, 1)


def test_extrema_generic_case():
    result = argmax_argmin(3, 1, 3, 0)
    assert result.b_max.b == (0,)
    assert result.max_value == bracket(3, 3)
    assert result.b_min.b == (3,)
    assert result.min_value == Fraction(1, 3 ** 9)


def test_extrema_exception_at_two():
    result = argmax_argmin(2, 1, 3, 0)
    assert result.b_max.b == (1,)
    assert result.max_value == bracket(2, 3) ** 2 / (bracket(2, 1) * bracket(2, 2))


def test_extrema_tie():
    result = argmax_argmin(2, 1, 1, 0)
    assert sorted(bv.b for bv in result.maximizers) == [(0,), (1,)]
    assert result.max_value == Fraction(1, 2)
    document = result.to_json_dict()
    assert document['max'] == {'num': '1', 'den': '2'}


def test_extrema_over_small_ranges():
    for p in (2, 3, 5):
        for s in (1, 2, 3):
            for m in (1, 2, 3, 4):
                for n_prime in (0, 1, 2):
                    result = argmax_argmin(p, s, m, n_prime)
                    assert result.min_value == Fraction(1, p ** (s * (n_prime + m) * m))


def test_extrema_budget():
    with pytest.raises(BudgetExceededError):
        argmax_argmin(2, 3, 4, 0, budget=5)


def test_trailing_zeros_do_not_matter():
    for p in (2, 3):
        for n_prime in (0, 2):
            four = f_value(p, BVector(4, (2, 1, 0, 0), 3, n_prime))
            seven = f_value(p, BVector(7, (2, 1, 0, 0, 0, 0, 0), 3, n_prime))
            assert four == seven == limit_s_infinity(p, 3, n_prime, (2, 1))


def test_limit_in_m():
    for p, s, n_prime, b in [(2, 2, 1, (1, 0)), (3, 1, 0, (2,)), (2, 1, 0, (0,)), (5, 3, 2, (2, 2, 1))]:
        limit = limit_m_infinity(p, s, n_prime, b)
        value = f_value(p, BVector(s, b, 40, n_prime))
        assert abs(limit.value - mpf(value.numerator) / value.denominator) < 1e-9
    with pytest.raises(ValueError):
        limit_m_infinity(2, 2, 0, (1,))


def test_escape_bound():
    assert escape_bound(2, (3, 1)) == mpf(2) ** -4 * mpmath.exp(8)
    assert escape_bound(3, (1, 1, 1)) == mpf(3) ** -3 * mpmath.exp(8)
    with pytest.raises(ValueError):
        escape_bound(3, (0, 0))


def test_monotonicity_report_holds():
    report = monotonicity_report(ps=(2, 3), ss=(1, 2), ms=(1, 2, 3), n_primes=(0, 1))
    failed = [entry for entry in report if not entry['ok']]
    assert not failed, failed[:3]
    claims = {entry['claim'] for entry in report}
    assert {'f0-increasing-in-p', 'f0-increasing-in-n-prime', 'f0-decreasing-in-m',
            'f-matches-local-density', 'f-decreasing-in-n-prime', 'f-increasing-in-m',
            'f-below-escape-bound', 'f-independent-of-trailing-zeros',
            'lowering-interior-b-raises-f', 'raising-interior-b-lowers-f',
            'max-f-decreasing-in-p', 'max-f-decreasing-in-n-prime', 'max-f-decreasing-in-b'} <= claims


@pytest.mark.slow
def test_full_monotonicity_report():
    assert all(entry['ok'] for entry in monotonicity_report())


def test_f_below_escape_bound_everywhere():
    for p in (2, 3, 5):
        for s in (1, 2, 3, 4):
            for m in range(1, 7):
                for n_prime in (0, 1, 2, 3):
                    for bv in enumerate_bvectors(s, m, n_prime):
                        if bv.is_zero():
                            continue
                        value = f_value(p, bv)
                        assert mpf(value.numerator) / value.denominator < escape_bound(p, bv.b)
