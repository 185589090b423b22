from fractions import Fraction

import mpmath
import pytest
from mpmath import mpf

from arith import (ErrorBoundedReal, bracket, c_limit, factorize, is_prime, prime_power_parts,
                   primes_below, q_pochhammer, valuation, working_precision, zeta, zeta_product)
from errors import PrecisionError


def test_exact_real_has_no_error_for_integers():
    x = ErrorBoundedReal.exact(3)
    assert x.value == 3
    assert x.abs_error == 0


def test_arithmetic_keeps_true_value_inside_bounds():
    third = ErrorBoundedReal.exact(Fraction(1, 3))
    total = third + third + third
    assert total.contains(1)
    product = ErrorBoundedReal.exact(Fraction(1, 7)) * 7
    assert product.contains(1)
    assert (1 - third).contains(Fraction(2, 3))


def test_from_bounds_and_ordering():
    x = ErrorBoundedReal.from_bounds(mpf(1), mpf(2))
    y = ErrorBoundedReal.from_bounds(mpf(3), mpf(4))
    assert x.lower <= 1 and x.upper >= 2
    assert x.definitely_less(y)
    assert not y.definitely_less(x)


def test_reciprocal_of_interval_around_zero_fails():
    with pytest.raises(ZeroDivisionError):
        ErrorBoundedReal.from_bounds(mpf(-1), mpf(1)).reciprocal()


def test_integer_powers():
    x = ErrorBoundedReal.exact(Fraction(1, 2))
    assert (x ** 10).contains(Fraction(1, 1024))
    assert (x ** -3).contains(8)
    with pytest.raises(TypeError):
        x ** 0.5


def test_exp_and_log():
    one = ErrorBoundedReal.exact(1)
    assert one.exp().contains(mpmath.e)
    assert ErrorBoundedReal.exact(mpmath.e).log().contains(1)
    with pytest.raises(ValueError):
        ErrorBoundedReal.exact(-1).log()


def test_json_view():
    document = ErrorBoundedReal.exact(Fraction(1, 3)).to_json_dict(6)
    assert document['value'] == '0.333333'


def test_primes_below():
    assert primes_below(2) == []
    assert primes_below(20) == [2, 3, 5, 7, 11, 13, 17, 19]
    assert len(primes_below(1000)) == 168


def test_factorization_helpers():
    assert is_prime(97)
    assert not is_prime(91)
    assert factorize(360) == {2: 3, 3: 2, 5: 1}
    assert prime_power_parts(8) == (2, 3)
    assert prime_power_parts(7) == (7, 1)
    assert prime_power_parts(12) is None
    assert prime_power_parts(1) is None
    assert valuation(24, 2) == 3
    assert valuation(-45, 3) == 2
    with pytest.raises(ValueError):
        valuation(0, 2)
    with pytest.raises(ValueError):
        factorize(0)


def test_q_pochhammer_and_bracket():
    assert q_pochhammer(Fraction(1, 2), 0) == 1
    assert q_pochhammer(Fraction(1, 2), 2) == Fraction(1, 2) * Fraction(3, 4)
    assert bracket(2, 1) == Fraction(1, 2)
    assert bracket(2, 2) == Fraction(3, 8)
    assert bracket(3, 2) == Fraction(16, 27)


def test_c_limit_at_one_half():
    c2 = c_limit(Fraction(1, 2), 1e-20)
    assert abs(c2.reciprocal().value - mpf('3.46275')) < 1e-5
    assert c2.abs_error <= 1e-20


def test_working_precision_grows_with_tolerance():
    assert working_precision(1e-40) > working_precision(1e-10)


def test_zeta_methods_agree():
    pi2 = mpmath.pi ** 2 / 6
    assert zeta(2, 1e-25).contains(pi2)
    assert zeta(4, 1e-25).contains(mpmath.pi ** 4 / 90)
    assert zeta(3, 1e-6, method='euler').contains(mpmath.zeta(3))


def test_zeta_rejects_bad_input():
    with pytest.raises(ValueError):
        zeta(1)
    with pytest.raises(ValueError):
        zeta(2, method='nope')


def test_zeta_euler_gives_up_beyond_cutoff():
    from arith import _zeta_euler
    with pytest.raises(PrecisionError):
        _zeta_euler(2, mpf('1e-30'), max_cutoff=10**4)


def test_inverse_zeta_product():
    value = zeta_product(2, None, 1e-12).reciprocal()
    assert abs(value.value - mpf('0.435757')) < 1e-6
    assert zeta_product(5, 4).value == 1


@pytest.mark.parametrize('t', [Fraction(1, 2), Fraction(1, 3), Fraction(1, 5)])
@pytest.mark.parametrize('tol', [1e-6, 1e-10, 1e-20])
def test_c_limit_interval_contains_refined_value(t, tol):
    coarse = c_limit(t, tol)
    fine = c_limit(t, tol / 100)
    assert coarse.abs_error <= tol
    assert coarse.contains(fine.value)
    assert coarse.contains(c_limit(t, 1e-60).value)


def test_c_limit_lower_bounds():
    for t in (Fraction(1, 2), Fraction(1, 3), Fraction(1, 5)):
        x = mpf(t.numerator) / t.denominator
        assert c_limit(t, 1e-20).lower >= mpmath.exp(-2 * x / (1 - x))
    assert c_limit(Fraction(1, 101), 1e-20).lower > mpf('0.98')


def test_zeta_series_and_euler_within_twice_tol():
    tol = 1e-8
    for i in (3, 4, 5):
        series = zeta(i, tol)
        euler = zeta(i, tol, method='euler')
        assert abs(series.value - euler.value) <= 2 * tol


def test_zeta_strictly_decreasing():
    values = [zeta(i, 1e-20) for i in range(2, 16)]
    for larger, smaller in zip(values, values[1:]):
        assert smaller.definitely_less(larger)
