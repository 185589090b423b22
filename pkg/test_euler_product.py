from fractions import Fraction

import mpmath
import pytest

from arith import ErrorBoundedReal
from errors import PrecisionError
from euler_product import (cyclotomic_exponents, deficit_euler_product, evaluate_at_reciprocal,
                           log_coefficients, polynomial_euler_product)


def test_log_coefficients():
    assert log_coefficients([1, -1], 3) == [0, -1, Fraction(-1, 2), Fraction(-1, 3)]


def test_cyclotomic_exponents():
    assert cyclotomic_exponents([1, 0, -1], 4) == [0, 0, 1, 0, 0]
    # (1 - t^2)(1 - t^3) = 1 - t^2 - t^3 + t^5
    assert cyclotomic_exponents([1, 0, -1, -1, 0, 1], 6) == [0, 0, 1, 1, 0, 0, 0]


def test_evaluate_at_reciprocal():
    assert evaluate_at_reciprocal([1, 0, -1], 2) == Fraction(3, 4)
    assert evaluate_at_reciprocal([1, 0, 0, -1, 1], 3) == 1 - Fraction(1, 27) + Fraction(1, 81)


def test_inverse_zeta_two():
    result = polynomial_euler_product([1, 0, -1], 1e-15)
    assert result.value.contains(6 / mpmath.pi ** 2)
    assert result.value.abs_error <= 1e-15


def test_special_prime_replaces_factor():
    result = polynomial_euler_product([1, 0, -1], 1e-12, special={2: Fraction(1)})
    assert abs(result.value.value - 8 / mpmath.pi ** 2) < 1e-12
    assert result.per_prime_factors == [(2, Fraction(1))]


def test_zero_special_factor_gives_exact_zero():
    result = polynomial_euler_product([1, 0, -1], special={3: Fraction(0)})
    assert result.value.value == 0
    assert result.warnings


def test_invalid_local_factors():
    with pytest.raises(ValueError):
        polynomial_euler_product([1, -1, 0])
    with pytest.raises(ValueError):
        polynomial_euler_product([2, 0, -1])


def test_deficit_product():
    result = deficit_euler_product(lambda p: ErrorBoundedReal.exact(Fraction(1, p ** 3)), 3, 1, 1e-8)
    assert result.value.contains(1 / mpmath.zeta(3))
    assert result.deficit.contains(1 - 1 / mpmath.zeta(3))


def test_deficit_product_refuses_unreachable_tolerance():
    with pytest.raises(PrecisionError):
        deficit_euler_product(lambda p: ErrorBoundedReal.exact(Fraction(1, p ** 2)), 2, 1, 1e-20)
    with pytest.raises(ValueError):
        deficit_euler_product(lambda p: ErrorBoundedReal.exact(0), 1, 1)
