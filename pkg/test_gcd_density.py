from fractions import Fraction

import mpmath
import pytest

from errors import BudgetExceededError
from gcd_density import (box_weights, eval_system, lambda_box_mod, lambda_crt, lambda_distribution,
                         lambda_global, lambda_ps, sigma_p)
from models import GcdTargetSpec
from polynomials import GcdSystem, MultivariatePolynomial
from sampler import sigma_box


@pytest.fixture
def coordinates():
    return GcdSystem.coordinates(2)


def _single(expr: str, d: int) -> GcdSystem:
    return GcdSystem.single([MultivariatePolynomial.from_expression(expr, d)])


def test_eval_system(coordinates):
    assert eval_system(coordinates, (6, 10)) == (2,)
    assert eval_system(coordinates, (0, 0)) == (0,)


def test_box_weights():
    assert box_weights(4, 3) == (3, 3, 3)
    assert box_weights(1, 4) == (1, 1, 0, 1)
    assert sum(box_weights(10, 7)) == 21
    with pytest.raises(ValueError):
        box_weights(0, 3)


def test_local_densities(coordinates):
    one = GcdTargetSpec((1,))
    assert lambda_ps(coordinates, 3, 1, one) == Fraction(8, 9)
    assert lambda_ps(_single('x1', 1), 5, 1, one) == Fraction(4, 5)
    assert lambda_ps(coordinates, 2, 2, GcdTargetSpec((2,))) == Fraction(3, 16)


def test_local_distribution():
    distribution = lambda_distribution(_single('x1', 1), 2, 2)
    assert distribution == {(0,): Fraction(1, 4), (1,): Fraction(1, 2), (2,): Fraction(1, 4)}
    with pytest.raises(ValueError):
        lambda_distribution(_single('x1', 1), 4, 1)


def test_crt_product(coordinates):
    assert lambda_crt(coordinates, [(2, 1), (3, 1)], GcdTargetSpec((1,))) == Fraction(2, 3)


def test_full_period_box_equals_crt(coordinates):
    spec = GcdTargetSpec((1,))
    assert lambda_box_mod(coordinates, 15, spec, 7) == lambda_crt(coordinates, [(3, 1), (5, 1)], spec)


def test_partial_box(coordinates):
    assert lambda_box_mod(coordinates, 4, GcdTargetSpec((2,)), 2) == Fraction(8, 25)


def test_budget_and_target_checks(coordinates):
    with pytest.raises(BudgetExceededError):
        lambda_ps(coordinates, 5, 1, GcdTargetSpec((1,)), budget=10)
    with pytest.raises(ValueError):
        lambda_ps(coordinates, 2, 1, GcdTargetSpec((1, 1)))


def test_sigma_p():
    for p in (2, 3, 5, 7):
        assert sigma_p(MultivariatePolynomial.variable(1, 1), p) == Fraction(1, p)
    assert sigma_p(MultivariatePolynomial.from_expression('x1*x2', 2), 2) == Fraction(3, 4)
    assert sigma_p(MultivariatePolynomial.from_expression('x1**2 + 1', 1), 3) == 0
    assert sigma_p(MultivariatePolynomial.from_expression('x1**2 + 1', 1), 5) == Fraction(2, 5)


def test_global_coprime_pairs(coordinates):
    result = lambda_global(coordinates, GcdTargetSpec((1,)), cutoff=50)
    assert abs(result.value.value - 6 / mpmath.pi ** 2) < 1e-5
    assert result.heuristic_tail
    assert result.warnings
    assert result.prime_cutoff == 48


def test_global_zero_cases():
    doubled = GcdSystem.single([MultivariatePolynomial.from_expression('2*x1', 2),
                                MultivariatePolynomial.from_expression('2*x2', 2)])
    result = lambda_global(doubled, GcdTargetSpec((1,)), cutoff=20)
    assert result.value.value == 0
    assert result.per_prime_factors == [(2, Fraction(0))]
    zero_target = lambda_global(GcdSystem.coordinates(2), GcdTargetSpec((0,)), cutoff=20)
    assert zero_target.value.value == 0
    assert zero_target.warnings


def test_global_special_prime_beyond_budget(coordinates):
    result = lambda_global(coordinates, GcdTargetSpec((7,)), cutoff=20, budget=60)
    primes = [p for p, _ in result.per_prime_factors]
    assert 7 in primes
    assert dict(result.per_prime_factors)[7] == Fraction(48, 7 ** 4)


def _two_gcds() -> GcdSystem:
    polys = [MultivariatePolynomial.from_expression(expr, 2) for expr in ('x1', 'x2', 'x1 + x2', 'x1*x2 - 1')]
    return GcdSystem(tuple(polys), ((1, 2), (3, 4)))


def _divisor_classes(q: int):
    return [y for y in range(1, q) if q % y == 0] + [0]


SIGMA_POLYS = ['x1', 'x1*x2', 'x1**2 + 1', 'x1**2 - x2**3', 'x1**2 + x1 + 1', '3*x1 + 6*x2']


@pytest.mark.parametrize('expr', SIGMA_POLYS)
@pytest.mark.parametrize('p', [2, 3, 5])
def test_box_sigma_at_most_twice_per_variable(expr, p):
    d = 2 if 'x2' in expr else 1
    poly = MultivariatePolynomial.from_expression(expr, d)
    bound = 2 ** d * sigma_p(poly, p)
    for k in range((p - 1) // 2 + 1, 12):
        assert sigma_box(poly, p, k) <= bound


@pytest.mark.parametrize('system', [GcdSystem.coordinates(2), GcdSystem.coordinates(3), _two_gcds(),
                                    _single('x1**2 + x2**2', 2)])
@pytest.mark.parametrize('p, s', [(2, 1), (2, 3), (3, 2), (5, 1)])
def test_local_distribution_partitions_unity(system, p, s):
    if (p ** s) ** system.d > 10 ** 4:
        pytest.skip("enumeration too large for a unit test")
    distribution = lambda_distribution(system, p, s)
    assert sum(distribution.values()) == 1
    targets = [GcdTargetSpec(key) for key in distribution]
    assert sum(lambda_ps(system, p, s, spec) for spec in targets) == 1


@pytest.mark.parametrize('modulus, k', [(4, 2), (6, 5), (9, 3), (12, 7)])
def test_box_density_is_a_disjoint_union(modulus, k):
    system = _two_gcds()
    classes = _divisor_classes(modulus)
    total = Fraction(0)
    for y1 in classes:
        first = lambda_box_mod(system, modulus, GcdTargetSpec((y1,)), k)
        refined = sum((lambda_box_mod(system, modulus, GcdTargetSpec((y1, y2)), k) for y2 in classes),
                      Fraction(0))
        assert first == refined
        others = sum((lambda_box_mod(system, modulus, GcdTargetSpec((y,)), k) for y in classes if y != y1),
                     Fraction(0))
        assert others == 1 - first
        total += first
    assert total == 1
