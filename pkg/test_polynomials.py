import pytest

from errors import InputFormatError
from polynomials import GcdSystem, MultivariatePolynomial, parse_polynomial, parse_system, system_to_json


def test_expression_parsing():
    poly = MultivariatePolynomial.from_expression('x1**2 + 1', 1)
    assert poly.evaluate([3]) == 10
    assert poly.evaluate_mod([3], 7) == 3
    assert poly.degree == 2
    assert str(poly) == 'x1**2 + 1'


def test_expression_rejects_non_integer_or_zero():
    with pytest.raises(ValueError):
        MultivariatePolynomial.from_expression('x1/2', 1)
    with pytest.raises(ValueError):
        MultivariatePolynomial.from_expression('x1 - x1', 1)


def test_term_validation():
    with pytest.raises(ValueError):
        MultivariatePolynomial(2, ((1, (1, 0)), (2, (1, 0))))
    with pytest.raises(ValueError):
        MultivariatePolynomial(2, ((0, (1, 0)),))
    with pytest.raises(ValueError):
        MultivariatePolynomial(2, ((1, (1,)),))
    with pytest.raises(ValueError):
        MultivariatePolynomial(1, ())


def test_variable():
    assert MultivariatePolynomial.variable(2, 3).evaluate([4, 5, 6]) == 5


def test_gcd_vector():
    coordinates = GcdSystem.coordinates(2)
    assert coordinates.evaluate((6, 10)) == (2,)
    assert coordinates.evaluate((0, 0)) == (0,)
    system = GcdSystem.single([MultivariatePolynomial.from_expression('x1**2', 2),
                               MultivariatePolynomial.from_expression('x1*x2', 2)])
    assert system.evaluate((3, 5)) == (3,)


def test_normalized_gcd_vector():
    coordinates = GcdSystem.coordinates(2)
    assert coordinates.evaluate_normalized((2, 4), 4) == (2,)
    assert coordinates.evaluate_normalized((0, 4), 4) == (0,)
    assert coordinates.evaluate_normalized((3, 0), 4) == (1,)


def test_several_subsets():
    x1, x2, x3 = (MultivariatePolynomial.variable(i, 3) for i in (1, 2, 3))
    system = GcdSystem((x1, x2, x3), ((1, 2), (1, 2, 3)))
    assert (system.h, system.w, system.d) == (3, 2, 3)
    assert system.evaluate((4, 6, 3)) == (2, 1)
    with pytest.raises(ValueError):
        GcdSystem((x1,), ((2,),))


def test_parse_polynomial_terms():
    poly = parse_polynomial('{"d": 2, "terms": [{"c": "-3", "e": [2, 0]}, {"c": 1, "e": [0, 1]}]}')
    assert poly.evaluate([2, 5]) == -7


def test_parse_system_forms():
    text = ('{"d": 2, "polys": [{"terms": [{"c": 1, "e": [1, 0]}]}, {"expr": "x2"}],'
            ' "subsets": [[1], [1, 2]]}')
    system = parse_system(text)
    assert system.evaluate((4, 6)) == (4, 2)
    single = parse_system('{"d": 2, "polys": [{"expr": "x1"}, {"expr": "x2"}]}')
    assert single.subsets == ((1, 2),)
    bare = parse_system('{"d": 1, "expr": "x1**2 + 1"}')
    assert bare.w == 1 and bare.h == 1


def test_system_json_round_trip():
    system = GcdSystem.coordinates(3)
    assert parse_system(system_to_json(system)) == system


@pytest.mark.parametrize('text', [
    '{"d": 2, "polys": [{"terms": [{"c": 1.5, "e": [1, 0]}]}]}',
    '{"d": 2, "polys": [{"terms": [{"c": 1, "e": [1, 0]}]}], "subsets": [[2]]}',
    '{"d": 2, "polys": [{"terms": [{"c": "one", "e": [1, 0]}]}]}',
    '{"polys": [{"terms": [{"c": 1, "e": [1]}]}]}',
    '[1, 2]',
])
def test_malformed_systems(text):
    with pytest.raises(InputFormatError):
        parse_system(text)


def test_json_error_position():
    with pytest.raises(InputFormatError) as info:
        parse_system('{\n  "d": 2,\n  "polys": [,]\n}')
    assert info.value.line == 3
