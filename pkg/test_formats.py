from fractions import Fraction

import pytest
from mpmath import mpf

from errors import InputFormatError
from formats import (distribution_to_json, format_error, format_fixed, format_rational, format_sci,
                     format_sig, matrix_to_text, parse_distribution, parse_matrix)
from local_density import mu_distribution
from models import IntegerMatrix


def test_decimal_formats():
    assert format_sig(mpf(1) / 3, 12) == '0.333333333333'
    assert format_sig(mpf('2.449025572236'), 12) == '2.44902557224'
    assert format_sig(0) == '0'
    assert format_sci(mpf('0.005373116457339'), 12) == '5.37311645734e-3'
    assert format_fixed(mpf('0.99999999999995'), 12) == '1.000000000000'
    assert format_fixed(Fraction(1, 8), 3) == '0.125'


def test_error_format_rounds_up():
    assert format_error(mpf('1.2e-13')) == '2e-13'
    assert format_error(mpf('9.5e-5')) == '1e-4'
    assert format_error(0) == '0'


def test_rational_format():
    assert format_rational(Fraction(3, 8)) == '3/8'
    assert format_rational(Fraction(4, 2)) == '2'


def test_parse_text_matrix():
    matrix = parse_matrix("2 3\n1 2 3\n-4 5 6\n")
    assert matrix == IntegerMatrix(2, 3, (1, 2, 3, -4, 5, 6))
    assert parse_matrix(matrix_to_text(matrix)) == matrix


def test_parse_json_matrix():
    matrix = parse_matrix('{"n": 2, "m": 2, "entries": [[1, "2"], [3, 4]]}')
    assert matrix.to_rows() == [[1, 2], [3, 4]]


def test_bad_token_reports_position():
    with pytest.raises(InputFormatError) as info:
        parse_matrix("2 2\n1 2\n3 x4\n", source='m.txt')
    assert info.value.line == 3
    assert info.value.column == 3
    assert 'm.txt' in str(info.value)


def test_wrong_row_length_reports_line():
    with pytest.raises(InputFormatError) as info:
        parse_matrix("2 2\n1 2 3\n3 4\n")
    assert info.value.line == 2


def test_missing_rows():
    with pytest.raises(InputFormatError):
        parse_matrix("3 1\n1\n2\n")


def test_json_syntax_error_has_position():
    with pytest.raises(InputFormatError) as info:
        parse_matrix('{"n": 2,\n "m": }')
    assert info.value.line == 2


def test_input_errors_are_value_errors():
    with pytest.raises(ValueError):
        parse_matrix('')


def test_distribution_round_trip():
    distribution = mu_distribution(2, 2, 2, 2)
    restored = parse_distribution(distribution_to_json(distribution))
    assert restored.entries == distribution.entries
    assert restored.total() == 1


def test_distribution_rejects_bad_chain():
    text = '{"p": 2, "s": 1, "n": 2, "m": 2, "entries": [{"a": [3], "num": "1", "den": "1"}]}'
    with pytest.raises(InputFormatError):
        parse_distribution(text)
