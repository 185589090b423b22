"""
Formats - Text and JSON codecs for matrices, distributions and decimals
Parsers report the line and column of malformed input
"""

import json
import logging
from decimal import Decimal, ROUND_HALF_EVEN, localcontext
from fractions import Fraction
from typing import Any, Dict, List

import mpmath

from errors import InputFormatError
from models import IntegerMatrix, LocalDistribution

logger = logging.getLogger(__name__)


def _to_decimal(x, digits: int) -> Decimal:
    if isinstance(x, Fraction):
        x = mpmath.mpf(x.numerator) / x.denominator
    return Decimal(mpmath.nstr(mpmath.mpf(x), digits + 10, strip_zeros=False))


def format_sig(x, digits: int = 12) -> str:
    """Plain decimal rounded to `digits` significant digits"""
    value = _to_decimal(x, digits)
    if value == 0:
        return '0'
    decimals = max(0, digits - 1 - value.adjusted())
    with localcontext() as ctx:
        ctx.prec = digits + decimals + 40
        rounded = value.quantize(Decimal(1).scaleb(-decimals), rounding=ROUND_HALF_EVEN)
    return format(rounded, 'f')


def format_sci(x, digits: int = 12) -> str:
    """Scientific notation with `digits` significant digits, e.g. 5.37311645734e-3"""
    value = _to_decimal(x, digits)
    if value == 0:
        return '0'
    return format(value, f'.{digits - 1}e')


def format_fixed(x, decimals: int = 12) -> str:
    """Fixed-point notation with `decimals` digits after the point"""
    value = _to_decimal(x, decimals + 4)
    with localcontext() as ctx:
        ctx.prec = decimals + 60
        rounded = value.quantize(Decimal(1).scaleb(-decimals), rounding=ROUND_HALF_EVEN)
    return format(rounded, 'f')


def format_error(e) -> str:
    """One significant digit, rounded up: 1.2e-13 prints as 2e-13"""
    e = mpmath.mpf(e)
    if e <= 0:
        return '0'
    exponent = int(mpmath.floor(mpmath.log10(e)))
    mantissa = int(mpmath.ceil(e / mpmath.mpf(10) ** exponent))
    if mantissa >= 10:
        mantissa, exponent = 1, exponent + 1
    return f"{mantissa}e{exponent}"


def format_rational(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_json_document(text: str, source: str = None) -> Any:
    """json.loads with the decoder position turned into an InputFormatError"""
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InputFormatError(e.msg, e.lineno, e.colno, source)


def _int_value(value: Any, what: str, source: str = None) -> int:
    if isinstance(value, bool):
        raise InputFormatError(f"{what} must be an integer, got {value!r}", source=source)
    if isinstance(value, int):
        return value
    if isinstance(value, str):
        try:
            return int(value.strip())
        except ValueError:
            pass
    raise InputFormatError(f"{what} must be an integer, got {value!r}", source=source)


def matrix_from_json_dict(data: Any, source: str = None) -> IntegerMatrix:
    if not isinstance(data, dict):
        raise InputFormatError("matrix document must be a JSON object", source=source)
    missing = [key for key in ('n', 'm', 'entries') if key not in data]
    if missing:
        raise InputFormatError(f"matrix document is missing {', '.join(missing)}", source=source)
    n = _int_value(data['n'], 'n', source)
    m = _int_value(data['m'], 'm', source)
    raw = data['entries']
    if raw and isinstance(raw[0], list):
        raw = [x for row in raw for x in row]
    entries = tuple(_int_value(x, f"entry {i + 1}", source) for i, x in enumerate(raw))
    try:
        return IntegerMatrix(n, m, entries)
    except ValueError as e:
        raise InputFormatError(str(e), source=source)


def parse_matrix(text: str, source: str = None) -> IntegerMatrix:
    """Read a matrix in text form ("n m" then n rows) or JSON form"""
    stripped = text.lstrip()
    if stripped.startswith('{'):
        return matrix_from_json_dict(parse_json_document(text, source), source)

    lines = [(number, line) for number, line in enumerate(text.splitlines(), start=1) if line.strip()]
    if not lines:
        raise InputFormatError("empty matrix input", 1, 1, source)

    header_line, header = lines[0]
    header_tokens = _tokens(header)
    if len(header_tokens) != 2:
        raise InputFormatError("first line must be 'n m'", header_line, 1, source)
    n, m = (_parse_token(token, column, header_line, source) for column, token in header_tokens)
    if n < 1 or m < 1:
        raise InputFormatError(f"matrix dimensions must be positive, got {n} {m}", header_line, 1, source)

    rows = lines[1:]
    if len(rows) != n:
        where = rows[-1][0] if rows else header_line
        raise InputFormatError(f"expected {n} rows, found {len(rows)}", where, 1, source)

    entries: List[int] = []
    for number, line in rows:
        tokens = _tokens(line)
        if len(tokens) != m:
            column = tokens[m][0] if len(tokens) > m else len(line.rstrip()) + 1
            raise InputFormatError(f"expected {m} entries, found {len(tokens)}", number, column, source)
        entries.extend(_parse_token(token, column, number, source) for column, token in tokens)
    return IntegerMatrix(n, m, tuple(entries))


def _tokens(line: str) -> List[tuple]:
    """Whitespace-separated tokens with 1-based start columns"""
    tokens = []
    column = 0
    for piece in line.replace('\t', ' ').split(' '):
        if piece:
            tokens.append((column + 1, piece))
        column += len(piece) + 1
    return tokens


def _parse_token(token: str, column: int, line: int, source: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise InputFormatError(f"not an integer: {token!r}", line, column, source)


def matrix_to_text(matrix: IntegerMatrix) -> str:
    lines = [f"{matrix.rows} {matrix.cols}"]
    lines.extend(' '.join(str(x) for x in row) for row in matrix.to_rows())
    return '\n'.join(lines) + '\n'


def distribution_to_json(distribution: LocalDistribution) -> str:
    return json.dumps(distribution.to_json_dict(), indent=2)


def parse_distribution(text: str, source: str = None) -> LocalDistribution:
    """Read a distribution document written by distribution_to_json"""
    data = parse_json_document(text, source)
    if not isinstance(data, dict):
        raise InputFormatError("distribution document must be a JSON object", source=source)
    try:
        return LocalDistribution.from_json_dict(data)
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as e:
        raise InputFormatError(f"invalid distribution document: {e}", source=source)


def rational_json(value: Fraction) -> Dict[str, str]:
    return {'num': str(value.numerator), 'den': str(value.denominator)}
