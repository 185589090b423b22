"""
Polynomials - Integer multivariate polynomials and gcd systems
Exact evaluation over Z and Z/qZ, JSON and expression parsing
"""

import json
import logging
from dataclasses import dataclass
from math import gcd
from typing import Any, Dict, List, Optional, Sequence, Tuple

import sympy
from sympy.parsing.sympy_parser import parse_expr

from errors import InputFormatError
from formats import parse_json_document

logger = logging.getLogger(__name__)

Term = Tuple[int, Tuple[int, ...]]


@dataclass(frozen=True)
class MultivariatePolynomial:
    """Nonzero polynomial in Z[x_1, ..., x_d] as (coefficient, exponents) terms"""
    d: int
    terms: Tuple[Term, ...]

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"number of variables must be >= 1, got {self.d}")
        terms = tuple((int(c), tuple(int(e) for e in exps)) for c, exps in self.terms)
        if not terms:
            raise ValueError("polynomial must have at least one term")
        seen = set()
        for c, exps in terms:
            if c == 0:
                raise ValueError("terms must have nonzero coefficients")
            if len(exps) != self.d:
                raise ValueError(f"exponent vector {list(exps)} does not have {self.d} entries")
            if any(e < 0 for e in exps):
                raise ValueError(f"exponents must be nonnegative, got {list(exps)}")
            if exps in seen:
                raise ValueError(f"duplicate exponent vector {list(exps)}")
            seen.add(exps)
        object.__setattr__(self, 'terms', terms)

    @classmethod
    def from_expression(cls, text: str, d: int) -> 'MultivariatePolynomial':
        """Build from an expression in x1..xd such as 'x1**2 + 1'"""
        gens = sympy.symbols(f"x1:{d + 1}")
        expr = parse_expr(text, local_dict={str(g): g for g in gens})
        poly = sympy.Poly(expr, *gens)
        if poly.is_zero:
            raise ValueError(f"expression {text!r} is the zero polynomial")
        for c in poly.coeffs():
            if not c.is_integer:
                raise ValueError(f"expression {text!r} has a non-integer coefficient {c}")
        return cls(d, tuple((int(c), monom) for monom, c in poly.terms()))

    @classmethod
    def variable(cls, index: int, d: int) -> 'MultivariatePolynomial':
        """The coordinate x_index (1-based)"""
        return cls(d, ((1, tuple(int(i == index - 1) for i in range(d))),))

    @property
    def degree(self) -> int:
        return max(sum(exps) for _, exps in self.terms)

    def evaluate(self, x: Sequence[int]) -> int:
        if len(x) != self.d:
            raise ValueError(f"expected {self.d} coordinates, got {len(x)}")
        total = 0
        for c, exps in self.terms:
            value = c
            for xi, e in zip(x, exps):
                if e:
                    value *= int(xi) ** e
            total += value
        return total

    def evaluate_mod(self, x: Sequence[int], q: int) -> int:
        total = 0
        for c, exps in self.terms:
            value = c
            for xi, e in zip(x, exps):
                if e:
                    value = value * pow(int(xi), e, q) % q
            total += value
        return total % q

    def to_sympy(self) -> sympy.Poly:
        gens = sympy.symbols(f"x1:{self.d + 1}")
        return sympy.Poly.from_dict({exps: c for c, exps in self.terms}, *gens)

    def to_json_dict(self) -> Dict:
        return {'d': self.d, 'terms': [{'c': str(c), 'e': list(exps)} for c, exps in self.terms]}

    def __str__(self):
        return str(self.to_sympy().as_expr())


@dataclass(frozen=True)
class GcdSystem:
    """Polynomials F_1..F_h and index subsets U_1..U_w (1-based)"""
    polys: Tuple[MultivariatePolynomial, ...]
    subsets: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        polys = tuple(self.polys)
        subsets = tuple(tuple(int(i) for i in subset) for subset in self.subsets)
        if not polys:
            raise ValueError("system needs at least one polynomial")
        d = polys[0].d
        if any(poly.d != d for poly in polys):
            raise ValueError("all polynomials must use the same number of variables")
        if not subsets:
            raise ValueError("system needs at least one subset")
        for subset in subsets:
            if not subset:
                raise ValueError("subsets must be nonempty")
            if any(i < 1 or i > len(polys) for i in subset):
                raise ValueError(f"subset {list(subset)} has an index outside 1..{len(polys)}")
        object.__setattr__(self, 'polys', polys)
        object.__setattr__(self, 'subsets', subsets)

    @classmethod
    def single(cls, polys: Sequence[MultivariatePolynomial]) -> 'GcdSystem':
        """One gcd over all polynomials"""
        return cls(tuple(polys), (tuple(range(1, len(polys) + 1)),))

    @classmethod
    def coordinates(cls, d: int) -> 'GcdSystem':
        """gcd(x_1, ..., x_d)"""
        return cls.single([MultivariatePolynomial.variable(i, d) for i in range(1, d + 1)])

    @property
    def d(self) -> int:
        return self.polys[0].d

    @property
    def h(self) -> int:
        return len(self.polys)

    @property
    def w(self) -> int:
        return len(self.subsets)

    def evaluate(self, x: Sequence[int]) -> Tuple[int, ...]:
        """g(x); a gcd of all-zero values is 0"""
        values = [poly.evaluate(x) for poly in self.polys]
        return tuple(gcd(*(values[i - 1] for i in subset)) for subset in self.subsets)

    def evaluate_normalized(self, x: Sequence[int], q: int) -> Tuple[int, ...]:
        """g(x) mod q up to units: gcd(g_i, q), with 0 for the zero class"""
        values = [poly.evaluate_mod(x, q) for poly in self.polys]
        result = []
        for subset in self.subsets:
            g = gcd(q, *(values[i - 1] for i in subset))
            result.append(0 if g == q else g)
        return tuple(result)

    def to_json_dict(self) -> Dict:
        return {
            'd': self.d,
            'polys': [{'terms': poly.to_json_dict()['terms']} for poly in self.polys],
            'subsets': [list(subset) for subset in self.subsets],
        }


def _coefficient(value: Any, where: str, source: Optional[str]) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise InputFormatError(f"{where}: coefficient must be an integer or a string, got {value!r}", source=source)
    try:
        return int(value)
    except ValueError:
        raise InputFormatError(f"{where}: coefficient {value!r} is not an integer", source=source)


def polynomial_from_json_dict(data: Dict, d: Optional[int] = None, source: Optional[str] = None,
                              where: str = 'polynomial') -> MultivariatePolynomial:
    if not isinstance(data, dict):
        raise InputFormatError(f"{where} must be a JSON object", source=source)
    d = data.get('d', d)
    if d is None:
        raise InputFormatError(f"{where} is missing 'd'", source=source)
    try:
        if 'expr' in data:
            return MultivariatePolynomial.from_expression(str(data['expr']), int(d))
        if 'terms' not in data:
            raise InputFormatError(f"{where} needs 'terms' or 'expr'", source=source)
        terms = []
        for index, term in enumerate(data['terms']):
            label = f"{where} term {index + 1}"
            if not isinstance(term, dict) or 'c' not in term or 'e' not in term:
                raise InputFormatError(f"{label} needs 'c' and 'e'", source=source)
            terms.append((_coefficient(term['c'], label, source), tuple(term['e'])))
        return MultivariatePolynomial(int(d), tuple(terms))
    except InputFormatError:
        raise
    except (TypeError, ValueError, SyntaxError, sympy.SympifyError) as e:
        raise InputFormatError(f"{where}: {e}", source=source)


def parse_polynomial(text: str, source: Optional[str] = None) -> MultivariatePolynomial:
    """Read {"d": ..., "terms": [{"c": "-3", "e": [2, 0, 1]}, ...]}"""
    return polynomial_from_json_dict(parse_json_document(text, source), source=source)


def parse_system(text: str, source: Optional[str] = None) -> GcdSystem:
    """Read a system: {"d": ..., "polys": [...], "subsets": [[1, 2], ...]}

    A bare polynomial document is a one-polynomial system. Without
    "subsets" the system takes one gcd over all polynomials.
    """
    data = parse_json_document(text, source)
    if not isinstance(data, dict):
        raise InputFormatError("system document must be a JSON object", source=source)
    if 'polys' not in data:
        return GcdSystem.single([polynomial_from_json_dict(data, source=source)])
    d = data.get('d')
    polys = [polynomial_from_json_dict(item, d, source, f"polynomial {index + 1}")
             for index, item in enumerate(data['polys'])]
    try:
        if 'subsets' in data:
            return GcdSystem(tuple(polys), tuple(tuple(subset) for subset in data['subsets']))
        return GcdSystem.single(polys)
    except (TypeError, ValueError) as e:
        raise InputFormatError(f"invalid system: {e}", source=source)


def system_to_json(system: GcdSystem) -> str:
    return json.dumps(system.to_json_dict(), indent=2)
