"""
Extremal - Extrema, monotonicity and limits of the local SNF density
Exact rational checks over finite parameter ranges
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple

import mpmath
from mpmath import mpf

from app import settings
from arith import ErrorBoundedReal, bracket, c_limit, is_prime, to_mpf
from errors import BudgetExceededError
from local_density import mu_ps_point
from models import BVector

logger = logging.getLogger(__name__)


def f_value(p: int, bv: BVector) -> Fraction:
    """The local density of D_a written in the co-ranks b_i = m - a_i"""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    n_prime, m, b = bv.n_prime, bv.m, bv.b
    exponent = sum((n_prime + x) * x for x in b)
    denominator = bracket(p, n_prime + b[-1]) * bracket(p, b[-1])
    previous = m
    for x in b:
        denominator *= bracket(p, previous - x)
        previous = x
    return Fraction(1, p ** exponent) * bracket(p, n_prime + m) * bracket(p, m) / denominator


def f0_value(p: int, m: int, n_prime: int) -> Fraction:
    """[p, n'+m] / [p, n'], the density of full rank"""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    return bracket(p, n_prime + m) / bracket(p, n_prime)


def enumerate_bvectors(s: int, m: int, n_prime: int = 0) -> List[BVector]:
    """All b with m >= b_1 >= ... >= b_s >= 0, lexicographically decreasing"""
    return [BVector(s, b, m, n_prime) for b in combinations_with_replacement(range(m, -1, -1), s)]


@dataclass
class ExtremumResult:
    """Exhaustive max and min of f over the b-vectors for fixed (p, s, m, n')"""
    p: int
    b_max: BVector
    b_min: BVector
    max_value: Fraction
    min_value: Fraction
    maximizers: List[BVector] = field(default_factory=list)
    minimizers: List[BVector] = field(default_factory=list)

    def to_json_dict(self) -> Dict:
        return {
            'p': self.p, 's': self.b_max.s, 'm': self.b_max.m, 'n_prime': self.b_max.n_prime,
            'b_max': list(self.b_max.b),
            'max': {'num': str(self.max_value.numerator), 'den': str(self.max_value.denominator)},
            'maximizers': [list(bv.b) for bv in self.maximizers],
            'b_min': list(self.b_min.b),
            'min': {'num': str(self.min_value.numerator), 'den': str(self.min_value.denominator)},
            'minimizers': [list(bv.b) for bv in self.minimizers],
        }


def expected_extrema(p: int, s: int, m: int, n_prime: int) -> Tuple[List[Tuple[int, ...]], Fraction,
                                                                      List[Tuple[int, ...]], Fraction]:
    """Maximizers, max value, minimizers and min value predicted in closed form"""
    if (p, s, n_prime) == (2, 1, 0) and m == 1:
        # tie: both b-vectors give 1/2
        return [(0,), (1,)], Fraction(1, 2), [(0,), (1,)], Fraction(1, 2)
    if (p, s, n_prime) == (2, 1, 0):
        maximizers = [(1,)]
        max_value = bracket(2, m) ** 2 / (bracket(2, 1) * bracket(2, m - 1))
    else:
        maximizers, max_value = [(0,) * s], f0_value(p, m, n_prime)
    return maximizers, max_value, [(m,) * s], Fraction(1, p ** (s * (n_prime + m) * m))


def argmax_argmin(p: int, s: int, m: int, n_prime: int,
                  budget: Optional[int] = None) -> ExtremumResult:
    """Search every b-vector and check the result against the closed-form extrema"""
    budget = settings.enum_budget if budget is None else budget
    size = comb(m + s, s)
    if size > budget:
        raise BudgetExceededError('b-vector search', size, budget)

    values = [(bv, f_value(p, bv)) for bv in enumerate_bvectors(s, m, n_prime)]
    max_value = max(v for _, v in values)
    min_value = min(v for _, v in values)
    maximizers = [bv for bv, v in values if v == max_value]
    minimizers = [bv for bv, v in values if v == min_value]
    result = ExtremumResult(p, maximizers[0], minimizers[0], max_value, min_value, maximizers, minimizers)

    want_max, want_max_value, want_min, want_min_value = expected_extrema(p, s, m, n_prime)
    found = (sorted(bv.b for bv in maximizers), max_value, sorted(bv.b for bv in minimizers), min_value)
    if found != (sorted(want_max), want_max_value, sorted(want_min), want_min_value):
        logger.error(f"Extrema for p={p}, s={s}, m={m}, n'={n_prime} disagree with the closed form: {found}")
        raise ArithmeticError(f"extrema for p={p}, s={s}, m={m}, n'={n_prime} do not match the closed form")
    return result


def limit_m_infinity(p: int, s: int, n_prime: int, b_fixed: Sequence[int],
                     tol=1e-30) -> ErrorBoundedReal:
    """lim f as m grows with b fixed, through C_p"""
    b = tuple(int(x) for x in b_fixed)
    if len(b) != s:
        raise ValueError(f"b-vector for s={s} needs {s} entries, got {b}")
    BVector(s, b, max(b, default=0), n_prime)
    c_p = c_limit(Fraction(1, p), tol)
    if not any(b):
        return c_p / bracket(p, n_prime)
    denominator = bracket(p, n_prime + b[-1]) * bracket(p, b[-1])
    for previous, x in zip(b, b[1:]):
        denominator *= bracket(p, previous - x)
    return c_p * (Fraction(1, p ** sum((n_prime + x) * x for x in b)) / denominator)


def limit_s_infinity(p: int, m: int, n_prime: int, b_prefix: Sequence[int]) -> Fraction:
    """f for b = (b_1, ..., b_r, 0, 0, ...), the same for every s > r"""
    b = tuple(int(x) for x in b_prefix)
    while b and b[-1] == 0:
        b = b[:-1]
    bv = BVector(len(b) + 1, b + (0,), m, n_prime)
    return f_value(p, bv)


def escape_bound(p: int, b: Sequence[int]) -> mpf:
    """Upper bound p^{-sum b_i} e^8 on f over all m, n' for b != 0"""
    total = sum(b)
    if not total:
        raise ValueError("escape bound needs a nonzero b-vector")
    return mpf(p) ** (-total) * mpmath.exp(8)


def _claim(report: List[Dict], name: str, ok: bool, **params):
    report.append({'claim': name, 'params': params, 'ok': bool(ok)})


def _neighbor_claims(report: List[Dict], p: int, bv: BVector, value: Fraction):
    b = bv.b
    for i in range(bv.s - 1):
        if b[i] > b[i + 1]:
            lowered = BVector(bv.s, b[:i] + (b[i] - 1,) + b[i + 1:], bv.m, bv.n_prime)
            _claim(report, 'lowering-interior-b-raises-f', f_value(p, lowered) > value,
                   p=p, m=bv.m, n_prime=bv.n_prime, b=list(b), i=i + 1)
        upper = bv.m if i == 0 else b[i - 1]
        if b[i] < upper:
            raised = BVector(bv.s, b[:i] + (b[i] + 1,) + b[i + 1:], bv.m, bv.n_prime)
            _claim(report, 'raising-interior-b-lowers-f', f_value(p, raised) < value,
                   p=p, m=bv.m, n_prime=bv.n_prime, b=list(b), i=i + 1)


def monotonicity_report(ps: Sequence[int] = (2, 3, 5), ss: Sequence[int] = (1, 2, 3),
                        ms: Sequence[int] = (1, 2, 3, 4), n_primes: Sequence[int] = (0, 1, 2),
                        pad: int = 3) -> List[Dict]:
    """Check every monotonicity and neighbor inequality exactly over the given ranges"""
    ps, ss, ms, n_primes = sorted(ps), sorted(ss), sorted(ms), sorted(n_primes)
    report: List[Dict] = []

    for m in ms:
        for n_prime in n_primes:
            for p, p_next in zip(ps, ps[1:]):
                _claim(report, 'f0-increasing-in-p', f0_value(p, m, n_prime) < f0_value(p_next, m, n_prime),
                       p=[p, p_next], m=m, n_prime=n_prime)
    for p in ps:
        for m in ms:
            for n_prime in n_primes:
                f0 = f0_value(p, m, n_prime)
                _claim(report, 'f0-increasing-in-n-prime', f0 < f0_value(p, m, n_prime + 1),
                       p=p, m=m, n_prime=n_prime)
                _claim(report, 'f0-decreasing-in-m', f0 > f0_value(p, m + 1, n_prime),
                       p=p, m=m, n_prime=n_prime)

    for p in ps:
        for s in ss:
            for m in ms:
                for n_prime in n_primes:
                    for bv in enumerate_bvectors(s, m, n_prime):
                        value = f_value(p, bv)
                        a = bv.to_achain()
                        _claim(report, 'f-matches-local-density',
                               value == mu_ps_point(p, s, bv.n, m, a), p=p, s=s, m=m, n_prime=n_prime, b=list(bv.b))
                        _neighbor_claims(report, p, bv, value)
                        if bv.is_zero():
                            continue
                        params = dict(p=p, s=s, m=m, n_prime=n_prime, b=list(bv.b))
                        _claim(report, 'f-decreasing-in-n-prime',
                               value > f_value(p, BVector(s, bv.b, m, n_prime + 1)), **params)
                        _claim(report, 'f-increasing-in-m',
                               value < f_value(p, BVector(s, bv.b, m + 1, n_prime)), **params)
                        _claim(report, 'f-below-escape-bound', to_mpf(value) < escape_bound(p, bv.b), **params)
                        if bv.b[-1] == 0:
                            padded = BVector(s + pad, bv.b + (0,) * pad, m, n_prime)
                            _claim(report, 'f-independent-of-trailing-zeros', value == f_value(p, padded), **params)

    _escape_trends(report, ps, ss, ms, n_primes)
    failed = [entry for entry in report if not entry['ok']]
    if failed:
        logger.warning(f"{len(failed)} of {len(report)} monotonicity claims failed, first: {failed[0]}")
    else:
        logger.info(f"All {len(report)} monotonicity claims hold")
    return report


def _max_over_m(p: int, s: int, b: Tuple[int, ...], n_prime: int, ms: Sequence[int]) -> Fraction:
    return max(f_value(p, BVector(s, b, m, n_prime)) for m in ms if m >= b[0])


def _escape_trends(report: List[Dict], ps, ss, ms, n_primes):
    """max over m of f shrinks along growing p, n' and sum of b"""
    top = max(ms)
    for s in ss:
        b = (1,) + (0,) * (s - 1)
        for n_prime in n_primes:
            values = [_max_over_m(p, s, b, n_prime, ms) for p in ps]
            _claim(report, 'max-f-decreasing-in-p', all(x > y for x, y in zip(values, values[1:])),
                   s=s, n_prime=n_prime, b=list(b), p=list(ps))
        for p in ps:
            values = [_max_over_m(p, s, b, n_prime, ms) for n_prime in n_primes]
            _claim(report, 'max-f-decreasing-in-n-prime', all(x > y for x, y in zip(values, values[1:])),
                   p=p, s=s, b=list(b), n_prime=list(n_primes))
            for n_prime in n_primes:
                values = [_max_over_m(p, s, (j,) + (0,) * (s - 1), n_prime, ms) for j in range(1, top + 1)]
                _claim(report, 'max-f-decreasing-in-b', all(x > y for x, y in zip(values, values[1:])),
                       p=p, s=s, n_prime=n_prime, b1=list(range(1, top + 1)))
