"""
Arith - Exact rationals, certified reals, primes and zeta values
Infinite quantities carry an explicit absolute error bound
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Tuple, Union

import mpmath
import numpy as np
import sympy
from mpmath import mp, mpf

from app import settings
from errors import PrecisionError

logger = logging.getLogger(__name__)

ExactRational = Fraction

mp.prec = max(mp.prec, settings.precision)

Number = Union[int, Fraction, mpf, float, str]

EULER_MAX_CUTOFF = 10**7


def to_mpf(x: Number) -> mpf:
    """Convert an exact or floating number to the current mpmath context"""
    if isinstance(x, Fraction):
        return mpf(x.numerator) / x.denominator
    return mpf(x)


def rounding_slack(x: mpf, ops: int = 1) -> mpf:
    """Upper bound for the rounding error of `ops` roundings of a value of size |x|"""
    if x == 0:
        return mpf(0)
    return mpmath.ldexp(abs(x) * (ops + 1), 1 - mp.prec)


def working_precision(tol: Number) -> int:
    """Working precision in bits for an absolute tolerance"""
    tol = mpf(tol)
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    needed = int(mpmath.ceil(-mpmath.log(tol, 2))) + 64
    return max(settings.precision, needed)


def _check_tol(tol: Number) -> mpf:
    tol = mpf(tol)
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    return tol


@dataclass(frozen=True)
class ErrorBoundedReal:
    """A real number known to lie in [value - abs_error, value + abs_error]"""
    value: mpf
    abs_error: mpf

    def __post_init__(self):
        if self.abs_error < 0:
            raise ValueError(f"abs_error must be nonnegative, got {self.abs_error}")

    @classmethod
    def exact(cls, x: Number) -> 'ErrorBoundedReal':
        """Wrap an exact number; only the conversion rounding is charged"""
        if isinstance(x, ErrorBoundedReal):
            return x
        value = to_mpf(x)
        if isinstance(x, int) and x.bit_length() < mp.prec:
            return cls(value, mpf(0))
        if isinstance(x, Fraction) and x.denominator == 1 and x.numerator.bit_length() < mp.prec:
            return cls(value, mpf(0))
        return cls(value, rounding_slack(value))

    @classmethod
    def from_bounds(cls, lower: mpf, upper: mpf) -> 'ErrorBoundedReal':
        """Midpoint representation of a closed interval"""
        if upper < lower:
            lower, upper = upper, lower
        value = (lower + upper) / 2
        return cls(value, (upper - lower) / 2 + rounding_slack(value, 2))

    @property
    def lower(self) -> mpf:
        return self.value - self.abs_error

    @property
    def upper(self) -> mpf:
        return self.value + self.abs_error

    def contains(self, x: Number) -> bool:
        """True if x lies in the certified interval"""
        x = to_mpf(x)
        slack = rounding_slack(x, 2)
        return self.lower - slack <= x <= self.upper + slack

    def definitely_less(self, other: 'ErrorBoundedReal') -> bool:
        """True if every point of self is below every point of other"""
        return self.upper < _coerce(other).lower

    def __add__(self, other):
        other = _coerce(other)
        value = self.value + other.value
        return ErrorBoundedReal(value, self.abs_error + other.abs_error + rounding_slack(value))

    __radd__ = __add__

    def __neg__(self):
        return ErrorBoundedReal(-self.value, self.abs_error)

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        value = self.value * other.value
        err = (abs(self.value) * other.abs_error + abs(other.value) * self.abs_error
               + self.abs_error * other.abs_error + rounding_slack(value))
        return ErrorBoundedReal(value, err)

    __rmul__ = __mul__

    def reciprocal(self) -> 'ErrorBoundedReal':
        """1/x, defined only when the interval excludes zero"""
        magnitude = abs(self.value)
        if magnitude <= self.abs_error:
            raise ZeroDivisionError("interval contains zero")
        value = 1 / self.value
        err = self.abs_error / (magnitude * (magnitude - self.abs_error))
        return ErrorBoundedReal(value, err + rounding_slack(value))

    def __truediv__(self, other):
        return self * _coerce(other).reciprocal()

    def __rtruediv__(self, other):
        return _coerce(other) * self.reciprocal()

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int):
            raise TypeError("only integer powers are supported")
        if exponent == 0:
            return ErrorBoundedReal(mpf(1), mpf(0))
        if exponent < 0:
            return (self ** (-exponent)).reciprocal()
        if self.lower > 0:
            slack_ops = 2 * exponent.bit_length() + 2
            lower = self.lower ** exponent
            upper = self.upper ** exponent
            widened = rounding_slack(upper, slack_ops)
            return ErrorBoundedReal.from_bounds(lower - widened, upper + widened)
        result = ErrorBoundedReal(mpf(1), mpf(0))
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def exp(self) -> 'ErrorBoundedReal':
        """Certified exponential"""
        value = mpmath.exp(self.value)
        err = value * mpmath.expm1(self.abs_error)
        return ErrorBoundedReal(value, err + rounding_slack(value, 2))

    def log(self) -> 'ErrorBoundedReal':
        """Certified natural logarithm of a positive interval"""
        if self.lower <= 0:
            raise ValueError("log of an interval that is not strictly positive")
        value = mpmath.log(self.value)
        err = self.abs_error / self.lower
        return ErrorBoundedReal(value, err + rounding_slack(value, 2))

    def __float__(self):
        return float(self.value)

    def __repr__(self):
        return f"ErrorBoundedReal({mpmath.nstr(self.value, 20)} +/- {mpmath.nstr(self.abs_error, 3)})"

    def to_json_dict(self, digits: int = 12) -> Dict[str, str]:
        """JSON view with the value printed to `digits` significant digits"""
        from formats import format_sig, format_error
        return {
            'value': format_sig(self.value, digits),
            'abs_error': format_error(self.abs_error),
        }


def _coerce(x) -> ErrorBoundedReal:
    if isinstance(x, ErrorBoundedReal):
        return x
    return ErrorBoundedReal.exact(x)


@lru_cache(maxsize=None)
def _sieve(bound: int) -> Tuple[int, ...]:
    is_prime = np.ones(bound, dtype=bool)
    is_prime[:2] = False
    for i in range(2, math.isqrt(bound - 1) + 1):
        if is_prime[i]:
            is_prime[i * i::i] = False
    return tuple(int(p) for p in np.flatnonzero(is_prime))


def primes_below(bound: int) -> List[int]:
    """All primes p < bound in increasing order"""
    if bound <= 2:
        return []
    return list(_sieve(int(bound)))


def is_prime(p: int) -> bool:
    return bool(sympy.isprime(p))


def factorize(n: int) -> Dict[int, int]:
    """Prime factorization {p: exponent} of a positive integer"""
    if n < 1:
        raise ValueError(f"cannot factor {n}")
    return {int(p): int(e) for p, e in sympy.factorint(n).items()}


def prime_power_parts(q: int) -> Optional[Tuple[int, int]]:
    """(p, s) if q = p^s for a prime p, else None"""
    if q < 2:
        return None
    factors = factorize(q)
    if len(factors) != 1:
        return None
    (p, s), = factors.items()
    return p, s


def valuation(x: int, p: int) -> int:
    """p-adic valuation of a nonzero integer"""
    if x == 0:
        raise ValueError("valuation of zero is infinite")
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def q_pochhammer(t: Union[int, Fraction], ell: int) -> ExactRational:
    """Exact finite product prod_{j=1}^{ell} (1 - t^j)"""
    t = Fraction(t)
    if t <= 0 or t > 1:
        raise ValueError(f"t must lie in (0, 1], got {t}")
    if ell < 0:
        raise ValueError(f"ell must be nonnegative, got {ell}")
    result = Fraction(1)
    power = Fraction(1)
    for _ in range(ell):
        power *= t
        result *= 1 - power
    return result


@lru_cache(maxsize=4096)
def bracket(p: int, ell: int) -> ExactRational:
    """The finite product [p, ell] = prod_{j=1}^{ell} (1 - p^{-j})"""
    return q_pochhammer(Fraction(1, p), ell)


def c_limit(t: Union[int, Fraction], tol: Number = 1e-30) -> ErrorBoundedReal:
    """C(t) = prod_{j>=1} (1 - t^j) with a certified truncation bound"""
    t = Fraction(t)
    if t <= 0 or t > Fraction(1, 2):
        raise ValueError(f"t must lie in (0, 1/2], got {t}")
    tol = _check_tol(tol)

    with mp.workprec(working_precision(tol)):
        x = to_mpf(t)
        partial = mpf(1)
        power = mpf(1)
        k = 0
        while True:
            k += 1
            power *= x
            partial *= 1 - power
            # [1/t,k] - C(t) <= [1/t,k] * t^{k+1} / (1 - t)
            tail = partial * power * x / (1 - x)
            if tail <= tol / 2:
                break
        # C(t) lies in [partial - tail, partial]
        value = partial - tail / 2
        err = tail / 2 + rounding_slack(partial, 4 * k)
        return ErrorBoundedReal(+value, +err)


def _zeta_series(i: int, tol: mpf) -> ErrorBoundedReal:
    bits = working_precision(tol)
    with mp.workprec(bits):
        s = mpf(i)
        cutoff = 20 + bits // 4
        head = mpmath.fsum(mpf(n) ** (-s) for n in range(1, cutoff))
        N = mpf(cutoff)
        total = head + N ** (1 - s) / (s - 1) + N ** (-s) / 2
        k = 1
        while True:
            term = (mpmath.bernoulli(2 * k) / mpmath.factorial(2 * k)
                    * mpmath.rf(s, 2 * k - 1) * N ** (-s - 2 * k + 1))
            next_term = (mpmath.bernoulli(2 * k + 2) / mpmath.factorial(2 * k + 2)
                         * mpmath.rf(s, 2 * k + 1) * N ** (-s - 2 * k - 1))
            total += term
            # Euler-Maclaurin remainder for real s is bounded by the first omitted term
            if abs(next_term) <= tol / 2:
                break
            k += 1
            if k > 4 * cutoff:
                raise PrecisionError(f"zeta({i}) series did not reach tol {tol}")
        err = abs(next_term) + rounding_slack(total, cutoff + 4 * k)
        return ErrorBoundedReal(+total, +err)


def _zeta_euler(i: int, tol: mpf, max_cutoff: int = EULER_MAX_CUTOFF) -> ErrorBoundedReal:
    cutoff = 1000
    with mp.workprec(working_precision(tol)):
        while True:
            primes = primes_below(cutoff)
            partial = mpf(1)
            for p in primes:
                partial *= 1 - mpf(p) ** (-i)
            euler = 1 / partial
            P = mpf(cutoff)
            # sum_{n >= P} n^{-i} <= P^{-i} + P^{1-i}/(i-1)
            delta = P ** (-i) + P ** (1 - i) / (i - 1)
            upper = euler / (1 - delta)
            half_width = (upper - euler) / 2
            if half_width <= tol / 2:
                value = (upper + euler) / 2
                err = half_width + rounding_slack(value, 2 * len(primes) + 8)
                logger.debug(f"zeta({i}) Euler product cutoff {cutoff}")
                return ErrorBoundedReal(+value, +err)
            if cutoff >= max_cutoff:
                raise PrecisionError(
                    f"zeta({i}) Euler product needs a prime cutoff above {max_cutoff} for tol {tol}"
                )
            cutoff = min(cutoff * 10, max_cutoff)


def zeta(i: int, tol: Number = 1e-30, method: str = 'series') -> ErrorBoundedReal:
    """Riemann zeta at an integer i >= 2 with abs_error <= tol"""
    if i < 2:
        raise ValueError(f"zeta({i}) diverges; need i >= 2")
    tol = _check_tol(tol)
    if method == 'series':
        return _zeta_series(i, tol)
    if method == 'euler':
        return _zeta_euler(i, tol)
    raise ValueError(f"Unknown zeta method: {method}")


def zeta_product(start: int, stop: Optional[int] = None, tol: Number = 1e-30) -> ErrorBoundedReal:
    """prod_{i=start}^{stop} zeta(i); stop=None means the infinite product"""
    if start < 2:
        raise ValueError(f"zeta products start at i >= 2, got {start}")
    tol = _check_tol(tol)
    tail_bound = mpf(0)
    if stop is None:
        # zeta(i) - 1 <= 3 * 2^{-i}, so prod_{i>I} zeta(i) <= exp(3 * 2^{-I})
        stop = max(start, int(mpmath.ceil(mpmath.log(48 / tol, 2))))
        tail_bound = 3 * mpmath.ldexp(mpf(1), -stop)
    elif stop < start:
        return ErrorBoundedReal(mpf(1), mpf(0))

    count = stop - start + 1
    with mp.workprec(working_precision(tol)):
        product = ErrorBoundedReal(mpf(1), mpf(0))
        for i in range(start, stop + 1):
            product = product * zeta(i, tol / (16 * count))
        if tail_bound:
            upper = product.upper * mpmath.exp(tail_bound)
            product = ErrorBoundedReal.from_bounds(product.lower, upper)
    return product
