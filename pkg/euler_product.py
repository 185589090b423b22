"""
Euler Product - Certified products of local factors over all primes
Zeta acceleration for polynomial factors, direct summation for tiny deficits
"""

import logging
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import mpmath
from mpmath import mp, mpf

from app import settings
from arith import ErrorBoundedReal, primes_below, rounding_slack, to_mpf, working_precision, zeta
from errors import PrecisionError
from models import GlobalDensityResult

logger = logging.getLogger(__name__)

MAX_ORDER = 80
MAX_CUTOFF = 10**6


def _trim(coeffs: Sequence[int]) -> List[int]:
    coeffs = [int(c) for c in coeffs]
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


def log_coefficients(coeffs: Sequence[int], order: int) -> List[Fraction]:
    """Taylor coefficients a_0..a_order of log F for F(0) = 1"""
    f = [Fraction(c) for c in coeffs[:order + 1]]
    f += [Fraction(0)] * (order + 1 - len(f))
    a = [Fraction(0)] * (order + 1)
    for j in range(1, order + 1):
        acc = j * f[j]
        for i in range(1, j):
            acc -= i * a[i] * f[j - i]
        a[j] = acc / j
    return a


def cyclotomic_exponents(coeffs: Sequence[int], order: int) -> List[int]:
    """Integers c_k with F(t) = prod_k (1 - t^k)^{c_k} + O(t^{order+1})"""
    a = log_coefficients(coeffs, order)
    c = [0] * (order + 1)
    for k in range(1, order + 1):
        acc = -k * a[k] - sum(d * c[d] for d in range(1, k) if k % d == 0)
        if acc.denominator != 1 or acc.numerator % k:
            raise ArithmeticError(f"non-integral exponent at order {k}: {acc}/{k}")
        c[k] = acc.numerator // k
    return c


def evaluate_at_reciprocal(coeffs: Sequence[int], p: int) -> Fraction:
    """Exact F(1/p)"""
    numerator = 0
    for c in coeffs:
        numerator = numerator * p + c
    return Fraction(numerator, p ** (len(coeffs) - 1))


def _majorant_shift(coeffs: Sequence[int]) -> int:
    """Smallest k with sum_{j>=1} |f_j| 2^{-kj} <= 1/2"""
    degree = len(coeffs) - 1
    for k in range(1, 256):
        numerator = 0
        for c in coeffs[1:]:
            numerator = (numerator << k) + abs(c)
        if 2 * numerator <= 1 << (k * degree):
            return k
    raise PrecisionError("polynomial coefficients are too large for a majorant bound")


def _power_tail(P: mpf, e: int) -> mpf:
    """Upper bound for sum_{n >= P} n^{-e}, e >= 2"""
    return P ** (-e) + P ** (1 - e) / (e - 1)


def _remainder_bound(P: int, order: int, c: Sequence[int], shift: int) -> mpf:
    """Bound for |sum_{p >= P} log R(1/p)| where R = F / prod_{k<=order} (1 - t^k)^{c_k}"""
    x0 = mpmath.ldexp(mpf(1), -shift)
    P = mpf(P)
    if P * x0 <= 1:
        return mpmath.inf
    # log F beyond order `order` is dominated by log(1 - G(t)) with G(x0) <= 1/2
    head = mpmath.log(2) / (1 - 1 / (P * x0)) * x0 ** (-(order + 1)) * _power_tail(P, order + 1)
    # the cyclotomic factors contribute their own terms of degree > order
    cyclotomic = mpf(0)
    for k in range(1, order + 1):
        if c[k]:
            multiple = order // k + 1
            cyclotomic += abs(c[k]) / (multiple * (1 - P ** (-k))) * _power_tail(P, k * multiple)
    return head + cyclotomic


def _cutoff_zeta(k: int, primes: Sequence[int], tol: mpf) -> ErrorBoundedReal:
    """prod_{p >= P} (1 - p^{-k})^{-1} as zeta(k) with the small primes removed"""
    value = zeta(k, tol / 4)
    partial = mpf(1)
    for p in primes:
        partial *= 1 - mpf(p) ** (-k)
    return value * ErrorBoundedReal(partial, rounding_slack(partial, 2 * len(primes)))


def polynomial_euler_product(coeffs: Sequence[int], tol=1e-30,
                             special: Optional[Dict[int, Fraction]] = None,
                             cutoff: Optional[int] = None,
                             keep_factors: int = 0) -> GlobalDensityResult:
    """Certified prod_p F(1/p) for an integer polynomial F = 1 + O(t^2)

    Primes listed in `special` use the given exact factor instead of F(1/p).
    The primes at or beyond the cutoff contribute prod_k zeta_P(k)^{-c_k}
    times a remainder whose logarithm is bounded from a majorant of 1 - F.
    """
    coeffs = _trim(coeffs)
    if coeffs[0] != 1:
        raise ValueError(f"local factor must have constant term 1, got {coeffs[0]}")
    if len(coeffs) > 1 and coeffs[1] != 0:
        raise ValueError("product over primes diverges: local factor has a linear term")
    special = {int(p): Fraction(v) for p, v in (special or {}).items()}
    tol = mpf(tol)
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")

    P = max(cutoff or settings.prime_cutoff, max(special, default=0) + 1)
    if any(v == 0 for v in special.values()):
        zero_at = min(p for p, v in special.items() if v == 0)
        return GlobalDensityResult(ErrorBoundedReal(mpf(0), mpf(0)), P,
                                   [(zero_at, Fraction(0))], warnings=[f"local factor at p={zero_at} is 0"])

    if len(coeffs) == 1:
        order, exponents, shift = 1, [0, 0], 1
    else:
        shift = _majorant_shift(coeffs)
        exponents = cyclotomic_exponents(coeffs, MAX_ORDER)
        P = max(P, 1 << (shift + 2))

    with mp.workprec(working_precision(tol) + max(abs(c) for c in exponents).bit_length() + 16):
        # grow the cutoff until some truncation order meets the remainder budget
        while len(coeffs) > 1:
            order = next((K for K in range(2, MAX_ORDER + 1)
                          if _remainder_bound(P, K, exponents, shift) <= tol / 16), None)
            if order is not None:
                break
            if P * 4 > MAX_CUTOFF:
                raise PrecisionError(f"Euler product cannot reach tol {mpmath.nstr(tol, 3)} below cutoff {MAX_CUTOFF}")
            P *= 4
        remainder = _remainder_bound(P, order, exponents, shift) if len(coeffs) > 1 else mpf(0)

        # exact local factors below the cutoff
        primes = primes_below(P)
        local = mpf(1)
        factors: List[Tuple[int, Fraction]] = []
        for index, p in enumerate(primes):
            factor = special.get(p)
            if factor is None:
                factor = evaluate_at_reciprocal(coeffs, p)
            if p in special or index < keep_factors:
                factors.append((p, factor))
            local *= to_mpf(factor)
        product = ErrorBoundedReal(local, rounding_slack(local, 3 * len(primes)))

        # primes at or above P through the cutoff zeta values
        weight = sum(abs(c) for c in exponents[2:order + 1]) or 1
        for k in range(2, order + 1):
            if exponents[k]:
                zeta_tail = _cutoff_zeta(k, primes, tol / (16 * weight * order))
                product = product * zeta_tail ** (-exponents[k])

        # everything past the truncation order
        if remainder:
            bounds = ErrorBoundedReal.from_bounds(mpmath.exp(-remainder), mpmath.exp(remainder))
            product = product * bounds

    logger.debug(f"Euler product: cutoff {P}, order {order}, remainder bound {mpmath.nstr(remainder, 3)}")
    if product.abs_error > tol:
        raise PrecisionError(
            f"Euler product error {mpmath.nstr(product.abs_error, 3)} exceeds tol {mpmath.nstr(tol, 3)}"
        )
    return GlobalDensityResult(product, P, factors or None)


def deficit_euler_product(deficit: Callable[[int], ErrorBoundedReal], exponent: int,
                          coefficient, tol=1e-30, rel_tol=None,
                          start_cutoff: int = 64) -> GlobalDensityResult:
    """Certified prod_p (1 - eps_p) and 1 - prod_p (1 - eps_p)

    `deficit(p)` returns eps_p, and eps_p <= coefficient * p^{-exponent} must hold
    for every prime at or beyond `start_cutoff`. With `rel_tol` the complement is
    certified to that relative accuracy, which keeps tiny complements meaningful.
    """
    if exponent < 2:
        raise ValueError(f"deficit exponent must be >= 2, got {exponent}")
    tol = mpf(tol)
    bits = working_precision(tol)
    if rel_tol is not None:
        bits = max(bits, working_precision(mpf(rel_tol)) + exponent * 2)

    with mp.workprec(bits):
        coefficient = mpf(coefficient)
        first = deficit(2)
        target = tol / 4
        if rel_tol is not None:
            target = min(target, mpf(rel_tol) * first.lower / 4)
        if target <= 0:
            raise PrecisionError("deficit at p=2 is not certified positive")

        P = start_cutoff
        while coefficient * _power_tail(mpf(P), exponent) > target:
            P *= 2
            if P > MAX_CUTOFF:
                raise PrecisionError(f"deficit product needs a cutoff above {MAX_CUTOFF}")
        single = coefficient * mpf(P) ** (-exponent)
        tail = coefficient * _power_tail(mpf(P), exponent) * (1 + 2 * single)

        log_sum = mpf(0)
        error = mpf(0)
        primes = primes_below(P)
        for p in primes:
            eps = first if p == 2 else deficit(p)
            if eps.upper >= 1:
                raise PrecisionError(f"deficit at p={p} is not below 1")
            log_sum += mpmath.log1p(-eps.value)
            error += eps.abs_error / (1 - eps.upper)
        error += rounding_slack(log_sum, 2 * len(primes) + 4) + rounding_slack(mpf(1), 2 * len(primes))

        # the primes beyond the cutoff can only lower the log
        high = log_sum + error
        low = log_sum - error - tail
        value = ErrorBoundedReal.from_bounds(mpmath.exp(low), mpmath.exp(high))
        complement = ErrorBoundedReal.from_bounds(-mpmath.expm1(high), -mpmath.expm1(low))

    logger.debug(f"Deficit product: cutoff {P}, tail {mpmath.nstr(tail, 3)}")
    return GlobalDensityResult(value, P, deficit=complement)
