"""
Global Density - SNF densities over Z as certified products over primes
Prefix events, cyclic cokernels Z_n, Z_n(l), Z(l) and their asymptotics
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

import mpmath
from mpmath import mp, mpf
from sympy import Poly, symbols

from arith import (ErrorBoundedReal, bracket, c_limit, factorize, is_prime, q_pochhammer,
                   rounding_slack, to_mpf, working_precision, zeta, zeta_product)
from euler_product import deficit_euler_product, polynomial_euler_product
from local_density import mu_ps_prefix
from models import GlobalDensityResult, SnfPrefixSpec

logger = logging.getLogger(__name__)

t = symbols('t')

TABLE_TOL = mpf('1e-16')


@dataclass
class AsymptoticsResidual:
    """p^{(l+1)^2} C_p (1 - Z(p,l)) split as 1 - 2t^{l+2}/(1-t) + delta1 + delta2"""
    ell: int
    p: int
    scaled_residual: ErrorBoundedReal
    delta1: mpf
    delta2: mpf
    scaled_global: Optional[ErrorBoundedReal] = None
    log_column: Optional[ErrorBoundedReal] = None

    def leading(self) -> mpf:
        x = mpf(1) / self.p
        return 1 - 2 * x ** (self.ell + 2) / (1 - x)

    def bounds_hold(self) -> bool:
        """delta1 in [0, p^{-2l}] and delta2 in (0, p^{-2l})"""
        limit = mpf(self.p) ** (-2 * self.ell)
        return 0 <= self.delta1 <= limit and 0 < self.delta2 < limit


@lru_cache(maxsize=256)
def _bracket_poly(ell: int) -> Poly:
    """[1/t, ell] as a polynomial in t"""
    result = Poly(1, t)
    for j in range(1, ell + 1):
        result = result * Poly(1 - t ** j, t)
    return result


@lru_cache(maxsize=1024)
def _gauss_poly(n: int, k: int) -> Poly:
    """Gaussian binomial [n]/([k][n-k]) in t"""
    quotient = _bracket_poly(n).exquo(_bracket_poly(k) * _bracket_poly(n - k))
    return quotient


def _falling_poly(n: int, ell: int) -> Poly:
    """[n]/[n-ell] = prod_{j=n-ell+1}^{n} (1 - t^j)"""
    result = Poly(1, t)
    for j in range(n - ell + 1, n + 1):
        result = result * Poly(1 - t ** j, t)
    return result


def _ascending(poly: Poly) -> List[int]:
    return [int(c) for c in reversed(poly.all_coeffs())]


def prefix_polynomial(n: int, m: int, r: int) -> List[int]:
    """Coefficients in t = 1/p of the density at primes not dividing d_r"""
    deficit = Poly(0, t)
    for ell in range(r):
        term = Poly(t ** ((n - ell) * (m - ell)), t) * _falling_poly(n, ell) * _gauss_poly(m, ell)
        deficit = deficit + term
    return _ascending(Poly(1, t) - deficit)


def cyclic_polynomial(n: int, ell: int) -> List[int]:
    """Coefficients of Z_n(p, l) = sum_{i<=l} t^{i^2} [n choose i]_t prod_{j>i} (1 - t^j)"""
    total = Poly(0, t)
    for i in range(ell + 1):
        total = total + Poly(t ** (i * i), t) * _gauss_poly(n, i) * _bracket_poly(n).exquo(_bracket_poly(i))
    return _ascending(total)


def _degenerate(reason: str) -> GlobalDensityResult:
    logger.warning(f"Degenerate event: {reason}; density is 0")
    return GlobalDensityResult(ErrorBoundedReal(mpf(0), mpf(0)), 0, warnings=[reason])


def mu_global_prefix(spec: SnfPrefixSpec, tol=1e-12) -> GlobalDensityResult:
    """Density over Z of the event that the SNF starts with d_1 | ... | d_r"""
    spec = spec.oriented()
    reason = spec.degenerate_reason
    if reason:
        return _degenerate(reason)

    special = {p: mu_ps_prefix(p, s, spec) for p, s in factorize(spec.d[-1]).items()}
    coeffs = prefix_polynomial(spec.n, spec.m, spec.r)
    result = polynomial_euler_product(coeffs, tol, special=special)
    logger.info(f"mu{spec.d} for {spec.n}x{spec.m}: cutoff {result.prime_cutoff}, "
                f"special primes {sorted(special)}")
    return result


def mu_all_ones(n: int, m: int, tol=1e-12) -> GlobalDensityResult:
    """Density of SNF = identity prefix of full length: 1 / prod_{i=n-m+1}^{n} zeta(i)"""
    n, m = max(n, m), min(n, m)
    if n == m:
        return _degenerate("prefix fixes every diagonal entry of a square matrix")
    with mp.workprec(working_precision(tol)):
        value = zeta_product(n - m + 1, n, mpf(tol) / 4).reciprocal()
    return GlobalDensityResult(value, 0)


def inverse_zeta_product_all(tol=1e-12) -> ErrorBoundedReal:
    """1 / prod_{i>=2} zeta(i)"""
    with mp.workprec(working_precision(tol)):
        return zeta_product(2, None, mpf(tol) / 4).reciprocal()


def z_limit_closed_form(tol=1e-12) -> ErrorBoundedReal:
    """Z(1) = 1 / (zeta(6) prod_{i>=4} zeta(i))"""
    with mp.workprec(working_precision(tol)):
        tol = mpf(tol)
        return (zeta(6, tol / 8) * zeta_product(4, None, tol / 8)).reciprocal()


def z_n_l(n: int, ell: int, tol=1e-12) -> GlobalDensityResult:
    """Density of at most l non-unit SNF entries for n x n matrices"""
    if n < 1 or ell < 1:
        raise ValueError(f"need n >= 1 and l >= 1, got n={n}, l={ell}")
    if ell > n:
        raise ValueError(f"l={ell} exceeds n={n}")
    if ell == n:
        return GlobalDensityResult(ErrorBoundedReal(mpf(1), mpf(0)), 0)
    result = polynomial_euler_product(cyclic_polynomial(n, ell), tol)
    logger.debug(f"Z_{n}({ell}) cutoff {result.prime_cutoff}")
    return result


def z_n(n: int, tol=1e-12) -> GlobalDensityResult:
    """Density of a cyclic cokernel for n x n matrices"""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    return z_n_l(n, 1, tol)


def y_function(x: Fraction, ell: int, n: Optional[int] = None) -> Fraction:
    """Y_n(1/x, l) for finite n, or its limit Y(1/x, l) when n is None"""
    x = Fraction(x)
    if x <= 0 or x > Fraction(1, 2):
        raise ValueError(f"x must lie in (0, 1/2], got {x}")
    if ell < 0:
        raise ValueError(f"l must be nonnegative, got {ell}")
    if n is not None and ell > n:
        raise ValueError(f"l={ell} exceeds n={n}")
    total = Fraction(0)
    for i in range(ell + 1):
        term = x ** (i * i) / q_pochhammer(x, i) ** 2
        if n is not None:
            term *= q_pochhammer(x, n) / q_pochhammer(x, n - i)
        total += term
    return q_pochhammer(x, 1) * total


def _tail_series(x: mpf, start: int) -> ErrorBoundedReal:
    """sum_{i>=start} x^{i^2} / [1/x, i]^2; consecutive terms shrink at least twofold"""
    total = mpf(0)
    i = start
    pochhammer = mpf(1)
    for j in range(1, start + 1):
        pochhammer *= 1 - x ** j
    while True:
        term = x ** (i * i) / pochhammer ** 2
        total += term
        next_term = x ** ((i + 1) ** 2) / (pochhammer * (1 - x ** (i + 1))) ** 2
        if next_term <= total * mpmath.ldexp(1, -mp.prec):
            break
        pochhammer *= 1 - x ** (i + 1)
        i += 1
    return ErrorBoundedReal(total, 2 * next_term + rounding_slack(total, 4 * (i - start + 2)))


def z_p_deficit(p: int, ell: int) -> ErrorBoundedReal:
    """1 - Z(p, l) = C_p sum_{i>l} p^{-i^2} / [p,i]^2 in the current precision"""
    x = mpf(1) / p
    C = c_limit(Fraction(1, p), mpmath.ldexp(1, -mp.prec - 8))
    return C * _tail_series(x, ell + 1)


def z_l(ell: int, tol=1e-12, rel_tol=None) -> GlobalDensityResult:
    """Z(l) = prod_p Z(p, l) with 1 - Z(l) certified to relative accuracy"""
    if ell < 1:
        raise ValueError(f"l must be >= 1, got {ell}")
    tol = mpf(tol)
    if ell == 1:
        with mp.workprec(working_precision(tol) + 16):
            value = z_limit_closed_form(tol / 2)
            result = GlobalDensityResult(value, 0, deficit=1 - value)
    else:
        exponent = (ell + 1) ** 2
        result = deficit_euler_product(lambda p: z_p_deficit(p, ell), exponent, 2, tol,
                                       rel_tol=rel_tol if rel_tol is not None else tol)
    logger.debug(f"Z({ell}) = {mpmath.nstr(result.value.value, 15)}")
    return result


def z_l_residual(ell: int, p: int = 2, tol=1e-12) -> AsymptoticsResidual:
    """Split the scaled local residual of Z(p, l) into its leading part and two corrections"""
    if ell < 1:
        raise ValueError(f"l must be >= 1, got {ell}")
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    tol = mpf(tol)
    bits = working_precision(tol) + 8 * ell + 64
    with mp.workprec(bits):
        x = mpf(1) / p
        C = c_limit(Fraction(1, p), mpmath.ldexp(1, -bits + 8))
        # first correction: squared upper tail against its two-term expansion
        # prod_{j>=l+2} (1 - x^j) = C / [p, l+1]
        upper_tail = C / to_mpf(bracket(p, ell + 1))
        leading = 1 - 2 * x ** (ell + 2) / (1 - x)
        delta1 = upper_tail * upper_tail - leading

        # second correction: the remaining terms i >= l + 2, summed until negligible
        delta2 = ErrorBoundedReal(mpf(0), mpf(0))
        i = ell + 2
        while True:
            inner = C / to_mpf(bracket(p, i))
            term = inner * inner * x ** (i * i - (ell + 1) ** 2)
            delta2 = delta2 + term
            if term.value < delta2.value * mpmath.ldexp(1, -bits):
                break
            i += 1
        delta2 = delta2 + ErrorBoundedReal(mpf(0), 2 * term.value)
        scaled = leading + delta1 + delta2

        # at p = 2, compare with the global deficit of Z(l)
        scaled_global = log_column = None
        if p == 2:
            z = z_l(ell, TABLE_TOL)
            scaled_global = z.deficit * mpmath.ldexp(mpf(1), (ell + 1) ** 2)
            inner = 1 - C * scaled_global
            log_column = -inner.log() / mpmath.log(2)

    residual = AsymptoticsResidual(ell, p, scaled, +delta1.value, +delta2.value, scaled_global, log_column)
    if not residual.bounds_hold():
        logger.warning(f"Residual bounds fail at p={p}, l={ell}: "
                       f"delta1={mpmath.nstr(residual.delta1, 5)}, delta2={mpmath.nstr(residual.delta2, 5)}")
    return residual


def z_l_table(lmax: int = 10, tol=TABLE_TOL) -> List[Dict]:
    """Rows of (l, Z, 1 - Z, 2^{(l+1)^2} (1 - Z), -ln(1 - C_2 2^{(l+1)^2}(1 - Z)) / ln 2)"""
    if lmax < 1:
        raise ValueError(f"lmax must be >= 1, got {lmax}")
    rows = []
    with mp.workprec(working_precision(tol) + 64):
        C2 = c_limit(Fraction(1, 2), mpf(tol) ** 2)
        for ell in range(1, lmax + 1):
            z = z_l(ell, tol)
            scaled = z.deficit * mpmath.ldexp(mpf(1), (ell + 1) ** 2)
            log_column = -(1 - C2 * scaled).log() / mpmath.log(2)
            rows.append({'ell': ell, 'Z': z.value, 'one_minus_Z': z.deficit,
                         'scaled': scaled, 'log_column': log_column})
            logger.info(f"Table row l={ell} done (cutoff {z.prime_cutoff})")
    return rows


def figure_rows(lmax: int = 20, tol=TABLE_TOL) -> List[Tuple[int, ErrorBoundedReal, ErrorBoundedReal]]:
    """Plot data: (l, scaled residual, log column) for l = 1..lmax"""
    return [(row['ell'], row['scaled'], row['log_column']) for row in z_l_table(lmax, tol)]


def euler_identity_gap(x: Fraction, terms: int = 40, tol=1e-30) -> mpf:
    """Upper bound for |sum_{i<=terms} x^{i^2} / [1/x, i]^2 - 1 / C(x)|"""
    x = Fraction(x)
    partial = sum((x ** (i * i) / q_pochhammer(x, i) ** 2 for i in range(terms + 1)), Fraction(0))
    with mp.workprec(working_precision(tol)):
        gap = ErrorBoundedReal.exact(partial) - c_limit(x, tol).reciprocal()
        return abs(gap.value) + gap.abs_error
