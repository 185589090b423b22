"""
GCD Density - Distribution of gcds of polynomial values
Exact local densities by enumeration, CRT products and truncated global products
"""

import logging
from collections import Counter
from fractions import Fraction
from itertools import product
from math import prod
from typing import Dict, List, Optional, Sequence, Tuple

import mpmath
from mpmath import mpf

from app import settings
from arith import ErrorBoundedReal, factorize, is_prime, primes_below
from errors import BudgetExceededError
from health_monitor import resource_monitor
from models import GcdTargetSpec, GlobalDensityResult, PrimePowerSet
from polynomials import GcdSystem, MultivariatePolynomial
from snf_core import normalize_diagonal
from task_processor import TaskProcessor, get_task_processor

logger = logging.getLogger(__name__)

# primes summed explicitly in the heuristic tail
TAIL_PRIME_LIMIT = 10**6
TAIL_FIT_FACTORS = 3


def eval_system(system: GcdSystem, x: Sequence[int]) -> Tuple[int, ...]:
    """g(x) over Z"""
    return system.evaluate(x)


def box_weights(k: int, q: int) -> Tuple[int, ...]:
    """How many integers of {-k, ..., k} fall in each residue class mod q"""
    if k < 1:
        raise ValueError(f"box radius must be >= 1, got {k}")
    return tuple((k - r) // q - (-k - 1 - r) // q for r in range(q))


def _gcd_shard(job: Tuple) -> Counter:
    """Histogram of normalized g-vectors for one range of leading coordinates"""
    system, q, lead, start, stop, weights = job
    counts = Counter()
    tail_length = system.d - lead
    for index in range(start, stop):
        head = []
        for _ in range(lead):
            index, digit = divmod(index, q)
            head.append(digit)
        head.reverse()
        for tail in product(range(q), repeat=tail_length):
            x = head + list(tail)
            key = system.evaluate_normalized(x, q)
            counts[key] += prod(weights[c] for c in x) if weights else 1
    return counts


def _check_budget(what: str, q: int, d: int, budget: Optional[int]) -> int:
    budget = settings.enum_budget if budget is None else budget
    total = q ** d
    if total > budget:
        raise BudgetExceededError(what, total, budget)
    return total


def _residue_counts(system: GcdSystem, q: int, weights: Optional[Tuple[int, ...]] = None,
                    processor: Optional[TaskProcessor] = None) -> Counter:
    processor = processor or get_task_processor()
    wanted = processor.shard_count(q ** system.d)
    lead = 0
    while lead < system.d and q ** lead < wanted:
        lead += 1
    ranges = processor.partition(q ** lead, wanted)
    jobs = [(system, q, lead, start, stop, weights) for start, stop in ranges]
    logger.debug(f"Enumerating {q ** system.d} residue vectors mod {q} in {len(jobs)} shards")
    resource_monitor.check_enumeration(q ** system.d, "residue enumeration")
    return processor.reduce_counters(processor.map_shards(_gcd_shard, jobs))


def lambda_distribution(system: GcdSystem, p: int, s: int, budget: Optional[int] = None,
                        processor: Optional[TaskProcessor] = None) -> Dict[Tuple[int, ...], Fraction]:
    """Density of every normalized g-vector mod p^s"""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if s < 1:
        raise ValueError(f"s must be >= 1, got {s}")
    q = p ** s
    total = _check_budget(f"gcd enumeration mod {q}", q, system.d, budget)
    counts = _residue_counts(system, q, processor=processor)
    return {key: Fraction(count, total) for key, count in sorted(counts.items())}


def _target(system: GcdSystem, spec: GcdTargetSpec, q: int) -> Tuple[int, ...]:
    if spec.r > system.w:
        raise ValueError(f"target has {spec.r} components but the system has {system.w} gcds")
    return normalize_diagonal(spec.y, q)


def lambda_ps(system: GcdSystem, p: int, s: int, spec: GcdTargetSpec,
              budget: Optional[int] = None) -> Fraction:
    """Probability that g(x) matches the target mod p^s up to units"""
    target = _target(system, spec, p ** s)
    distribution = lambda_distribution(system, p, s, budget)
    return sum((value for key, value in distribution.items() if key[:spec.r] == target), Fraction(0))


def lambda_crt(system: GcdSystem, ps, spec: GcdTargetSpec, budget: Optional[int] = None) -> Fraction:
    """Density mod prod p^s as the product of the local densities"""
    if not isinstance(ps, PrimePowerSet):
        ps = PrimePowerSet.from_pairs(ps)
    result = Fraction(1)
    for p, s in ps.pairs:
        result *= lambda_ps(system, p, s, spec, budget)
    return result


def lambda_box_mod(system: GcdSystem, modulus: int, spec: GcdTargetSpec, k: int,
                   budget: Optional[int] = None) -> Fraction:
    """Exact probability over the box {-k..k}^d that g(x) matches the target mod `modulus`

    Only residues matter, so the count runs over (Z/modulus)^d weighted by
    how often each residue occurs in the box.
    """
    if modulus < 2:
        raise ValueError(f"modulus must be >= 2, got {modulus}")
    target = _target(system, spec, modulus)
    _check_budget(f"box enumeration mod {modulus}", modulus, system.d, budget)
    counts = _residue_counts(system, modulus, box_weights(k, modulus))
    hits = sum(count for key, count in counts.items() if key[:spec.r] == target)
    return Fraction(hits, (2 * k + 1) ** system.d)


def sigma_p(poly: MultivariatePolynomial, p: int, budget: Optional[int] = None) -> Fraction:
    """Fraction of x in (Z/p)^d with p | G(x)"""
    distribution = lambda_distribution(GcdSystem.single([poly]), p, 1, budget)
    return distribution.get((0,), Fraction(0))


def _heuristic_tail(c: float, cutoff: int, skip: Sequence[int] = ()) -> mpf:
    """log prod_{p >= cutoff} (1 - c p^{-2}), the far tail taken from the prime number theorem"""
    log_sum = mpf(0)
    for p in primes_below(TAIL_PRIME_LIMIT):
        if p >= cutoff and p not in skip:
            log_sum += mpmath.log1p(-c / mpf(p) ** 2)
    return log_sum - c / (TAIL_PRIME_LIMIT * mpmath.log(TAIL_PRIME_LIMIT))


def lambda_global(system: GcdSystem, spec: GcdTargetSpec, cutoff: Optional[int] = None,
                  budget: Optional[int] = None) -> GlobalDensityResult:
    """Truncated product of lambda_{p^{s_p+1}} with a fitted tail

    s_p is the exponent of p in lcm(y). Local factors are computed by
    enumeration while the cumulative work stays within the budget; the tail
    prod_{p >= cutoff} (1 - c p^{-2}) uses c fitted from the last factors and
    is not certified. The system is assumed to satisfy the coprimality
    hypothesis for the product formula; that is not checked.
    """
    if spec.r > system.w:
        raise ValueError(f"target has {spec.r} components but the system has {system.w} gcds")
    cutoff = settings.prime_cutoff if cutoff is None else cutoff
    budget = settings.enum_budget if budget is None else budget
    if any(y == 0 for y in spec.y):
        return GlobalDensityResult(ErrorBoundedReal.exact(0), 0,
                                   warnings=["target has a zero component; density is 0"])

    # enumerate local factors in prime order until the work budget runs out
    special = factorize(spec.lcm)
    factors: List[Tuple[int, Fraction]] = []
    head = Fraction(1)
    work = 0
    reached = 2
    exhausted = False
    for p in primes_below(max(cutoff, max(special, default=0) + 1)):
        s = special.get(p, 0) + 1
        size = p ** (s * system.d)
        if p not in special and (exhausted or work + size > budget):
            if not exhausted:
                logger.info(f"gcd product stopped at p={p}: enumeration work would exceed {budget}")
                exhausted = True
            continue
        work += size
        # special primes only answer to the global budget
        local_budget = max(budget, settings.enum_budget) if p in special else budget
        factor = lambda_ps(system, p, s, spec, local_budget)
        factors.append((p, factor))
        head *= factor
        if not exhausted:
            reached = p + 1
        if factor == 0:
            logger.warning(f"local gcd density at p={p} is 0")
            return GlobalDensityResult(ErrorBoundedReal.exact(0), reached, factors,
                                       warnings=[f"local factor at p={p} is 0"])

    # fit 1 - lambda_p ~ c p^{-2} on the last ordinary primes and extend it past the cutoff
    fit = [(1 - f) * p * p for p, f in factors if p not in special][-TAIL_FIT_FACTORS:]
    c = float(sum(fit) / len(fit)) if fit else 0.0
    tail = _heuristic_tail(c, reached, special) if c > 0 else mpf(0)
    value = mpmath.mpf(head.numerator) / head.denominator * mpmath.exp(tail)
    logger.info(f"gcd product over {len(factors)} primes below {reached}, fitted tail constant {c:.4g}")
    return GlobalDensityResult(
        ErrorBoundedReal(value, abs(value * -mpmath.expm1(tail))),
        reached,
        factors,
        warnings=[f"tail beyond p={reached} is estimated with c={c:.4g}, not certified"],
        heuristic_tail=True,
    )

