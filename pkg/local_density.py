"""
Local Density - Exact SNF densities over Z/p^sZ
Closed formulas for chains and prefix sets, checked against enumeration
"""

import logging
from collections import Counter
from fractions import Fraction
from itertools import combinations_with_replacement, product
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

from app import settings
from arith import bracket, is_prime, prime_power_parts, valuation
from errors import BudgetExceededError
from health_monitor import resource_monitor
from models import AChain, IntegerMatrix, LocalDistribution, PrimePowerSet, SnfPrefixSpec
from snf_core import local_valuations, normalize_diagonal, snf_integer
from task_processor import TaskProcessor, get_task_processor

logger = logging.getLogger(__name__)

ChainLike = Union[AChain, Sequence[int]]


def _check_local(p: int, s: int, n: int, m: int):
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if s < 1:
        raise ValueError(f"s must be >= 1, got {s}")
    if n < 1 or m < 1:
        raise ValueError(f"matrix dimensions must be positive, got {n}x{m}")


def _as_chain(a: ChainLike, s: int, n: int, m: int) -> AChain:
    size = min(n, m)
    if isinstance(a, AChain):
        if a.s != s or a.m != size:
            raise ValueError(f"chain {a.a} is for s={a.s}, m={a.m}; expected s={s}, m={size}")
        return a
    return AChain(s, tuple(a), size)


def mu_ps_point(p: int, s: int, n: int, m: int, a: ChainLike) -> Fraction:
    """Density of the single SNF class D_a over Z/p^sZ"""
    _check_local(p, s, n, m)
    chain = _as_chain(a, s, n, m)
    exponent = sum((n - x) * (m - x) for x in chain.a)
    denominator = bracket(p, n - chain.a[-1]) * bracket(p, m - chain.a[-1])
    previous = 0
    for x in chain.a:
        denominator *= bracket(p, x - previous)
        previous = x
    return Fraction(1, p ** exponent) * bracket(p, n) * bracket(p, m) / denominator


def count_matrices_with_snf(p: int, s: int, n: int, m: int, a: ChainLike) -> int:
    """Number of n x m matrices over Z/p^sZ whose SNF is D_a"""
    _check_local(p, s, n, m)
    chain = _as_chain(a, s, n, m)
    t = Fraction(1, p)
    count = Fraction(p ** sum((n + m) * x - x * x for x in chain.a))
    for j in range(chain.a[-1]):
        count *= (1 - t ** (n - j)) * (1 - t ** (m - j))
    previous = 0
    for x in chain.a:
        count /= bracket(p, x - previous)
        previous = x
    if count.denominator != 1:
        raise ArithmeticError(f"matrix count for chain {chain.a} is not an integer: {count}")
    return count.numerator


def chain_diagonal(p: int, a: ChainLike, m: int) -> Tuple[int, ...]:
    """Normalized diagonal D_a: (a_i - a_{i-1}) copies of p^{i-1}, then zeros"""
    values = a.a if isinstance(a, AChain) else tuple(a)
    diag = []
    previous = 0
    for i, x in enumerate(values):
        diag.extend([p ** i] * (x - previous))
        previous = x
    diag.extend([0] * (m - previous))
    return tuple(diag)


def chain_of_diagonal(diag: Sequence[int], p: int, s: int) -> AChain:
    """a_i = number of entries that are not multiples of p^i"""
    valuations = [s if d % p ** s == 0 else valuation(d, p) for d in diag]
    return AChain(s, tuple(sum(1 for v in valuations if v < i) for i in range(1, s + 1)), len(diag))


def all_chains(s: int, m: int) -> List[AChain]:
    """Every chain 0 <= a_1 <= ... <= a_s <= m in lexicographic order"""
    return [AChain(s, a, m) for a in combinations_with_replacement(range(m + 1), s)]


def _prefix_tilde(p: int, s_j: int, d: Sequence[int]) -> List[int]:
    """ã_0..ã_{s_j}: how many prefix entries are not multiples of p^i"""
    return [sum(1 for x in d if x % p ** i) for i in range(s_j + 1)]


def mu_ps_prefix(p: int, s_j: int, spec: SnfPrefixSpec) -> Fraction:
    """Density of the prefix event modulo p^{s_j + 1}, p^{s_j} exactly dividing d_r"""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if s_j < 0:
        raise ValueError(f"s_j must be nonnegative, got {s_j}")
    if any(x == 0 for x in spec.d):
        logger.warning(f"prefix {spec.d} contains a zero entry; density is 0")
        return Fraction(0)
    if valuation(spec.d[-1], p) != s_j:
        raise ValueError(f"{p}^{s_j} is not the exact power of {p} dividing d_r = {spec.d[-1]}")

    n, m, r = spec.n, spec.m, spec.r
    tilde = _prefix_tilde(p, s_j, spec.d)
    top = tilde[-1]

    exponent = sum((n - x) * (m - x) for x in tilde[1:])
    chain_brackets = Fraction(1)
    for previous, x in zip(tilde, tilde[1:]):
        chain_brackets *= bracket(p, x - previous)
    scale = Fraction(1, p ** exponent) * bracket(p, n) * bracket(p, m) / chain_brackets

    head = scale / (bracket(p, n - top) * bracket(p, m - top))
    tail = sum(
        (Fraction(1, p ** ((n - ell) * (m - ell))) * scale
         / (bracket(p, n - ell) * bracket(p, m - ell) * bracket(p, ell - top))
         for ell in range(top, r)),
        Fraction(0)
    )
    return head - tail


def prefix_chains(p: int, s_j: int, spec: SnfPrefixSpec) -> List[AChain]:
    """The m - r + 1 chains mod p^{s_j + 1} whose union is the prefix event"""
    size = min(spec.n, spec.m)
    tilde = tuple(_prefix_tilde(p, s_j, spec.d)[1:])
    return [AChain(s_j + 1, tilde + (last,), size) for last in range(spec.r, size + 1)]


def _prefix_matches(p: int, s: int, spec: SnfPrefixSpec) -> Callable[[Tuple[int, ...]], bool]:
    target = normalize_diagonal(spec.d, p ** s)
    return lambda diag: diag[:spec.r] == target


def mu_event(p: int, s: int, n: int, m: int, predicate: Callable[[Tuple[int, ...]], bool]) -> Fraction:
    """Density of any set of normalized diagonals given as a predicate"""
    _check_local(p, s, n, m)
    size = min(n, m)
    total = Fraction(0)
    for chain in all_chains(s, size):
        if predicate(chain_diagonal(p, chain, size)):
            total += mu_ps_point(p, s, n, m, chain)
    return total


def mu_prefix_at_modulus(p: int, s: int, spec: SnfPrefixSpec) -> Fraction:
    """Density of the prefix event read modulo p^s"""
    return mu_event(p, s, spec.n, spec.m, _prefix_matches(p, s, spec))


def mu_distribution(p: int, s: int, n: int, m: int) -> LocalDistribution:
    """Closed-form distribution over every chain"""
    _check_local(p, s, n, m)
    entries = {chain.a: mu_ps_point(p, s, n, m, chain) for chain in all_chains(s, min(n, m))}
    distribution = LocalDistribution(p, s, n, m, entries)
    if distribution.total() != 1:
        raise ArithmeticError(f"distribution for {(p, s, n, m)} sums to {distribution.total()}")
    return distribution


def mu_crt(ps: PrimePowerSet, spec: SnfPrefixSpec) -> Fraction:
    """Density modulo P = prod p^s as the product of the local densities"""
    if not isinstance(ps, PrimePowerSet):
        ps = PrimePowerSet.from_pairs(ps)
    result = Fraction(1)
    for p, s in ps.pairs:
        result *= mu_prefix_at_modulus(p, s, spec)
    return result


def _digits(index: int, base: int, length: int) -> Tuple[int, ...]:
    digits = []
    for _ in range(length):
        index, digit = divmod(index, base)
        digits.append(digit)
    return tuple(reversed(digits))


def _diagonal_shard(job: Tuple[int, int, int, int, int, int]) -> Counter:
    """Histogram of normalized diagonals for one range of leading entries"""
    q, n, m, lead, start, stop = job
    parts = prime_power_parts(q)
    if parts:
        p, s = parts
        representatives = [p ** v for v in range(s)] + [0]
    counts = Counter()
    tail_cells = n * m - lead
    for index in range(start, stop):
        head = _digits(index, q, lead)
        for tail in product(range(q), repeat=tail_cells):
            cells = head + tail
            rows = [list(cells[i * m:(i + 1) * m]) for i in range(n)]
            if parts:
                diag = tuple(representatives[v] for v in local_valuations(rows, p, s))
            else:
                diag = normalize_diagonal(snf_integer(IntegerMatrix(n, m, cells)).diag, q)
            counts[diag] += 1
    return counts


def enumerate_diagonals(q: int, n: int, m: int, budget: Optional[int] = None,
                        processor: Optional[TaskProcessor] = None) -> Counter:
    """Normalized SNF diagonal of every n x m matrix over Z/qZ, counted"""
    if q < 2:
        raise ValueError(f"modulus must be >= 2, got {q}")
    if n < 1 or m < 1:
        raise ValueError(f"matrix dimensions must be positive, got {n}x{m}")
    budget = settings.enum_budget if budget is None else budget
    total = q ** (n * m)
    if total > budget:
        raise BudgetExceededError(f"enumeration of {n}x{m} matrices mod {q}", total, budget)

    processor = processor or get_task_processor()
    wanted = processor.shard_count(total)
    lead = 0
    while lead < n * m and q ** lead < wanted:
        lead += 1
    ranges = processor.partition(q ** lead, wanted)
    jobs = [(q, n, m, lead, start, stop) for start, stop in ranges]

    logger.info(f"Enumerating {total} matrices {n}x{m} mod {q} in {len(jobs)} shards")
    resource_monitor.check_enumeration(total, "matrix enumeration")
    counts = processor.reduce_counters(processor.map_shards(_diagonal_shard, jobs))
    if sum(counts.values()) != total:
        raise ArithmeticError(f"enumeration covered {sum(counts.values())} of {total} matrices")
    return counts


def enumerate_distribution(p: int, s: int, n: int, m: int, budget: Optional[int] = None,
                           processor: Optional[TaskProcessor] = None) -> LocalDistribution:
    """Exact distribution by running the local SNF on every matrix over Z/p^sZ"""
    _check_local(p, s, n, m)
    counts = enumerate_diagonals(p ** s, n, m, budget, processor)
    total = p ** (s * n * m)
    size = min(n, m)
    entries: Dict[Tuple[int, ...], Fraction] = {chain.a: Fraction(0) for chain in all_chains(s, size)}
    for diag, count in counts.items():
        entries[chain_of_diagonal(diag, p, s).a] += Fraction(count, total)
    return LocalDistribution(p, s, n, m, entries)


def enumerate_prefix_event(q: int, n: int, m: int, spec: SnfPrefixSpec,
                           budget: Optional[int] = None,
                           counts: Optional[Counter] = None) -> Fraction:
    """Brute-force density of a prefix event modulo any q"""
    if (spec.n, spec.m) != (n, m):
        raise ValueError(f"spec is for {spec.n}x{spec.m} matrices, not {n}x{m}")
    if counts is None:
        counts = enumerate_diagonals(q, n, m, budget)
    target = normalize_diagonal(spec.d, q)
    hits = sum(count for diag, count in counts.items() if diag[:spec.r] == target)
    return Fraction(hits, q ** (n * m))


def prefix_events_mod(q: int, n: int, m: int, r: int) -> List[SnfPrefixSpec]:
    """Every realizable normalized prefix of length r modulo q"""
    divisors = [d for d in range(1, q) if q % d == 0] + [0]
    events = []
    for d in product(divisors, repeat=r):
        try:
            events.append(SnfPrefixSpec(tuple(d), n, m))
        except ValueError:
            continue
    return events

