"""
Models - Immutable domain types shared across snfdist
Matrices, SNF diagonals, chains, prefix specs, distributions and results
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Dict, List, Optional, Tuple

from arith import ErrorBoundedReal, is_prime

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IntegerMatrix:
    """Dense n x m integer matrix stored row-major"""
    rows: int
    cols: int
    entries: Tuple[int, ...]

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError(f"matrix dimensions must be positive, got {self.rows}x{self.cols}")
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(
                f"expected {self.rows * self.cols} entries for a {self.rows}x{self.cols} matrix, "
                f"got {len(self.entries)}"
            )
        object.__setattr__(self, 'entries', tuple(int(x) for x in self.entries))

    @classmethod
    def from_rows(cls, rows: List[List[int]]) -> 'IntegerMatrix':
        if not rows or not rows[0]:
            raise ValueError("matrix must have at least one row and one column")
        width = len(rows[0])
        for i, row in enumerate(rows):
            if len(row) != width:
                raise ValueError(f"row {i + 1} has {len(row)} entries, expected {width}")
        return cls(len(rows), width, tuple(x for row in rows for x in row))

    @classmethod
    def identity(cls, size: int) -> 'IntegerMatrix':
        return cls(size, size, tuple(int(i == j) for i in range(size) for j in range(size)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> 'IntegerMatrix':
        return cls(rows, cols, (0,) * (rows * cols))

    def to_rows(self) -> List[List[int]]:
        return [list(self.entries[i * self.cols:(i + 1) * self.cols]) for i in range(self.rows)]

    def transpose(self) -> 'IntegerMatrix':
        return IntegerMatrix(self.cols, self.rows,
                             tuple(self.entries[i * self.cols + j]
                                   for j in range(self.cols) for i in range(self.rows)))

    def reduce(self, q: int) -> 'IntegerMatrix':
        """Entries reduced to 0..q-1"""
        return IntegerMatrix(self.rows, self.cols, tuple(x % q for x in self.entries))

    def to_json_dict(self) -> Dict:
        return {'n': self.rows, 'm': self.cols, 'entries': list(self.entries)}


def _check_chain(values: Tuple[int, ...], what: str):
    seen_zero = False
    for i, d in enumerate(values):
        if d < 0:
            raise ValueError(f"{what} entries must be nonnegative, got {d}")
        if seen_zero and d != 0:
            raise ValueError(f"{what} has a nonzero entry after a zero at position {i + 1}")
        if d == 0:
            seen_zero = True
        elif i > 0 and values[i - 1] != 0 and d % values[i - 1] != 0:
            raise ValueError(f"{what} violates divisibility: {values[i - 1]} does not divide {d}")


@dataclass(frozen=True)
class SnfDiagonal:
    """Normalized SNF diagonal d_1 | d_2 | ... with trailing zeros"""
    n: int
    m: int
    diag: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, 'diag', tuple(int(d) for d in self.diag))
        if len(self.diag) != min(self.n, self.m):
            raise ValueError(f"diagonal of a {self.n}x{self.m} matrix has {min(self.n, self.m)} entries")
        _check_chain(self.diag, 'SNF diagonal')

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diag if d != 0)

    def prefix(self, r: int) -> Tuple[int, ...]:
        return self.diag[:r]

    def to_json_dict(self) -> Dict:
        return {'n': self.n, 'm': self.m, 'diag': list(self.diag)}


@dataclass(frozen=True)
class MinorGcdProfile:
    """gcds g_1..g_r of the i x i minors, r the rank"""
    g: Tuple[int, ...]
    rank: int

    def __post_init__(self):
        object.__setattr__(self, 'g', tuple(int(x) for x in self.g))
        if len(self.g) != self.rank:
            raise ValueError(f"profile of rank {self.rank} needs {self.rank} gcds, got {len(self.g)}")
        previous = 1
        for i, value in enumerate(self.g):
            if value <= 0 or value % previous:
                raise ValueError(f"g_{i + 1} = {value} is not a positive multiple of g_{i} = {previous}")
            previous = value
        _check_chain(self.invariant_factors(), 'minor-gcd quotient chain')

    def invariant_factors(self) -> Tuple[int, ...]:
        """d_i = g_i / g_{i-1}"""
        factors = []
        previous = 1
        for value in self.g:
            factors.append(value // previous)
            previous = value
        return tuple(factors)

    def diagonal(self, n: int, m: int) -> SnfDiagonal:
        factors = self.invariant_factors()
        return SnfDiagonal(n, m, factors + (0,) * (min(n, m) - len(factors)))


@dataclass(frozen=True)
class PrimePowerSet:
    """Distinct primes with positive exponents, sorted by prime"""
    pairs: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        pairs = tuple((int(p), int(s)) for p, s in self.pairs)
        object.__setattr__(self, 'pairs', pairs)
        if not pairs:
            raise ValueError("prime power set must not be empty")
        for p, s in pairs:
            if not is_prime(p):
                raise ValueError(f"{p} is not prime")
            if s < 1:
                raise ValueError(f"exponent for {p} must be >= 1, got {s}")
        for (p, _), (q, _) in zip(pairs, pairs[1:]):
            if p == q:
                raise ValueError(f"duplicate primes: {p}")
            if q < p:
                raise ValueError("primes must be strictly increasing")

    @classmethod
    def from_pairs(cls, pairs) -> 'PrimePowerSet':
        pairs = [(int(p), int(s)) for p, s in pairs]
        primes = [p for p, _ in pairs]
        if len(set(primes)) != len(primes):
            raise ValueError(f"duplicate primes in {primes}")
        return cls(tuple(sorted(pairs)))

    @property
    def modulus(self) -> int:
        result = 1
        for p, s in self.pairs:
            result *= p ** s
        return result


@dataclass(frozen=True)
class AChain:
    """a_i counts diagonal entries that are not multiples of p^i"""
    s: int
    a: Tuple[int, ...]
    m: int

    def __post_init__(self):
        object.__setattr__(self, 'a', tuple(int(x) for x in self.a))
        if self.s < 1:
            raise ValueError(f"s must be >= 1, got {self.s}")
        if len(self.a) != self.s:
            raise ValueError(f"chain for s={self.s} needs {self.s} entries, got {len(self.a)}")
        previous = 0
        for value in self.a:
            if value < previous:
                raise ValueError(f"chain {self.a} is not nondecreasing from 0")
            previous = value
        if previous > self.m:
            raise ValueError(f"chain {self.a} exceeds m={self.m}")

    def to_bvector(self, n_prime: int) -> 'BVector':
        return BVector(self.s, tuple(self.m - x for x in self.a), self.m, n_prime)


@dataclass(frozen=True)
class BVector:
    """Co-rank parametrization b_i = m - a_i"""
    s: int
    b: Tuple[int, ...]
    m: int
    n_prime: int

    def __post_init__(self):
        object.__setattr__(self, 'b', tuple(int(x) for x in self.b))
        if self.s < 1 or len(self.b) != self.s:
            raise ValueError(f"b-vector for s={self.s} needs {self.s} entries, got {self.b}")
        if self.n_prime < 0:
            raise ValueError(f"n' must be nonnegative, got {self.n_prime}")
        previous = self.m
        for value in self.b:
            if value > previous or value < 0:
                raise ValueError(f"b-vector {self.b} must satisfy m={self.m} >= b_1 >= ... >= b_s >= 0")
            previous = value

    @property
    def n(self) -> int:
        return self.n_prime + self.m

    def is_zero(self) -> bool:
        return not any(self.b)

    def to_achain(self) -> AChain:
        return AChain(self.s, tuple(self.m - x for x in self.b), self.m)


@dataclass(frozen=True)
class SnfPrefixSpec:
    """Event that the first r SNF diagonal entries equal d_1 | ... | d_r"""
    d: Tuple[int, ...]
    n: int
    m: int

    def __post_init__(self):
        object.__setattr__(self, 'd', tuple(int(x) for x in self.d))
        if self.n < 1 or self.m < 1:
            raise ValueError(f"matrix dimensions must be positive, got {self.n}x{self.m}")
        if not self.d:
            raise ValueError("prefix must contain at least one entry")
        if self.r > min(self.n, self.m):
            raise ValueError(f"prefix length {self.r} exceeds min(n, m) = {min(self.n, self.m)}")
        _check_chain(self.d, 'prefix')

    @property
    def r(self) -> int:
        return len(self.d)

    @property
    def degenerate_reason(self) -> Optional[str]:
        """Why the global density is 0, or None"""
        if any(x == 0 for x in self.d):
            return "prefix contains a zero entry"
        if self.r == self.m == self.n:
            return "prefix fixes every diagonal entry of a square matrix"
        return None

    def oriented(self) -> 'SnfPrefixSpec':
        """Same event with n >= m"""
        if self.n >= self.m:
            return self
        return SnfPrefixSpec(self.d, self.m, self.n)


@dataclass(frozen=True)
class GcdTargetSpec:
    """Event that the first r gcd components equal y_1, ..., y_r"""
    y: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, 'y', tuple(int(x) for x in self.y))
        if not self.y:
            raise ValueError("target must contain at least one component")
        for value in self.y:
            if value < 0:
                raise ValueError(f"target components must be nonnegative, got {value}")

    @property
    def r(self) -> int:
        return len(self.y)

    @property
    def lcm(self) -> int:
        result = 1
        for value in self.y:
            if value:
                result = result * value // gcd(result, value)
        return result


@dataclass
class LocalDistribution:
    """Exact distribution of SNF chains over Z/p^sZ"""
    p: int
    s: int
    n: int
    m: int
    entries: Dict[Tuple[int, ...], Fraction]

    def total(self) -> Fraction:
        return sum(self.entries.values(), Fraction(0))

    def sorted_items(self) -> List[Tuple[Tuple[int, ...], Fraction]]:
        return sorted(self.entries.items())

    def to_json_dict(self) -> Dict:
        return {
            'p': self.p, 's': self.s, 'n': self.n, 'm': self.m,
            'entries': [
                {'a': list(a), 'num': str(value.numerator), 'den': str(value.denominator)}
                for a, value in self.sorted_items()
            ],
        }

    @classmethod
    def from_json_dict(cls, data: Dict) -> 'LocalDistribution':
        entries = {}
        for item in data['entries']:
            chain = AChain(int(data['s']), tuple(item['a']), min(int(data['n']), int(data['m'])))
            entries[chain.a] = Fraction(int(item['num']), int(item['den']))
        return cls(int(data['p']), int(data['s']), int(data['n']), int(data['m']), entries)


@dataclass
class GlobalDensityResult:
    """A density over Z as a certified truncated product over primes"""
    value: ErrorBoundedReal
    prime_cutoff: int
    per_prime_factors: Optional[List[Tuple[int, Fraction]]] = None
    warnings: List[str] = field(default_factory=list)
    heuristic_tail: bool = False
    deficit: Optional[ErrorBoundedReal] = None

    def to_json_dict(self, digits: int = 12) -> Dict:
        from formats import format_error, format_sig
        document = {
            'value': format_sig(self.value.value, digits),
            'abs_error': format_error(self.value.abs_error),
            'prime_cutoff': self.prime_cutoff,
        }
        if self.deficit is not None:
            document['deficit'] = format_sig(self.deficit.value, digits)
            document['deficit_abs_error'] = format_error(self.deficit.abs_error)
        if self.per_prime_factors:
            document['per_prime_factors'] = [
                {'p': p, 'num': str(f.numerator), 'den': str(f.denominator)}
                for p, f in self.per_prime_factors
            ]
        if self.heuristic_tail:
            document['heuristic_tail'] = True
        if self.warnings:
            document['warnings'] = list(self.warnings)
        return document
