"""
SNF Core - Smith normal form over Z and Z/qZ
Euclidean pivoting with a gcd/lcm repair pass, plus a minors oracle
"""

import logging
from functools import lru_cache
from itertools import combinations
from math import comb, gcd
from typing import List, Optional, Sequence, Tuple

from app import settings
from arith import prime_power_parts
from errors import BudgetExceededError
from models import IntegerMatrix, MinorGcdProfile, SnfDiagonal

logger = logging.getLogger(__name__)

# Above this modulus the local routine skips the lookup tables
TABLE_MODULUS_LIMIT = 1 << 16


def _smallest_nonzero(A: List[List[int]], row0: int, col0: int) -> Optional[Tuple[int, int]]:
    best = None
    position = None
    for i in range(row0, len(A)):
        row = A[i]
        for j in range(col0, len(row)):
            x = row[j]
            if x and (best is None or abs(x) < best):
                best = abs(x)
                position = (i, j)
                if best == 1:
                    return position
    return position


def _swap_into(A: List[List[int]], t: int, i: int, j: int):
    if i != t:
        A[t], A[i] = A[i], A[t]
    if j != t:
        for row in A:
            row[t], row[j] = row[j], row[t]


def _diagonalize(A: List[List[int]]) -> List[int]:
    """Diagonal of A after Euclidean row and column clearing (mutates A)"""
    n, m = len(A), len(A[0])
    diag = []
    for t in range(min(n, m)):
        position = _smallest_nonzero(A, t, t)
        if position is None:
            break
        _swap_into(A, t, *position)
        while True:
            pivot = A[t][t]
            for i in range(t + 1, n):
                q = A[i][t] // pivot
                if q:
                    A[i] = [a - q * b for a, b in zip(A[i], A[t])]
            for j in range(t + 1, m):
                q = A[t][j] // pivot
                if q:
                    for row in A[t:]:
                        row[j] -= q * row[t]
            # remainders are smaller than the pivot, so this loop terminates
            leftovers = [(abs(A[i][t]), i, t) for i in range(t + 1, n) if A[i][t]]
            leftovers += [(abs(A[t][j]), t, j) for j in range(t + 1, m) if A[t][j]]
            if not leftovers:
                break
            _, i, j = min(leftovers)
            _swap_into(A, t, i, j)
        diag.append(abs(A[t][t]))
    return diag


def _repair_chain(diag: List[int]) -> List[int]:
    """Replace pairs (d_i, d_j) by (gcd, lcm) until d_1 | d_2 | ..."""
    d = [x for x in diag if x]
    for i in range(len(d)):
        for j in range(i + 1, len(d)):
            g = gcd(d[i], d[j])
            if g != d[i]:
                d[i], d[j] = g, d[i] // g * d[j]
    return d


def snf_integer(matrix: IntegerMatrix) -> SnfDiagonal:
    """Smith normal form over Z with a nonnegative diagonal"""
    A = matrix.to_rows()
    diag = _repair_chain(_diagonalize(A))
    size = min(matrix.rows, matrix.cols)
    return SnfDiagonal(matrix.rows, matrix.cols, tuple(diag) + (0,) * (size - len(diag)))


def normalize_diagonal(diag: Sequence[int], q: int) -> Tuple[int, ...]:
    """Map each entry to its divisor-of-q representative, multiples of q to 0"""
    normalized = []
    for d in diag:
        g = gcd(d, q)
        normalized.append(0 if g == q else g)
    return tuple(normalized)


@lru_cache(maxsize=64)
def _local_tables(p: int, s: int) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    """Valuation of every residue mod p^s and the inverse of its unit part"""
    q = p ** s
    valuations = [s] * q
    inverses = [0] * q
    for x in range(1, q):
        v = 0
        y = x
        while y % p == 0:
            y //= p
            v += 1
        valuations[x] = v
        inverses[x] = pow(y, -1, q)
    return tuple(valuations), tuple(inverses)


def _valuation_and_inverse(x: int, p: int, q: int) -> Tuple[int, int]:
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v, pow(x, -1, q)


def local_valuations(rows: List[List[int]], p: int, s: int) -> Tuple[int, ...]:
    """Sorted valuations of the SNF over Z/p^sZ; s stands for the zero class"""
    q = p ** s
    size = min(len(rows), len(rows[0]))
    tables = _local_tables(p, s) if q <= TABLE_MODULUS_LIMIT else None
    A = [[x % q for x in row] for row in rows]
    valuations = []
    while A and A[0]:
        best = s
        bi = bj = -1
        for i, row in enumerate(A):
            for j, x in enumerate(row):
                if x:
                    v = tables[0][x] if tables else _valuation_and_inverse(x, p, q)[0]
                    if v < best:
                        best, bi, bj = v, i, j
            if best == 0:
                break
        if bi < 0:
            break
        valuations.append(best)
        pivot_row = A.pop(bi)
        scale = p ** best
        unit = pivot_row[bj] // scale
        inverse = tables[1][unit] if tables else pow(unit, -1, q)
        reduced = []
        for row in A:
            x = row[bj]
            if x:
                factor = (x // scale) * inverse % q
                row = [(a - factor * b) % q for a, b in zip(row, pivot_row)]
            del row[bj]
            reduced.append(row)
        A = reduced
    valuations.extend([s] * (size - len(valuations)))
    return tuple(valuations)


def snf_mod(matrix: IntegerMatrix, q: int) -> SnfDiagonal:
    """SNF over Z/qZ with entries normalized to divisors of q (0 for the zero class)"""
    if q < 2:
        raise ValueError(f"modulus must be >= 2, got {q}")
    parts = prime_power_parts(q)
    if parts is not None:
        p, s = parts
        valuations = local_valuations(matrix.to_rows(), p, s)
        diag = tuple(0 if v == s else p ** v for v in valuations)
        return SnfDiagonal(matrix.rows, matrix.cols, diag)
    diag = snf_integer(matrix.reduce(q)).diag
    return SnfDiagonal(matrix.rows, matrix.cols, normalize_diagonal(diag, q))


def _bareiss_determinant(rows: List[List[int]]) -> int:
    """Fraction-free Gaussian elimination"""
    A = [row[:] for row in rows]
    size = len(A)
    sign = 1
    previous = 1
    for k in range(size - 1):
        if A[k][k] == 0:
            swap = next((i for i in range(k + 1, size) if A[i][k]), None)
            if swap is None:
                return 0
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, size):
            for j in range(k + 1, size):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // previous
        previous = A[k][k]
    return sign * A[size - 1][size - 1]


def minor_count(n: int, m: int) -> int:
    return sum(comb(n, i) * comb(m, i) for i in range(1, min(n, m) + 1))


def minors_gcd_profile(matrix: IntegerMatrix, budget: Optional[int] = None) -> MinorGcdProfile:
    """gcd of all i x i minors for i up to the rank"""
    budget = settings.minor_budget if budget is None else budget
    count = minor_count(matrix.rows, matrix.cols)
    if count > budget:
        raise BudgetExceededError('minors_gcd_profile', count, budget)

    rows = matrix.to_rows()
    profile = []
    for size in range(1, min(matrix.rows, matrix.cols) + 1):
        g = 0
        for row_set in combinations(range(matrix.rows), size):
            for col_set in combinations(range(matrix.cols), size):
                minor = [[rows[i][j] for j in col_set] for i in row_set]
                g = gcd(g, _bareiss_determinant(minor))
        if g == 0:
            break
        profile.append(g)
    return MinorGcdProfile(tuple(profile), len(profile))
