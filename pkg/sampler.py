"""
Sampler - Seeded Monte Carlo estimates of finite-box densities
Reproducible Philox streams per block, exact event tests, Wilson intervals
"""

import logging
import math
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.random import Generator, Philox, SeedSequence

from app import settings
from gcd_density import lambda_box_mod
from models import GcdTargetSpec, IntegerMatrix, SnfPrefixSpec
from polynomials import GcdSystem, MultivariatePolynomial
from snf_core import snf_integer
from task_processor import TaskProcessor, get_task_processor

logger = logging.getLogger(__name__)

Z95 = 1.959963984540054
EVENT_KINDS = ('prefix', 'full-rank', 'det-equals', 'cyclic')
# largest box radius numpy can sample in int64
MAX_K = 2**62
# 2x2 determinants stay exact in int64 below this radius
SMALL_DET_K = 2**31


@dataclass(frozen=True)
class SampleBox:
    """Entries uniform on {-k, ..., k}"""
    k: int
    trials: int
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"box radius k must be >= 1, got {self.k}")
        if self.k >= MAX_K:
            raise ValueError(f"box radius k must be below 2**62, got {self.k}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    @classmethod
    def default(cls, seed: int = 0) -> 'SampleBox':
        return cls(settings.sample_k, settings.sample_trials, seed)


@dataclass(frozen=True)
class Estimate:
    """Hit rate with a Wilson 95% interval"""
    p_hat: float
    stderr: float
    ci95_low: float
    ci95_high: float
    trials: int
    hits: int
    seed: Optional[int] = None
    k: Optional[int] = None

    @classmethod
    def from_hits(cls, hits: int, trials: int, seed: Optional[int] = None,
                  k: Optional[int] = None) -> 'Estimate':
        p_hat = hits / trials
        low, high = wilson_interval(hits, trials)
        return cls(p_hat, math.sqrt(p_hat * (1 - p_hat) / trials), low, high, trials, hits, seed, k)

    def contains(self, value) -> bool:
        return self.ci95_low <= float(value) <= self.ci95_high

    def to_json_dict(self) -> Dict:
        return {
            'p_hat': self.p_hat,
            'stderr': self.stderr,
            'ci95': [self.ci95_low, self.ci95_high],
            'trials': self.trials,
            'hits': self.hits,
            'seed': self.seed,
            'k': self.k,
        }


def wilson_interval(hits: int, trials: int, z: float = Z95) -> Tuple[float, float]:
    """Wilson score interval for a binomial proportion"""
    if trials < 1 or not 0 <= hits <= trials:
        raise ValueError(f"need 0 <= hits <= trials and trials >= 1, got {hits}/{trials}")
    p_hat = hits / trials
    z2 = z * z
    scale = 1 + z2 / trials
    center = (p_hat + z2 / (2 * trials)) / scale
    margin = z * math.sqrt(p_hat * (1 - p_hat) / trials + z2 / (4 * trials * trials)) / scale
    low = min(max(0.0, center - margin), p_hat)
    high = max(min(1.0, center + margin), p_hat)
    return low, high


@dataclass(frozen=True)
class SnfEvent:
    """Event on the SNF diagonal of an integer matrix"""
    kind: str
    prefix: Tuple[int, ...] = ()
    value: int = 0

    def __post_init__(self):
        if self.kind not in EVENT_KINDS:
            raise ValueError(f"unknown event {self.kind!r}, expected one of {', '.join(EVENT_KINDS)}")
        if self.kind == 'prefix' and not self.prefix:
            raise ValueError("prefix event needs at least one entry")
        if self.kind == 'cyclic' and self.value < 0:
            raise ValueError(f"cyclic bound must be nonnegative, got {self.value}")

    @classmethod
    def parse(cls, text: str) -> 'SnfEvent':
        """prefix:2,6 | full-rank | det-equals:c | cyclic:l"""
        kind, _, argument = text.strip().partition(':')
        try:
            if kind == 'prefix':
                return cls(kind, tuple(int(x) for x in argument.split(',') if x.strip()))
            if kind in ('det-equals', 'cyclic'):
                return cls(kind, value=int(argument))
        except ValueError as e:
            raise ValueError(f"malformed event {text!r}: {e}")
        if argument:
            raise ValueError(f"event {kind!r} takes no argument")
        return cls(kind)

    @classmethod
    def from_prefix(cls, spec: SnfPrefixSpec) -> 'SnfEvent':
        return cls('prefix', spec.d)

    def check_shape(self, n: int, m: int):
        if self.kind == 'prefix':
            SnfPrefixSpec(self.prefix, n, m)
        if self.kind == 'det-equals' and n != m:
            raise ValueError(f"det-equals needs a square matrix, got {n}x{m}")

    def matches(self, diag: Sequence[int]) -> bool:
        """Exact test on a nonnegative SNF diagonal; det-equals compares |det|"""
        if self.kind == 'prefix':
            return tuple(diag[:len(self.prefix)]) == self.prefix
        if self.kind == 'full-rank':
            return all(diag)
        if self.kind == 'det-equals':
            return math.prod(diag) == abs(self.value)
        return sum(1 for d in diag if d != 1) <= self.value

    def __str__(self):
        if self.kind == 'prefix':
            return 'prefix:' + ','.join(str(x) for x in self.prefix)
        if self.kind in ('det-equals', 'cyclic'):
            return f"{self.kind}:{self.value}"
        return self.kind


def _block_seeds(box: SampleBox) -> List[Tuple[SeedSequence, int]]:
    """Fixed-size blocks with spawned seeds, independent of the worker count"""
    size = settings.shard_size
    count = -(-box.trials // size)
    seeds = SeedSequence(box.seed).spawn(count)
    return [(seeds[i], min(size, box.trials - i * size)) for i in range(count)]


def _mu_block(job: Tuple) -> int:
    n, m, k, seed, count, event = job
    rng = Generator(Philox(seed))
    entries = rng.integers(-k, k, size=(count, n, m), endpoint=True, dtype=np.int64)
    if event.kind == 'prefix' and len(event.prefix) == 1:
        # d_1 is the gcd of all entries
        d1 = np.gcd.reduce(entries.reshape(count, n * m), axis=1)
        return int(np.count_nonzero(d1 == event.prefix[0]))
    if n == m == 2 and event.kind in ('det-equals', 'full-rank') and k < SMALL_DET_K:
        # exact in int64: |ad - bc| <= 2k^2 < 2^63
        det = entries[:, 0, 0] * entries[:, 1, 1] - entries[:, 0, 1] * entries[:, 1, 0]
        if event.kind == 'full-rank':
            return int(np.count_nonzero(det))
        return int(np.count_nonzero(np.abs(det) == abs(event.value)))
    hits = 0
    for sample in entries:
        diag = snf_integer(IntegerMatrix(n, m, tuple(int(x) for x in sample.ravel()))).diag
        hits += event.matches(diag)
    return hits


def _lambda_block(job: Tuple) -> int:
    system, k, seed, count, target = job
    rng = Generator(Philox(seed))
    points = rng.integers(-k, k, size=(count, system.d), endpoint=True, dtype=np.int64)
    hits = 0
    r = len(target)
    for x in points:
        hits += system.evaluate([int(v) for v in x])[:r] == target
    return hits


def _run_blocks(fn, jobs: List[Tuple], processor: Optional[TaskProcessor]) -> int:
    processor = processor or get_task_processor()
    return sum(processor.map_shards(fn, jobs))


def sample_mu(n: int, m: int, box: SampleBox, event: Union[SnfEvent, SnfPrefixSpec, str],
              processor: Optional[TaskProcessor] = None) -> Estimate:
    """Estimate the probability of an SNF event for n x m matrices on the box"""
    if n < 1 or m < 1:
        raise ValueError(f"matrix dimensions must be positive, got {n}x{m}")
    if isinstance(event, str):
        event = SnfEvent.parse(event)
    elif isinstance(event, SnfPrefixSpec):
        event = SnfEvent.from_prefix(event)
    event.check_shape(n, m)

    start = time.time()
    jobs = [(n, m, box.k, seed, count, event) for seed, count in _block_seeds(box)]
    logger.info(f"Sampling {event} for {n}x{m} matrices: k={box.k}, {box.trials} trials, seed {box.seed}")
    hits = _run_blocks(_mu_block, jobs, processor)
    estimate = Estimate.from_hits(hits, box.trials, box.seed, box.k)
    logger.info(f"Sampled {event}: p_hat={estimate.p_hat:.6f} in {time.time() - start:.2f}s")
    return estimate


def sample_lambda(system: GcdSystem, box: SampleBox, spec: GcdTargetSpec,
                  processor: Optional[TaskProcessor] = None) -> Estimate:
    """Estimate the probability that g(x) starts with y on the box"""
    if spec.r > system.w:
        raise ValueError(f"target has {spec.r} components but the system has {system.w} gcds")
    jobs = [(system, box.k, seed, count, spec.y) for seed, count in _block_seeds(box)]
    logger.info(f"Sampling gcd target {list(spec.y)}: k={box.k}, {box.trials} trials, seed {box.seed}")
    hits = _run_blocks(_lambda_block, jobs, processor)
    return Estimate.from_hits(hits, box.trials, box.seed, box.k)


def sigma_box(poly: MultivariatePolynomial, p: int, k: int, budget: Optional[int] = None) -> Fraction:
    """Exact probability that p | G(x) for x uniform on {-k..k}^d"""
    return lambda_box_mod(GcdSystem.single([poly]), p, GcdTargetSpec((0,)), k, budget)


def convergence_series(event: Union[SnfEvent, SnfPrefixSpec, str], n: int, m: int,
                       ks: Sequence[int], trials: Optional[int] = None,
                       seed: int = 0) -> List[Tuple[int, Estimate]]:
    """Estimates of the same event across growing box radii"""
    trials = settings.sample_trials if trials is None else trials
    return [(k, sample_mu(n, m, SampleBox(k, trials, seed), event)) for k in ks]
