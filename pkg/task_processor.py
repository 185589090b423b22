"""
Task Processor - Sharded execution of enumeration and sampling jobs
Disjoint shards run on a worker pool and merge associatively
"""

import logging
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor, ThreadPoolExecutor
from concurrent.futures.process import BrokenProcessPool
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import psutil

from app import settings

logger = logging.getLogger(__name__)

# jobs below this many items run as a single inline shard
SMALL_JOB = 1 << 14


class TaskProcessor:
    """Runs a module-level function over shards and keeps job statistics"""

    def __init__(self, max_workers: Optional[int] = None, mode: str = 'process'):
        if mode not in ('process', 'thread'):
            raise ValueError(f"Unknown pool mode: {mode}")
        cpu_count = psutil.cpu_count(logical=True) or 1
        requested = max_workers if max_workers is not None else settings.threads
        if requested < 1:
            raise ValueError(f"max_workers must be >= 1, got {requested}")
        self.max_workers = max(1, min(requested, settings.threads, cpu_count))
        self.mode = mode
        self.processing_stats = {
            'jobs': 0,
            'shards': 0,
            'failed': 0,
            'inline_fallbacks': 0,
            'total_time': 0.0,
            'avg_job_time': 0.0
        }

    def shard_count(self, total: int) -> int:
        """How many shards to cut a job of `total` items into"""
        return 1 if total < SMALL_JOB or self.max_workers == 1 else 4 * self.max_workers

    @staticmethod
    def partition(total: int, parts: int) -> List[Tuple[int, int]]:
        """Split range(total) into at most `parts` contiguous half-open ranges"""
        if total < 0:
            raise ValueError(f"total must be nonnegative, got {total}")
        parts = max(1, min(parts, total)) if total else 1
        base, extra = divmod(total, parts)
        ranges = []
        start = 0
        for index in range(parts):
            stop = start + base + (1 if index < extra else 0)
            ranges.append((start, stop))
            start = stop
        return ranges

    def map_shards(self, fn: Callable, shards: Sequence) -> List:
        """Apply fn to every shard; results come back in shard order"""
        start_time = time.time()
        shards = list(shards)
        try:
            if self.max_workers == 1 or len(shards) < 2:
                results = [fn(shard) for shard in shards]
            else:
                results = self._run_pool(fn, shards)
            self._update_processing_stats(time.time() - start_time, len(shards), True)
            logger.debug(f"{getattr(fn, '__name__', fn)}: {len(shards)} shards in {time.time() - start_time:.2f}s")
            return results
        except Exception as e:
            self._update_processing_stats(time.time() - start_time, len(shards), False)
            logger.error(f"Shard job {getattr(fn, '__name__', fn)} failed: {e}")
            raise

    def _run_pool(self, fn: Callable, shards: List) -> List:
        executor_class = ProcessPoolExecutor if self.mode == 'process' else ThreadPoolExecutor
        workers = min(self.max_workers, len(shards))
        try:
            with executor_class(max_workers=workers) as executor:
                return list(executor.map(fn, shards))
        except (BrokenProcessPool, NotImplementedError, PermissionError, OSError) as e:
            logger.warning(f"Worker pool unavailable ({e}); running {len(shards)} shards inline")
            self.processing_stats['inline_fallbacks'] += 1
            return [fn(shard) for shard in shards]

    @staticmethod
    def reduce_counters(results: Iterable[Counter]) -> Counter:
        """Merge per-shard histograms"""
        merged = Counter()
        for partial in results:
            merged.update(partial)
        return merged

    def _update_processing_stats(self, processing_time: float, shard_count: int, success: bool):
        """Update processing statistics"""
        self.processing_stats['jobs'] += 1
        self.processing_stats['shards'] += shard_count
        if not success:
            self.processing_stats['failed'] += 1

        total = self.processing_stats['jobs']
        self.processing_stats['total_time'] += processing_time
        self.processing_stats['avg_job_time'] = self.processing_stats['total_time'] / total

    def get_processing_status(self) -> Dict:
        """Get current processor status"""
        return {
            'max_workers': self.max_workers,
            'mode': self.mode,
            'stats': self.processing_stats.copy()
        }


_shared: Dict[str, TaskProcessor] = {}


def get_task_processor(mode: str = 'process') -> TaskProcessor:
    """Process-wide processor per pool mode"""
    if mode not in _shared:
        _shared[mode] = TaskProcessor(mode=mode)
    return _shared[mode]
