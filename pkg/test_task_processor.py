from collections import Counter

import pytest

from task_processor import SMALL_JOB, TaskProcessor, get_task_processor


def _square_sum(shard):
    start, stop = shard
    return sum(i * i for i in range(start, stop))


def _fail(shard):
    raise RuntimeError(f"shard {shard} failed")


def test_partition_covers_range():
    assert TaskProcessor.partition(10, 3) == [(0, 4), (4, 7), (7, 10)]
    assert TaskProcessor.partition(2, 5) == [(0, 1), (1, 2)]
    assert TaskProcessor.partition(0, 4) == [(0, 0)]
    with pytest.raises(ValueError):
        TaskProcessor.partition(-1, 2)


def test_shard_count(inline_processor, thread_processor):
    assert inline_processor.shard_count(10**9) == 1
    assert thread_processor.shard_count(SMALL_JOB - 1) == 1
    workers = thread_processor.max_workers
    assert thread_processor.shard_count(SMALL_JOB) == (1 if workers == 1 else 4 * workers)


def test_map_shards_keeps_order(thread_processor):
    shards = TaskProcessor.partition(1000, 7)
    results = thread_processor.map_shards(_square_sum, shards)
    assert results == [_square_sum(shard) for shard in shards]
    assert sum(results) == sum(i * i for i in range(1000))


def test_reduce_counters():
    merged = TaskProcessor.reduce_counters([Counter({'a': 1}), Counter({'a': 2, 'b': 1})])
    assert merged == Counter({'a': 3, 'b': 1})


def test_failures_are_counted_and_raised(inline_processor):
    with pytest.raises(RuntimeError):
        inline_processor.map_shards(_fail, [(0, 1)])
    status = inline_processor.get_processing_status()
    assert status['stats']['failed'] == 1
    assert status['stats']['jobs'] == 1
    assert status['max_workers'] == 1


def test_invalid_configuration():
    with pytest.raises(ValueError):
        TaskProcessor(mode='gpu')
    with pytest.raises(ValueError):
        TaskProcessor(max_workers=0)


def test_shared_processor_per_mode():
    assert get_task_processor('thread') is get_task_processor('thread')
    assert get_task_processor('thread') is not get_task_processor('process')
