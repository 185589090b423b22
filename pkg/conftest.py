import os

# keep worker pools small under test runners
os.environ.setdefault('SNFDIST_THREADS', '2')

import pytest

from task_processor import TaskProcessor


@pytest.fixture
def inline_processor():
    return TaskProcessor(max_workers=1)


@pytest.fixture
def thread_processor():
    return TaskProcessor(max_workers=2, mode='thread')


@pytest.fixture
def write_file(tmp_path):
    """Write text to a file under tmp_path and return its path as a string"""
    def write(name: str, text: str) -> str:
        path = tmp_path / name
        path.write_text(text, encoding='utf-8')
        return str(path)
    return write
