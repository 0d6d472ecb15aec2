"""
Atomic file output: write to a temp file in the target directory, then
os.replace it over the destination. Partial files are never left behind.
"""
import logging
import os
import tempfile
from contextlib import contextmanager

logger = logging.getLogger(__name__)


@contextmanager
def atomic_path(path: str):
    """Yield a temp path; on success it is renamed to ``path``."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", suffix=os.path.splitext(path)[1], dir=directory)
    os.close(fd)
    try:
        yield tmp
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise


def write_text_atomic(path: str, text: str):
    with atomic_path(path) as tmp:
        with open(tmp, "w", encoding="utf-8") as f:
            f.write(text)
