from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Sequence


def _run_chunk(func: Callable, args: tuple, indices: Sequence[int]) -> list:
    return [func(*args, i) for i in indices]


def ordered_map(func: Callable, args: tuple, count: int, workers: int = 1) -> list:
    """``[func(*args, i) for i in range(count)]``, optionally over processes.

    Chunks are contiguous index ranges and results come back in index order,
    so the output does not depend on ``workers``.  ``func`` must be a
    module-level function.
    """
    if workers <= 1 or count <= 1:
        return _run_chunk(func, args, range(count))
    size = -(-count // workers)
    chunks = [range(lo, min(lo + size, count)) for lo in range(0, count, size)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = pool.map(_run_chunk, [func] * len(chunks), [args] * len(chunks), chunks)
        return [item for part in parts for item in part]
