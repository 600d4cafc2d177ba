"""
Replicate-level parallel map.

Each task owns its RandomStream, so results do not depend on the worker count
or on scheduling order.
"""
from typing import Callable, Iterable, List, Optional, TypeVar

from joblib import Parallel, delayed

from app.core.config import settings

T = TypeVar("T")


def parallel_map(fn: Callable[..., T], tasks: Iterable[tuple], workers: Optional[int] = None) -> List[T]:
    """
    Apply fn(*task) to every task, preserving order.

    With a single worker the calls run in-process.
    """
    tasks = list(tasks)
    config = settings.get_parallel_config(workers)
    if config["n_jobs"] == 1 or len(tasks) <= 1:
        return [fn(*task) for task in tasks]
    return Parallel(**config)(delayed(fn)(*task) for task in tasks)
