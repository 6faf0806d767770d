from multiprocessing import Pool
from typing import Callable, List, Sequence, TypeVar

from src.utils.logging import get_logger

logger = get_logger(__name__)

Point = TypeVar("Point")
Result = TypeVar("Result")


def run_sharded(
    task: Callable[[Point], Result], points: Sequence[Point], workers: int = 1
) -> List[Result]:
    """
    Evaluate task on every point, one point per shard.

    Results come back in the order of points whatever the worker count, so
    the merged output is identical for any pool size. task must be picklable
    (a module-level function or a functools.partial of one).

    Args:
        task: Pure function of one parameter point
        points: Parameter points, e.g. Fock indices or couplings
        workers: Pool size; 1 runs in-process

    Returns:
        list: task(point) for each point, in input order
    """
    points = list(points)
    workers = max(1, min(workers, len(points)))
    logger.info(f"Dispatching {len(points)} shards to {workers} worker(s)")
    if workers == 1:
        return [task(point) for point in points]
    with Pool(workers) as pool:
        return pool.map(task, points, chunksize=1)
