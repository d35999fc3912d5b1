"""
Performance utilities: ordered parallel evaluation and progress bars.
"""

from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from typing import Any, Callable, Iterator, List, TypeVar

from rich.console import Console
from rich.progress import BarColumn, MofNCompleteColumn, Progress, TextColumn, TimeElapsedColumn

T = TypeVar('T')

console = Console(stderr=True)


def batch_process(items: List[T], func: Callable[[T], Any], max_workers: int = 1) -> List[Any]:
    """
    Apply `func` to every item, in parallel when max_workers > 1.

    Args:
        items: Items to process
        func: Function to apply to each item
        max_workers: Maximum number of worker threads

    Returns:
        Results in the order of `items`; the first exception raised by
        `func` propagates.
    """
    if max_workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]

    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        return list(executor.map(func, items))


@contextmanager
def with_progress(total: int, description: str = "Processing", enabled: bool = True) -> Iterator[Callable[[], None]]:
    """
    Show a progress bar for `total` units of work.

    Yields:
        A callable advancing the bar by one unit; a no-op when disabled.
    """
    if not enabled:
        yield lambda: None
        return

    progress = Progress(
        TextColumn("[bold cyan]{task.description}"),
        BarColumn(),
        MofNCompleteColumn(),
        TimeElapsedColumn(),
        console=console,
        transient=True,
    )
    with progress:
        task = progress.add_task(description, total=total)
        yield lambda: progress.advance(task)
