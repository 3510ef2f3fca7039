"""
Worker-pool functions shared by the optimizer and the Monte Carlo simulator.
"""
import threading
from concurrent.futures import ThreadPoolExecutor

from tqdm.auto import tqdm

from pyHTSecrecy.utility.utils import devLogger, htparams, thread_count


def _run_item(func, index, item):
    devLogger.debug(
        f"Running {getattr(func, '__name__', func)}[{index}] [Thread={threading.current_thread().name}]."
    )
    return func(item)


def map_parallel(func, items, desc=None, max_workers=None):
    """
    Apply ``func`` to every item on a thread pool.

    Parameters
    ----------
    func: callable
        Pure function of one argument. It must not mutate shared state.
    items: iterable
        Work items.
    desc: str, optional
        Progress bar label.
    max_workers: int, optional
        Worker cap. Defaults to :py:func:`utility.utils.thread_count`.

    Returns
    -------
    list
        ``[func(item) for item in items]``, in input order regardless of completion order.
    """
    items = list(items)
    if not items:
        return []
    workers = min(max_workers or thread_count(), len(items))
    show = htparams["system"]["display"]["progress_bars"] and desc is not None

    if workers == 1:
        return [
            _run_item(func, i, item)
            for i, item in enumerate(tqdm(items, desc=desc, disable=not show))
        ]

    results = [None] * len(items)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = {
            pool.submit(_run_item, func, i, item): i for i, item in enumerate(items)
        }
        with tqdm(total=len(items), desc=desc, disable=not show) as pbar:
            for future, i in futures.items():
                results[i] = future.result()
                pbar.update(n=1)

    devLogger.debug(f"Finished {len(items)} items on {workers} threads.")
    return results
