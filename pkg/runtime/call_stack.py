"""
Host stack for deep @C recursion.

Each @C activation costs a handful of Python frames, so the evaluator runs
on a worker thread whose stack is sized for the configured call depth. The
Python recursion limit is raised to what that stack can hold; it is shared
by the whole process, so concurrent runs keep it raised until the last one
finishes.
"""
import logging
import sys
import threading
from contextlib import contextmanager
from typing import Any, Callable, Dict, Iterator

logger = logging.getLogger(__name__)

# C stack reserved per Python frame, with headroom over what CPython uses
PYTHON_FRAME_BYTES = 640
FRAMES_PER_CALL = 16
MIN_STACK_BYTES = 64 << 20
MAX_STACK_BYTES = 1 << 30

_stack_lock = threading.Lock()
_limit_lock = threading.Lock()
_limit_users = 0
_saved_limit = 0


def stack_bytes_for(max_call_depth: int) -> int:
    wanted = max_call_depth * FRAMES_PER_CALL * PYTHON_FRAME_BYTES
    return max(MIN_STACK_BYTES, min(wanted, MAX_STACK_BYTES))


@contextmanager
def recursion_limit(limit: int) -> Iterator[None]:
    """Raise the recursion limit to at least `limit`; restored when no run needs it."""
    global _limit_users, _saved_limit
    with _limit_lock:
        if _limit_users == 0:
            _saved_limit = sys.getrecursionlimit()
        _limit_users += 1
        if sys.getrecursionlimit() < limit:
            sys.setrecursionlimit(limit)
    try:
        yield
    finally:
        with _limit_lock:
            _limit_users -= 1
            if _limit_users == 0:
                sys.setrecursionlimit(_saved_limit)


def run_on_large_stack(fn: Callable[[], Any], max_call_depth: int) -> Any:
    """Call `fn` on a thread with a stack deep enough for `max_call_depth` activations."""
    outcome: Dict[str, Any] = {}
    size = stack_bytes_for(max_call_depth)

    def target(stack_size: int) -> None:
        try:
            with recursion_limit(stack_size // PYTHON_FRAME_BYTES):
                outcome["value"] = fn()
        except BaseException as e:
            outcome["error"] = e

    while True:
        try:
            with _stack_lock:
                previous = threading.stack_size(size)
                try:
                    worker = threading.Thread(target=target, args=(size,), name="atc-evaluator", daemon=True)
                    worker.start()
                finally:
                    threading.stack_size(previous)
            break
        except (RuntimeError, ValueError, MemoryError) as e:
            if size <= MIN_STACK_BYTES:
                raise
            logger.warning(f"Could not start evaluator thread with a {size >> 20} MiB stack: {e}")
            size //= 2

    worker.join()
    if "error" in outcome:
        raise outcome["error"]
    return outcome["value"]
