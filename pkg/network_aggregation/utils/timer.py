import time

from contextlib import contextmanager
from typing import Dict, Iterator, Optional


class TimerCache:
    """
    Tree node holding the accumulated time of one named phase and the
        phases nested inside it
    """

    def __init__(self, parent_cache: Optional["TimerCache"]):
        self.parent_cache = parent_cache
        self.time = 0.0
        self.cache: Dict[str, "TimerCache"] = {}

    def __contains__(self, key: str):
        return key in self.cache

    def __setitem__(self, name: str, value: "TimerCache") -> None:
        self.cache[name] = value

    def __getitem__(self, name: str) -> "TimerCache":
        try:
            return self.cache[name]
        except KeyError as exception:
            raise KeyError(f"{name} not found in TimerCache") from exception

    def as_dict(self) -> dict:
        """
        Convert the cache tree into nested dictionaries of seconds

        Returns:
            dict: {"seconds": float, "children": {name: dict}}
        """
        return {"seconds": round(self.time, 6),
                "children": {name: cache.as_dict()
                             for name, cache in self.cache.items()}}

    def display(self, name: str, indent: int):
        """
        Print this phase and its children with tab indentation

        Args:
            name (str): name of this phase
            indent (int): number of tabs to indent by
        """
        tab_char = "\t"

        print(f"{tab_char*indent}{name}:{round(self.time, 4)}")

        for cache_name, cache in self.cache.items():
            cache.display(cache_name, indent + 1)


class TimeDict:
    """
    A single running measurement
    """

    def __str__(self):
        return f"[D] {self.event_name}: {self.len}"

    def __init__(self, event_name: str):
        self.event_name = event_name

        self.start_time: float = None
        self.stop_time: float = None

        self._total_time = 0.0

    @property
    def len(self):
        """
        Elapsed seconds, a running estimate while the measurement is open
        """
        if self.stop_time is None:
            return time.perf_counter() - self.start_time
        return self._total_time

    def start(self):
        """
        Start the measurement

        Raises:
            RuntimeError: the measurement is already running
        """
        if self.start_time is not None:
            raise RuntimeError(
                "Timer event already in progress, call `stop` before calling "
                "start again")

        self.start_time = time.perf_counter()

    def stop(self):
        """
        Stop the measurement

        Raises:
            RuntimeError: the measurement was never started
        """
        stop_time = time.perf_counter()

        if self.start_time is None:
            raise RuntimeError(
                "Timer event has not been started, call `start` before calling"
                " `stop`")

        self.stop_time = stop_time
        self._total_time += self.stop_time - self.start_time


class Timer:
    """
    Nested wall clock timer, phases started while another phase is running
        are recorded as its children
    """

    def __init__(self):
        self.current_timer: TimeDict = None
        self.root_cache = TimerCache(None)
        self.current_cache = self.root_cache
        self.timer_stack = []

    def start(self, info: str, reset: bool = False):
        """
        Start a new (possibly nested) phase

        Args:
            info (str): name of the phase
            reset (bool, optional): drop everything measured so far.
                Defaults to False.
        """
        if reset:
            self.root_cache = TimerCache(None)
            self.current_cache = self.root_cache
            self.current_timer = None
            self.timer_stack = []

        if self.current_timer:
            self.timer_stack.append(self.current_timer)

        if info not in self.current_cache:
            self.current_cache[info] = TimerCache(self.current_cache)

        self.current_cache = self.current_cache[info]
        self.current_timer = TimeDict(info)
        self.current_timer.start()

    def stop(self) -> float:
        """
        Stop the innermost running phase

        Returns:
            float: seconds spent in the phase that was stopped
        """
        self.current_timer.stop()
        elapsed = self.current_timer.len
        self.current_cache.time += elapsed
        self.current_cache = self.current_cache.parent_cache

        if self.timer_stack:
            self.current_timer = self.timer_stack.pop()
        else:
            self.current_timer = None
        return elapsed

    @contextmanager
    def measure(self, info: str) -> Iterator[None]:
        """
        Context manager version of start/stop
        """
        self.start(info)
        try:
            yield
        finally:
            self.stop()

    def as_dict(self) -> dict:
        """
        Every phase measured since the last reset as nested dictionaries
        """
        return self.root_cache.as_dict()["children"]

    def display(self):
        """
        Print every measured phase
        """
        for name, cache in self.root_cache.cache.items():
            cache.display(name, 0)
