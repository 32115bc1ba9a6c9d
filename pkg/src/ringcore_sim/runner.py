"""State-tracked execution of independent per-group receiver jobs."""

import logging
import threading
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Optional

import psutil

from .constants import RunState

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ChannelJob:
    """One unit of work; ``func`` must be a module-level function for pooling."""

    key: Hashable
    func: Callable[..., Any]
    kwargs: dict[str, Any] = field(default_factory=dict)


@dataclass
class JobOutcome:
    key: Hashable
    result: Any = None
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None


def resolve_workers(parallel: int) -> int:
    """Worker count; 0 means one per physical core."""
    if parallel > 0:
        return parallel
    return psutil.cpu_count(logical=False) or psutil.cpu_count() or 1


def _rss_mb() -> float:
    try:
        proc = psutil.Process()
        rss = proc.memory_info().rss
        for child in proc.children(recursive=True):
            try:
                rss += child.memory_info().rss
            except psutil.Error:
                pass
        return round(rss / 1024 / 1024, 1)
    except psutil.Error:
        return 0.0


class ChannelJobRunner:
    """Runs jobs serially or on a process pool while tracking run state."""

    def __init__(self, parallel: int = 1):
        self.workers = resolve_workers(parallel)
        self.state = RunState.PENDING
        self.state_callbacks: list[Callable[[RunState], None]] = []
        self._state_lock = threading.Lock()
        self.total = 0
        self.completed = 0
        self.failed = 0
        self.peak_rss_mb = 0.0

    def add_state_callback(self, callback: Callable[[RunState], None]) -> None:
        """Add a callback to be notified when the run state changes (thread-safe)."""
        with self._state_lock:
            self.state_callbacks.append(callback)

    def remove_state_callback(self, callback: Callable[[RunState], None]) -> None:
        with self._state_lock:
            if callback in self.state_callbacks:
                self.state_callbacks.remove(callback)

    def _set_state(self, new_state: RunState) -> None:
        """Set the run state and notify callbacks (thread-safe)."""
        callbacks = []
        with self._state_lock:
            if self.state != new_state:
                self.state = new_state
                callbacks = self.state_callbacks.copy()

        # Callbacks run outside the lock
        for callback in callbacks:
            try:
                callback(new_state)
            except Exception:
                logger.debug("State callback failed", exc_info=True)

    def _record(self, outcome: JobOutcome) -> None:
        rss = _rss_mb()
        with self._state_lock:
            self.completed += 1
            if not outcome.ok:
                self.failed += 1
            self.peak_rss_mb = max(self.peak_rss_mb, rss)
        if not outcome.ok:
            logger.warning("Job %s failed: %s", outcome.key, outcome.error)

    def run(self, jobs: list[ChannelJob]) -> list[JobOutcome]:
        """Execute all jobs; outcomes come back in submission order.

        A job raising an exception yields a failed outcome instead of
        aborting the run.
        """
        with self._state_lock:
            self.total = len(jobs)
            self.completed = 0
            self.failed = 0
        self._set_state(RunState.RUNNING)
        outcomes: dict[int, JobOutcome] = {}
        try:
            if self.workers == 1 or len(jobs) <= 1:
                for index, job in enumerate(jobs):
                    try:
                        outcome = JobOutcome(job.key, job.func(**job.kwargs))
                    except Exception as exc:
                        outcome = JobOutcome(job.key, error=f"{type(exc).__name__}: {exc}")
                    outcomes[index] = outcome
                    self._record(outcome)
            else:
                with ProcessPoolExecutor(max_workers=self.workers) as pool:
                    futures = {
                        pool.submit(job.func, **job.kwargs): index
                        for index, job in enumerate(jobs)
                    }
                    for future in as_completed(futures):
                        index = futures[future]
                        key = jobs[index].key
                        try:
                            outcome = JobOutcome(key, future.result())
                        except Exception as exc:
                            outcome = JobOutcome(key, error=f"{type(exc).__name__}: {exc}")
                        outcomes[index] = outcome
                        self._record(outcome)
        except BaseException:
            self._set_state(RunState.FAILED)
            raise
        self._set_state(RunState.DONE)
        return [outcomes[i] for i in range(len(jobs))]

    def get_status(self) -> dict[str, Any]:
        """Current run status (thread-safe)."""
        with self._state_lock:
            return {
                "state": self.state,
                "total": self.total,
                "completed": self.completed,
                "failed": self.failed,
                "workers": self.workers,
                "peak_rss_mb": self.peak_rss_mb,
            }
