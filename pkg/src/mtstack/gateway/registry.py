"""Worker registry: registration, heartbeats, and routing.

Health is evaluated lazily from heartbeat age, so a worker that went
silent flips to unhealthy the moment anyone looks, without a reaper
task.  Routing picks the healthy worker with the fewest requests in
flight, breaking ties by registration order.
"""

from __future__ import annotations

import itertools
import threading
import time
import uuid
from dataclasses import dataclass
from typing import Callable

from ..corpus import LANGUAGES

SUPPORTED_PAIRS: tuple[tuple[str, str], ...] = tuple(
    [("en", lang) for lang in LANGUAGES if lang != "en"]
    + [(lang, "en") for lang in LANGUAGES if lang != "en"]
)

DEFAULT_HEARTBEAT_TIMEOUT = 15.0

HEALTHY = "healthy"
UNHEALTHY = "unhealthy"


class UnsupportedPairError(ValueError):
    def __init__(self, source: str, target: str):
        self.pair = (source, target)
        pairs = ", ".join(f"{s}-{t}" for s, t in SUPPORTED_PAIRS)
        super().__init__(
            f"unsupported language pair {source}-{target}; supported: {pairs}"
        )


class NoWorkerError(LookupError):
    def __init__(self, source: str, target: str):
        self.pair = (source, target)
        super().__init__(f"no healthy worker for pair {source}-{target}")


class UnknownWorkerError(KeyError):
    def __init__(self, worker_id: str):
        self.worker_id = worker_id
        super().__init__(f"unknown worker: {worker_id}")


def is_supported_pair(source: str, target: str) -> bool:
    return (source, target) in SUPPORTED_PAIRS


@dataclass
class WorkerDescriptor:
    worker_id: str
    language_pair: tuple[str, str]
    endpoint: str
    last_heartbeat: float
    registration_index: int
    in_flight: int = 0

    def status(self, now: float, timeout: float) -> str:
        return HEALTHY if now - self.last_heartbeat <= timeout else UNHEALTHY


class WorkerRegistry:
    """Thread-safe descriptor table shared by all gateway handlers."""

    def __init__(
        self,
        heartbeat_timeout: float = DEFAULT_HEARTBEAT_TIMEOUT,
        clock: Callable[[], float] = time.monotonic,
    ):
        self.heartbeat_timeout = heartbeat_timeout
        self._clock = clock
        self._lock = threading.Lock()
        self._workers: dict[str, WorkerDescriptor] = {}
        self._order = itertools.count()

    def register(
        self,
        source: str,
        target: str,
        endpoint: str,
        worker_id: str | None = None,
    ) -> WorkerDescriptor:
        """Add a worker, or refresh one re-registering under its old id."""
        if not is_supported_pair(source, target):
            raise UnsupportedPairError(source, target)
        with self._lock:
            now = self._clock()
            if worker_id is not None and worker_id in self._workers:
                descriptor = self._workers[worker_id]
                descriptor.endpoint = endpoint
                descriptor.language_pair = (source, target)
                descriptor.last_heartbeat = now
                return descriptor
            descriptor = WorkerDescriptor(
                worker_id=worker_id or uuid.uuid4().hex,
                language_pair=(source, target),
                endpoint=endpoint,
                last_heartbeat=now,
                registration_index=next(self._order),
            )
            self._workers[descriptor.worker_id] = descriptor
            return descriptor

    def heartbeat(self, worker_id: str) -> str:
        with self._lock:
            descriptor = self._workers.get(worker_id)
            if descriptor is None:
                raise UnknownWorkerError(worker_id)
            descriptor.last_heartbeat = self._clock()
            return descriptor.status(self._clock(), self.heartbeat_timeout)

    def route(self, source: str, target: str) -> WorkerDescriptor:
        """The healthy worker to send one (source, target) request to."""
        if not is_supported_pair(source, target):
            raise UnsupportedPairError(source, target)
        with self._lock:
            now = self._clock()
            candidates = [
                w
                for w in self._workers.values()
                if w.language_pair == (source, target)
                and w.status(now, self.heartbeat_timeout) == HEALTHY
            ]
            if not candidates:
                raise NoWorkerError(source, target)
            return min(
                candidates, key=lambda w: (w.in_flight, w.registration_index)
            )

    def acquire(self, worker_id: str) -> None:
        with self._lock:
            if worker_id in self._workers:
                self._workers[worker_id].in_flight += 1

    def release(self, worker_id: str) -> None:
        with self._lock:
            descriptor = self._workers.get(worker_id)
            if descriptor is not None and descriptor.in_flight > 0:
                descriptor.in_flight -= 1

    def workers_for(self, source: str, target: str) -> list[WorkerDescriptor]:
        with self._lock:
            return [
                w
                for w in self._workers.values()
                if w.language_pair == (source, target)
            ]

    def snapshot(self) -> list[dict]:
        """Registry state for the health endpoint."""
        with self._lock:
            now = self._clock()
            rows = []
            for w in sorted(self._workers.values(), key=lambda d: d.registration_index):
                rows.append(
                    {
                        "worker_id": w.worker_id,
                        "pair": f"{w.language_pair[0]}-{w.language_pair[1]}",
                        "endpoint": w.endpoint,
                        "status": w.status(now, self.heartbeat_timeout),
                        "heartbeat_age_s": round(now - w.last_heartbeat, 3),
                        "in_flight": w.in_flight,
                    }
                )
            return rows
