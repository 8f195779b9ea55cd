"""
Monitoring and observability for the Sato-Tate toolkit.
"""

import json
import logging
import sys
import threading
import time
from contextlib import contextmanager
from datetime import datetime
from typing import Any, Dict, Iterator, Optional

# Try to import Prometheus client
try:
    from prometheus_client import Counter, Histogram
    PROMETHEUS_AVAILABLE = True
except ImportError:
    PROMETHEUS_AVAILABLE = False
    Counter = None
    Histogram = None

logger = logging.getLogger(__name__)

if PROMETHEUS_AVAILABLE:
    primes_counted_total = Counter(
        'primes_counted_total',
        'Total primes processed by point counting',
        ['status']
    )

    prime_count_duration = Histogram(
        'prime_count_duration_seconds',
        'Point counting duration per prime'
    )

    haar_samples_total = Counter(
        'haar_samples_total',
        'Total Haar samples drawn',
        ['component']
    )
else:
    primes_counted_total = None
    prime_count_duration = None
    haar_samples_total = None


def init_logging(level: str = "INFO") -> None:
    """Configure the root logger for command-line runs."""
    root = logging.getLogger()
    if not root.handlers:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter("%(message)s"))
        root.addHandler(handler)
    root.setLevel(getattr(logging, level.upper(), logging.INFO))


def structured_log(level: str, message: str, **kwargs: Any) -> None:
    """Create structured log entry."""
    log_entry = {
        "timestamp": datetime.utcnow().isoformat(),
        "level": level,
        "message": message,
        **kwargs
    }

    log_message = json.dumps(log_entry, default=str)
    logger.log(getattr(logging, level, logging.INFO), log_message)


def track_prime(status: str, duration: float) -> None:
    """Track one prime through the counting pipeline."""
    if primes_counted_total:
        primes_counted_total.labels(status=status).inc()

    if prime_count_duration and status == "counted":
        prime_count_duration.observe(duration)


def track_samples(component: str, count: int) -> None:
    """Track Haar samples drawn for a component tag."""
    if haar_samples_total:
        haar_samples_total.labels(component=component).inc(count)


class PerformanceMonitor:
    """Counting throughput statistics for one run."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self.metrics: Dict[str, Any] = {
            "start_time": datetime.utcnow().isoformat(),
            "primes_counted": 0,
            "primes_skipped": 0,
            "cache_hits": 0,
            "total_count_time": 0.0,
            "avg_count_time": 0.0,
        }

    def record_count(self, duration: float) -> None:
        """Record one point count and its duration."""
        with self._lock:
            self.metrics["primes_counted"] += 1
            self.metrics["total_count_time"] += duration
            self.metrics["avg_count_time"] = (
                self.metrics["total_count_time"] / self.metrics["primes_counted"]
            )
        track_prime("counted", duration)

    def record_skip(self) -> None:
        with self._lock:
            self.metrics["primes_skipped"] += 1
        track_prime("skipped", 0.0)

    def record_cache_hit(self) -> None:
        with self._lock:
            self.metrics["cache_hits"] += 1
        track_prime("cached", 0.0)

    @contextmanager
    def timed(self) -> Iterator[None]:
        """Time a counting call and record it on success."""
        start_time = time.perf_counter()
        yield
        self.record_count(time.perf_counter() - start_time)

    def get_stats(self) -> Dict[str, Any]:
        """Get current statistics."""
        uptime = (
            datetime.utcnow() - datetime.fromisoformat(self.metrics["start_time"])
        ).total_seconds()
        seen = self.metrics["primes_counted"] + self.metrics["primes_skipped"]

        return {
            **self.metrics,
            "uptime_seconds": uptime,
            "skip_rate": self.metrics["primes_skipped"] / seen if seen > 0 else 0.0,
        }


def log_run_summary(monitor: Optional[PerformanceMonitor], **fields: Any) -> None:
    """Emit the monitor's statistics as one structured record."""
    stats = monitor.get_stats() if monitor else {}
    structured_log("INFO", "run summary", **stats, **fields)
