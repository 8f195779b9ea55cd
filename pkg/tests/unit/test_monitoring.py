"""
Unit tests for run monitoring.
"""

import json
import logging

import pytest

import sys
from pathlib import Path
sys.path.insert(0, str(Path(__file__).parent.parent.parent / "src"))

from src.sato_tate.monitoring import PerformanceMonitor, log_run_summary, structured_log


@pytest.mark.unit
class TestPerformanceMonitor:
    """Test counting statistics."""

    def test_initial_stats(self):
        stats = PerformanceMonitor().get_stats()
        assert stats["primes_counted"] == 0
        assert stats["skip_rate"] == 0.0
        assert stats["uptime_seconds"] >= 0

    def test_records(self):
        monitor = PerformanceMonitor()
        monitor.record_count(0.5)
        monitor.record_count(1.5)
        monitor.record_skip()
        monitor.record_cache_hit()
        stats = monitor.get_stats()
        assert stats["primes_counted"] == 2
        assert stats["avg_count_time"] == pytest.approx(1.0)
        assert stats["cache_hits"] == 1
        assert stats["skip_rate"] == pytest.approx(1 / 3)

    def test_timed(self):
        monitor = PerformanceMonitor()
        with monitor.timed():
            pass
        assert monitor.get_stats()["primes_counted"] == 1

    def test_timed_failure_not_recorded(self):
        monitor = PerformanceMonitor()
        with pytest.raises(RuntimeError):
            with monitor.timed():
                raise RuntimeError("boom")
        assert monitor.get_stats()["primes_counted"] == 0


@pytest.mark.unit
class TestStructuredLog:
    """Test JSON log records."""

    def test_fields(self, caplog):
        with caplog.at_level(logging.INFO):
            structured_log("INFO", "counted", p=7, curve="y^2=x^3+x")
        entry = json.loads(caplog.records[-1].getMessage())
        assert entry["message"] == "counted"
        assert entry["p"] == 7

    def test_summary(self, caplog):
        monitor = PerformanceMonitor()
        monitor.record_skip()
        with caplog.at_level(logging.INFO):
            log_run_summary(monitor, bound=10)
        entry = json.loads(caplog.records[-1].getMessage())
        assert entry["primes_skipped"] == 1
        assert entry["bound"] == 10
