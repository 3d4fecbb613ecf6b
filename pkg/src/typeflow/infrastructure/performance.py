"""Timing of named pipeline operations and process resource readings."""
import time
from collections import defaultdict
from dataclasses import dataclass, field
from threading import Lock
from typing import Any, Dict, List, Optional

import numpy as np
import psutil
from loguru import logger


@dataclass
class OperationStats:
    """Durations recorded for one named operation."""
    durations: List[float] = field(default_factory=list)
    items: List[int] = field(default_factory=list)
    failures: int = 0

    def update(self, duration: float, items: int = 1, success: bool = True):
        self.durations.append(duration)
        self.items.append(items)
        if not success:
            self.failures += 1

    @property
    def count(self) -> int:
        return len(self.durations)

    @property
    def total(self) -> float:
        return float(sum(self.durations))

    @property
    def mean(self) -> float:
        return float(np.mean(self.durations)) if self.durations else 0.0

    @property
    def std(self) -> float:
        """Sample standard deviation; 0 with fewer than two samples."""
        return float(np.std(self.durations, ddof=1)) if len(self.durations) > 1 else 0.0

    @property
    def min(self) -> float:
        return min(self.durations) if self.durations else 0.0

    @property
    def max(self) -> float:
        return max(self.durations) if self.durations else 0.0

    def rates(self) -> List[float]:
        """Items per second for every recorded run."""
        return [n / d if d > 0 else float("inf") for n, d in zip(self.items, self.durations)]


class PerformanceMonitor:
    """Collects per-operation timings (extract, tensorize, inference, ...)."""

    def __init__(self):
        self.metrics: Dict[str, OperationStats] = defaultdict(OperationStats)
        self.lock = Lock()
        self.start_time = time.time()
        self.process = psutil.Process()

    def measure(self, operation_name: str, items: int = 1) -> "OperationTimer":
        """Context manager timing one run of an operation over items units of work."""
        return OperationTimer(self, operation_name, items)

    def record_operation(self, operation_name: str, duration: float, items: int = 1, success: bool = True):
        with self.lock:
            self.metrics[operation_name].update(duration, items, success)

    def reset(self, operation_name: Optional[str] = None):
        with self.lock:
            if operation_name is None:
                self.metrics.clear()
            else:
                self.metrics.pop(operation_name, None)

    def get_metrics(self, operation_name: str) -> Dict[str, Any]:
        with self.lock:
            if operation_name not in self.metrics:
                return {}
            stats = self.metrics[operation_name]
            return {
                "operation": operation_name,
                "runs": stats.count,
                "total_seconds": stats.total,
                "mean_seconds": stats.mean,
                "std_seconds": stats.std,
                "min_seconds": stats.min,
                "max_seconds": stats.max,
                "failures": stats.failures,
            }

    def get_system_metrics(self) -> Dict[str, Any]:
        memory = self.process.memory_info()
        return {
            "rss_mb": memory.rss / 1024 / 1024,
            "num_threads": self.process.num_threads(),
            "uptime_seconds": time.time() - self.start_time,
        }

    def log_summary(self):
        system = self.get_system_metrics()
        logger.info(f"RSS {system['rss_mb']:.1f} MB, {system['num_threads']} thread(s)")
        for name in sorted(self.metrics):
            m = self.get_metrics(name)
            logger.info(
                f"  {name}: {m['runs']} run(s), mean {m['mean_seconds'] * 1000:.2f}ms, "
                f"min {m['min_seconds'] * 1000:.2f}ms, max {m['max_seconds'] * 1000:.2f}ms"
            )


class OperationTimer:
    """Context manager for timing operations."""

    def __init__(self, monitor: PerformanceMonitor, operation_name: str, items: int = 1):
        self.monitor = monitor
        self.operation_name = operation_name
        self.items = items
        self.start_time = None
        self.duration = 0.0

    def __enter__(self):
        self.start_time = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.duration = time.perf_counter() - self.start_time
        self.monitor.record_operation(self.operation_name, self.duration, self.items, exc_type is None)
        return False
