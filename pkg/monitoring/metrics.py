"""
计算指标监控模块
Computation metrics for the flag-coordinate kernel, backed by prometheus_client.

Each tracked operation records a status counter, a duration histogram and,
on failure, an error counter labelled by exception type.
"""

import time
import logging
from functools import wraps
from threading import Lock
from typing import Callable, Optional

from prometheus_client import CollectorRegistry, Counter, Histogram, generate_latest

logger = logging.getLogger(__name__)


class ComputationMetrics:
    """计算指标监控器"""

    def __init__(self, namespace: str = "flagcoords"):
        self.namespace = namespace
        self.registry = CollectorRegistry()
        self._metrics_lock = Lock()
        self._setup_metrics()

    def _setup_metrics(self):
        """设置监控指标"""
        # 操作计数器
        self.operations_total = Counter(
            f"{self.namespace}_operations_total",
            "Total number of tracked operations by status",
            ["operation", "status"],
            registry=self.registry,
        )

        # 错误计数器
        self.errors_total = Counter(
            f"{self.namespace}_errors_total",
            "Total number of failed operations by exception type",
            ["operation", "error_type"],
            registry=self.registry,
        )

        # 耗时直方图
        self.operation_seconds = Histogram(
            f"{self.namespace}_operation_seconds",
            "Wall-clock duration of tracked operations",
            ["operation"],
            buckets=[0.001, 0.01, 0.05, 0.1, 0.5, 1.0, 5.0, 30.0],
            registry=self.registry,
        )

    def track_computation(self, operation: str):
        """装饰器：追踪一次计算"""
        def decorator(func: Callable):
            @wraps(func)
            def wrapper(*args, **kwargs):
                start_time = time.perf_counter()
                status = "success"
                error_type = None
                try:
                    return func(*args, **kwargs)
                except Exception as e:
                    status = "error"
                    error_type = type(e).__name__
                    logger.debug("%s failed: %s", operation, e)
                    raise
                finally:
                    self._record_metrics(operation, status, time.perf_counter() - start_time, error_type)
            return wrapper
        return decorator

    def _record_metrics(self, operation: str, status: str, duration: float,
                        error_type: Optional[str] = None):
        """记录指标数据"""
        with self._metrics_lock:
            self.operations_total.labels(operation=operation, status=status).inc()
            self.operation_seconds.labels(operation=operation).observe(duration)
            if error_type:
                self.errors_total.labels(operation=operation, error_type=error_type).inc()

    def count(self, operation: str, status: str = "success") -> float:
        """Current value of the operations counter for one label pair."""
        value = self.registry.get_sample_value(
            f"{self.namespace}_operations_total", {"operation": operation, "status": status})
        return value or 0.0

    def export_text(self) -> str:
        """Prometheus exposition format."""
        return generate_latest(self.registry).decode("utf-8")


# 全局监控管理器
computation_metrics = ComputationMetrics()


def track_computation(operation: str, metrics: Optional[ComputationMetrics] = None):
    """装饰器：使用全局或给定的监控器追踪计算"""
    return (metrics or computation_metrics).track_computation(operation)
