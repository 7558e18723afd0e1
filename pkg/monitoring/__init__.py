"""
监控模块
Prometheus metrics for long-running computations."""

from .metrics import ComputationMetrics, computation_metrics, track_computation

__all__ = ["ComputationMetrics", "computation_metrics", "track_computation"]
