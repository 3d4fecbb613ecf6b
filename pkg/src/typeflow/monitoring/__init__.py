"""Evaluation metrics, throughput benchmark and reports."""

from .benchmark import BenchReport, files_per_second, throughput_bench
from .metrics import CategoryScore, MetricsReport, collect_predictions, evaluate_model, topk_accuracy
from .reports import (
    bench_table,
    graph_stats_table,
    metrics_table,
    plot_accuracy,
    plot_k_sweep,
    plot_throughput,
    size_quartiles,
    write_json,
)

__all__ = [
    "BenchReport",
    "CategoryScore",
    "MetricsReport",
    "bench_table",
    "collect_predictions",
    "evaluate_model",
    "files_per_second",
    "graph_stats_table",
    "metrics_table",
    "plot_accuracy",
    "plot_k_sweep",
    "plot_throughput",
    "size_quartiles",
    "throughput_bench",
    "topk_accuracy",
    "write_json",
]
