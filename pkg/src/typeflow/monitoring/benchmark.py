"""Inference throughput benchmark (files per second)."""
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
import torch
from loguru import logger

from ..core.gnn import count_parameters
from ..infrastructure.error_handling import ErrorHandler
from ..infrastructure.performance import PerformanceMonitor
from ..pipeline.checkpoint import Checkpoint
from ..pipeline.dataset import SourceFile, drop_unknown_edges, prepare_file
from ..pipeline.tensorize import chunk, collate, tensorize


def files_per_second(files: int, seconds: float) -> float:
    if seconds <= 0:
        raise ValueError("elapsed time must be positive")
    return files / seconds


@dataclass
class RateSummary:
    samples: List[float] = field(default_factory=list)

    @property
    def mean(self) -> float:
        return float(np.mean(self.samples)) if self.samples else 0.0

    @property
    def std(self) -> float:
        return float(np.std(self.samples, ddof=1)) if len(self.samples) > 1 else 0.0

    def to_dict(self) -> dict:
        return {"mean": self.mean, "std": self.std, "samples": list(self.samples)}


@dataclass
class BenchReport:
    """Throughput of one model; exclusive covers batched inference only, inclusive adds extraction."""
    model: str
    preset: str
    parameters: int
    files: int
    repeats: int
    batch_size: int
    exclusive: RateSummary
    inclusive: RateSummary
    extract_seconds: float
    rss_mb: float

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "preset": self.preset,
            "parameters": self.parameters,
            "files": self.files,
            "repeats": self.repeats,
            "batch_size": self.batch_size,
            "files_per_second": self.exclusive.to_dict(),
            "files_per_second_with_extraction": self.inclusive.to_dict(),
            "extract_seconds_mean": self.extract_seconds,
            "rss_mb": self.rss_mb,
        }


def _extract(checkpoint: Checkpoint, sources: Sequence[SourceFile], handler: ErrorHandler):
    contextual = checkpoint.config.contextual_layer
    graphs = []
    for source in sources:
        example = handler.run(source.file_id, prepare_file, source.file_id, source.source, None)
        if example is None:
            continue
        drop_unknown_edges(example, checkpoint.bundle)
        data = handler.run(source.file_id, tensorize, example, checkpoint.bundle, contextual)
        if data is not None:
            graphs.append(data)
    return graphs


@torch.no_grad()
def _infer(model, graphs, batch_size: int):
    for group in chunk(graphs, batch_size):
        model(collate(group))


def throughput_bench(
    checkpoint: Checkpoint,
    sources: Sequence[SourceFile],
    batch_size: int = 64,
    repeats: int = 6,
    warmup: int = 1,
    name: Optional[str] = None,
) -> BenchReport:
    """
    Time extraction and batched inference over sources, repeats times after warmup passes that are discarded.

    Runs single-threaded; files that fail extraction are excluded from the file count.
    """
    previous_threads = torch.get_num_threads()
    torch.set_num_threads(1)
    try:
        model = checkpoint.build_model()
        monitor = PerformanceMonitor()
        handler = ErrorHandler("bench")
        graphs = _extract(checkpoint, sources, handler)
        handler.log_summary()
        if not graphs:
            raise ValueError("no benchmarkable files")

        for _ in range(warmup):
            with monitor.measure("inference", len(graphs)):
                _infer(model, graphs, batch_size)
        if warmup:
            logger.debug(f"warmup: {monitor.get_metrics('inference')['mean_seconds'] * 1000:.1f}ms per pass")
            monitor.reset("inference")

        inclusive = RateSummary()
        quiet = ErrorHandler("bench")
        for _ in range(repeats):
            with monitor.measure("extract", len(sources)) as extract_timer:
                _extract(checkpoint, sources, quiet)
            with monitor.measure("inference", len(graphs)) as infer_timer:
                _infer(model, graphs, batch_size)
            inclusive.samples.append(files_per_second(len(graphs), extract_timer.duration + infer_timer.duration))
        exclusive = RateSummary(monitor.metrics["inference"].rates())
        monitor.log_summary()

        extract_stats: Dict = monitor.get_metrics("extract")
        report = BenchReport(
            model=name or checkpoint.config.preset,
            preset=checkpoint.config.preset,
            parameters=count_parameters(model),
            files=len(graphs),
            repeats=repeats,
            batch_size=batch_size,
            exclusive=exclusive,
            inclusive=inclusive,
            extract_seconds=extract_stats.get("mean_seconds", 0.0),
            rss_mb=monitor.get_system_metrics()["rss_mb"],
        )
    finally:
        torch.set_num_threads(previous_threads)
    logger.info(
        f"{report.model}: {report.exclusive.mean:.1f} +- {report.exclusive.std:.1f} files/s "
        f"({report.inclusive.mean:.1f} with extraction) over {repeats} repeats"
    )
    return report
