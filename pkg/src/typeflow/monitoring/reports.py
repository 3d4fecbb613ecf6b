"""Report rendering: JSON documents, rich tables and SVG plots."""
import json
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from loguru import logger  # noqa: E402
from rich.table import Table  # noqa: E402

from .benchmark import BenchReport  # noqa: E402
from .metrics import CATEGORIES, MetricsReport  # noqa: E402

PathLike = Union[str, Path]

# stable SVG ids and no timestamps so identical inputs give identical files
matplotlib.rcParams["svg.hashsalt"] = "typeflow"
_SVG_METADATA = {"Date": None, "Creator": None}


def _percent(value: Optional[float]) -> str:
    return "-" if value is None else f"{100 * value:.2f}"


def metrics_table(reports: Sequence[MetricsReport], title: str = "Type prediction accuracy (%)") -> Table:
    """One row per model: top-1/top-5 for all types, the 10 most frequent and the rest."""
    table = Table(title=title, show_header=True)
    table.add_column("Model", style="cyan")
    table.add_column("Params", justify="right")
    for category in ("All", "Top-10", "Rest"):
        table.add_column(f"{category} top-1", justify="right", style="green")
        table.add_column(f"{category} top-5", justify="right")
    for report in reports:
        cells = [str(report.model.get("name", "")), str(report.model.get("parameters", ""))]
        for name in CATEGORIES:
            score = report.category(name)
            cells.extend([_percent(score.top1), _percent(score.top5)])
        table.add_row(*cells)
    return table


def signal_table(report: MetricsReport) -> Table:
    table = Table(title=f"Accuracy by signal class ({report.model.get('name', '')})", show_header=True)
    table.add_column("Signal", style="cyan")
    table.add_column("Labels", justify="right")
    table.add_column("Top-1", justify="right", style="green")
    table.add_column("Top-5", justify="right")
    for signal, score in sorted(report.by_signal.items()):
        table.add_row(signal, str(score.count), _percent(score.top1), _percent(score.top5))
    return table


def bench_table(reports: Sequence[BenchReport]) -> Table:
    table = Table(title="Inference throughput (files/s)", show_header=True)
    table.add_column("Model", style="cyan")
    table.add_column("Params", justify="right")
    table.add_column("Files", justify="right")
    table.add_column("Mean", justify="right", style="green")
    table.add_column("Std", justify="right")
    table.add_column("With extraction", justify="right", style="yellow")
    for r in reports:
        table.add_row(r.model, str(r.parameters), str(r.files), f"{r.exclusive.mean:.1f}",
                      f"{r.exclusive.std:.1f}", f"{r.inclusive.mean:.1f}")
    return table


def graph_stats_table(stats: Mapping[str, Mapping[str, Sequence[float]]]) -> Table:
    """Quartiles of node and edge counts per split."""
    table = Table(title="Graph sizes", show_header=True)
    table.add_column("Split", style="cyan")
    table.add_column("Files", justify="right")
    for measure in ("nodes", "edges"):
        for q in ("min", "q1", "median", "q3", "max"):
            table.add_column(f"{measure} {q}", justify="right")
    for split, measures in stats.items():
        row = [split, str(int(measures.get("files", [0])[0]))]
        for measure in ("nodes", "edges"):
            row.extend(f"{v:g}" for v in measures[measure])
        table.add_row(*row)
    return table


def size_quartiles(values: Sequence[int]) -> List[float]:
    """min, q1, median, q3, max of a sample (zeros when empty)."""
    if not values:
        return [0.0] * 5
    return [float(v) for v in np.percentile(np.asarray(values, dtype=np.float64), [0, 25, 50, 75, 100])]


def write_json(document: Union[Dict, List], path: Optional[PathLike] = None) -> str:
    """Serialise a report; also writes it to path when given."""
    text = json.dumps(document, indent=2, sort_keys=True)
    if path is not None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text + "\n", encoding="utf-8")
        logger.info(f"Wrote report to {path}")
    return text


def plot_k_sweep(results: Mapping[int, float], path: PathLike, title: str = "Top-1 accuracy vs. propagation steps"):
    """Line plot of top-1 accuracy against K."""
    ks = sorted(results)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(ks, [100 * results[k] for k in ks], marker="o", color="tab:blue")
    ax.set_xlabel("K (propagation steps)")
    ax.set_ylabel("Top-1 accuracy (%)")
    ax.set_xticks(ks)
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    _save(fig, path)


def plot_accuracy(reports: Sequence[MetricsReport], path: PathLike):
    """Grouped bars of top-1/top-5 accuracy over all labels per model."""
    names = [str(r.model.get("name", i)) for i, r in enumerate(reports)]
    x = np.arange(len(reports))
    fig, ax = plt.subplots(figsize=(max(4, 1.5 * len(reports)), 4))
    for offset, attr, label in ((-0.2, "top1", "top-1"), (0.2, "top5", "top-5")):
        values = [100 * (getattr(r.all, attr) or 0.0) for r in reports]
        ax.bar(x + offset, values, width=0.4, label=label)
    ax.set_xticks(x)
    ax.set_xticklabels(names, rotation=30, ha="right")
    ax.set_ylabel("Accuracy (%)")
    ax.legend(loc="best")
    _save(fig, path)


def plot_throughput(reports: Sequence[BenchReport], path: PathLike):
    """Bar chart of mean files/s with standard-deviation error bars."""
    fig, ax = plt.subplots(figsize=(max(4, 1.5 * len(reports)), 4))
    x = np.arange(len(reports))
    ax.bar(x, [r.exclusive.mean for r in reports], yerr=[r.exclusive.std for r in reports], capsize=4)
    ax.set_xticks(x)
    ax.set_xticklabels([r.model for r in reports], rotation=30, ha="right")
    ax.set_ylabel("Files per second")
    _save(fig, path)


def _save(fig, path: PathLike):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata=_SVG_METADATA)
    plt.close(fig)
    logger.info(f"Wrote plot to {path}")
