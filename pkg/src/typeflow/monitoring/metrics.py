"""Top-k accuracy, overall and split into frequent and rare types."""
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, Hashable, Iterable, List, Mapping, Optional, Sequence, Tuple

import torch
from loguru import logger

from ..core.gnn import TypeFlowGNN, count_parameters
from ..core.predict import rank_indices
from ..infrastructure.error_handling import ErrorHandler, MissingPrediction
from ..models import Example
from ..pipeline.tensorize import chunk, collate, tensorize
from ..vocab.vocabulary import VocabularyBundle

NodeKey = Tuple[str, int]

CATEGORIES = ("all", "top10_frequent", "rest")


@dataclass
class CategoryScore:
    """Accuracy over one category; None when the category is empty."""
    count: int = 0
    top1: Optional[float] = None
    top5: Optional[float] = None

    def to_dict(self) -> dict:
        return {"count": self.count, "top1": self.top1, "top5": self.top5}


@dataclass
class MetricsReport:
    all: CategoryScore
    top10_frequent: CategoryScore
    rest: CategoryScore
    files_evaluated: int = 0
    by_signal: Dict[str, CategoryScore] = field(default_factory=dict)
    model: Dict[str, object] = field(default_factory=dict)

    def category(self, name: str) -> CategoryScore:
        return getattr(self, name)

    def to_dict(self) -> dict:
        out = {name: self.category(name).to_dict() for name in CATEGORIES}
        out["files_evaluated"] = self.files_evaluated
        if self.by_signal:
            out["by_signal"] = {k: v.to_dict() for k, v in sorted(self.by_signal.items())}
        if self.model:
            out["model"] = dict(self.model)
        return out


def _score(hits: List[Tuple[bool, bool]]) -> CategoryScore:
    if not hits:
        return CategoryScore()
    return CategoryScore(
        count=len(hits),
        top1=sum(h1 for h1, _ in hits) / len(hits),
        top5=sum(h5 for _, h5 in hits) / len(hits),
    )


def topk_accuracy(
    predictions: Mapping[Hashable, Sequence[str]],
    labels: Mapping[Hashable, str],
    frequent_types: Iterable[str],
    signal_classes: Optional[Mapping[Hashable, str]] = None,
    files_evaluated: int = 0,
) -> MetricsReport:
    """
    Score ranked predictions against labels.

    predictions maps a labeled-node key to its ranked type list (most probable
    first); frequent_types are the 10 most frequent training types. A label
    counts toward top1 when it is first and toward top5 when it is among the first 5.
    """
    frequent = set(frequent_types)
    buckets: Dict[str, List[Tuple[bool, bool]]] = defaultdict(list)
    by_signal: Dict[str, List[Tuple[bool, bool]]] = defaultdict(list)
    for key, label in labels.items():
        ranked = predictions.get(key)
        if ranked is None:
            raise MissingPrediction(f"no ranked prediction for labeled node {key}")
        hit = (bool(ranked) and ranked[0] == label, label in list(ranked)[:5])
        buckets["all"].append(hit)
        buckets["top10_frequent" if label in frequent else "rest"].append(hit)
        if signal_classes and key in signal_classes:
            by_signal[signal_classes[key]].append(hit)

    return MetricsReport(
        all=_score(buckets["all"]),
        top10_frequent=_score(buckets["top10_frequent"]),
        rest=_score(buckets["rest"]),
        files_evaluated=files_evaluated,
        by_signal={name: _score(hits) for name, hits in by_signal.items()},
    )


@dataclass
class CollectedPredictions:
    predictions: Dict[NodeKey, List[str]]
    labels: Dict[NodeKey, str]
    signal_classes: Dict[NodeKey, str]
    files_evaluated: int


@torch.no_grad()
def collect_predictions(
    model: TypeFlowGNN,
    examples: Sequence[Example],
    bundle: VocabularyBundle,
    batch_size: int = 64,
    k: int = 5,
) -> CollectedPredictions:
    """Run the model over examples and rank types for every labeled node."""
    model.eval()
    handler = ErrorHandler("evaluate")
    graphs, kept = [], []
    for example in examples:
        data = handler.run(example.file_id, tensorize, example, bundle, model.config.contextual_layer)
        if data is not None:
            graphs.append(data)
            kept.append(example)
    handler.log_summary()

    types = bundle.types.entries
    predictions: Dict[NodeKey, List[str]] = {}
    labels: Dict[NodeKey, str] = {}
    signals: Dict[NodeKey, str] = {}
    for group_graphs, group_examples in zip(chunk(graphs, batch_size), chunk(kept, batch_size)):
        batch = collate(group_graphs)
        logits = model(batch)
        offsets = batch.ptr.tolist()
        for i, example in enumerate(group_examples):
            node_ids = sorted(example.labels)
            if not node_ids:
                continue
            rows = torch.tensor([offsets[i] + n for n in node_ids], dtype=torch.long)
            _, ranked = rank_indices(logits.index_select(0, rows), min(k, len(types)))
            for node_id, row in zip(node_ids, ranked.tolist()):
                key = (example.file_id, node_id)
                predictions[key] = [types[j] for j in row]
                labels[key] = types[example.labels[node_id]]
                if node_id in example.signal_classes:
                    signals[key] = example.signal_classes[node_id]
    return CollectedPredictions(predictions, labels, signals, len(graphs))


def evaluate_model(
    model: TypeFlowGNN,
    examples: Sequence[Example],
    bundle: VocabularyBundle,
    batch_size: int = 64,
    name: str = "",
) -> MetricsReport:
    """Collect predictions and score them with the training split's frequent types."""
    collected = collect_predictions(model, examples, bundle, batch_size)
    report = topk_accuracy(
        collected.predictions,
        collected.labels,
        bundle.top_frequent_types(10),
        collected.signal_classes,
        collected.files_evaluated,
    )
    report.model = {
        "name": name or model.config.preset,
        "preset": model.config.preset,
        "K": model.config.K,
        "parameters": count_parameters(model),
    }
    logger.info(
        f"{report.model['name']}: {report.all.count} labeled nodes in {report.files_evaluated} files, "
        f"top1={report.all.top1}, top5={report.all.top5}"
    )
    return report
