"""Training loop with validation-based model selection."""
import copy
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import torch
from loguru import logger
from rich.console import Console
from rich.progress import BarColumn, Progress, SpinnerColumn, TextColumn, TimeRemainingColumn

from ..config import TrainingConfig
from ..core.embedding import VocabSizes
from ..core.gnn import TypeFlowGNN
from ..core.model_config import ModelConfig
from ..core.predict import rank_indices
from ..infrastructure.error_handling import DivergenceError, EmptyCorpus, ErrorHandler
from ..models import Example
from ..numeric.initializers import seed_everything
from ..numeric.loss import cross_entropy
from ..numeric.optim import adamw_step, make_optimizer
from ..vocab.vocabulary import VocabularyBundle
from .checkpoint import Checkpoint
from .dataset import DatasetSplits
from .tensorize import TfgData, chunk, collate, tensorize

console = Console(stderr=True)


@dataclass
class EpochRecord:
    """One line of the training log."""
    epoch: int
    split: str
    loss: Optional[float]
    top1: Optional[float]
    top5: Optional[float]
    wall_seconds: float


@dataclass
class BatchScore:
    loss_sum: float = 0.0
    labeled: int = 0
    top1_hits: int = 0
    top5_hits: int = 0

    def add(self, logits: torch.Tensor, labels: torch.Tensor, loss_sum: float):
        self.loss_sum += loss_sum
        self.labeled += labels.numel()
        if labels.numel():
            _, ranked = rank_indices(logits.detach(), min(5, logits.size(-1)))
            hits = ranked == labels.unsqueeze(-1)
            self.top1_hits += int(hits[:, 0].sum())
            self.top5_hits += int(hits.any(dim=-1).sum())

    def summary(self) -> Tuple[Optional[float], Optional[float], Optional[float]]:
        if self.labeled == 0:
            return None, None, None
        return self.loss_sum / self.labeled, self.top1_hits / self.labeled, self.top5_hits / self.labeled


def tensorize_split(
    examples: Sequence[Example],
    bundle: VocabularyBundle,
    contextual: bool,
    split: str,
    labeled_only: bool = False,
) -> List[TfgData]:
    """Tensorise a split; files with out-of-vocabulary node features are skipped with a warning."""
    handler = ErrorHandler(f"tensorize:{split}")
    graphs = []
    for example in examples:
        if labeled_only and not example.labels:
            continue
        data = handler.run(example.file_id, tensorize, example, bundle, contextual)
        if data is not None:
            graphs.append(data)
    handler.log_summary()
    return graphs


def labeled_logits(model: TypeFlowGNN, batch) -> Tuple[torch.Tensor, torch.Tensor]:
    """Logits and labels of the labeled nodes of a batch."""
    mask = batch.y >= 0
    return model(batch)[mask], batch.y[mask]


class Trainer:
    """
    AdamW over packed graph batches with mean cross-entropy on labeled nodes.

    With workers > 0 each graph of a batch runs forward/backward on a thread
    pool; per-graph gradients are summed in file order before the update.
    """

    def __init__(
        self,
        model: TypeFlowGNN,
        training: TrainingConfig,
        log_path: Optional[Union[str, Path]] = None,
        show_progress: bool = True,
    ):
        self.model = model
        self.training = training
        self.params = [p for p in model.parameters() if p.requires_grad]
        self.optimizer = make_optimizer(self.params, lr=training.learning_rate, weight_decay=training.weight_decay)
        self.log_path = Path(log_path) if log_path else None
        self.show_progress = show_progress
        self.history: List[EpochRecord] = []
        self._started = time.perf_counter()
        if self.log_path is not None:
            self.log_path.parent.mkdir(parents=True, exist_ok=True)
            self.log_path.write_text("", encoding="utf-8")

    def _check_finite(self, loss: torch.Tensor):
        if not torch.isfinite(loss):
            raise DivergenceError(f"non-finite training loss {float(loss)}")

    def train_step(self, batch) -> Tuple[float, BatchScore]:
        """One optimizer step on a packed batch; returns the batch mean loss."""
        self.model.train()
        self.optimizer.zero_grad(set_to_none=True)
        logits, labels = labeled_logits(self.model, batch)
        loss = cross_entropy(logits, labels)
        self._check_finite(loss)
        loss.backward()
        self.optimizer.step()
        score = BatchScore()
        score.add(logits, labels, float(loss) * labels.numel())
        return float(loss), score

    def _graph_gradients(self, graph: TfgData):
        batch = collate([graph])
        logits, labels = labeled_logits(self.model, batch)
        loss_sum = cross_entropy(logits, labels) * labels.numel()
        grads = torch.autograd.grad(loss_sum, self.params, allow_unused=True)
        return grads, logits.detach(), labels, float(loss_sum)

    def train_step_workers(self, graphs: Sequence[TfgData], pool: ThreadPoolExecutor) -> Tuple[float, BatchScore]:
        self.model.train()
        results = list(pool.map(self._graph_gradients, graphs))
        labeled = sum(labels.numel() for _, _, labels, _ in results)
        score = BatchScore()
        summed: List[Optional[torch.Tensor]] = [None] * len(self.params)
        for grads, logits, labels, loss_sum in results:
            score.add(logits, labels, loss_sum)
            for i, grad in enumerate(grads):
                if grad is not None:
                    summed[i] = grad.clone() if summed[i] is None else summed[i] + grad
        loss = score.loss_sum / labeled
        self._check_finite(torch.tensor(loss))
        adamw_step(self.params, [g / labeled if g is not None else None for g in summed], self.optimizer)
        return loss, score

    def train_steps(self, graphs: Sequence[TfgData], steps: int) -> List[float]:
        """Repeated steps on one fixed batch; returns the loss before each step."""
        batch = collate(graphs)
        return [self.train_step(batch)[0] for _ in range(steps)]

    @torch.no_grad()
    def evaluate(self, graphs: Sequence[TfgData]) -> BatchScore:
        """Summed loss and top-1/top-5 hits over labeled nodes."""
        self.model.eval()
        score = BatchScore()
        for group in chunk(graphs, self.training.batch_size):
            logits, labels = labeled_logits(self.model, collate(group))
            if labels.numel():
                score.add(logits, labels, float(cross_entropy(logits, labels)) * labels.numel())
        return score

    def _log(self, epoch: int, split: str, score: BatchScore):
        loss, top1, top5 = score.summary()
        record = EpochRecord(epoch, split, loss, top1, top5, round(time.perf_counter() - self._started, 3))
        self.history.append(record)
        if self.log_path is not None:
            with self.log_path.open("a", encoding="utf-8") as f:
                f.write(json.dumps(asdict(record)) + "\n")
        return record

    def run_epoch(self, graphs: Sequence[TfgData], epoch: int, pool: Optional[ThreadPoolExecutor] = None) -> BatchScore:
        order = np.random.default_rng([self.training.seed, epoch]).permutation(len(graphs))
        shuffled = [graphs[i] for i in order]
        score = BatchScore()
        for group in chunk(shuffled, self.training.batch_size):
            if pool is not None:
                _, batch_score = self.train_step_workers(group, pool)
            else:
                _, batch_score = self.train_step(collate(group))
            score.loss_sum += batch_score.loss_sum
            score.labeled += batch_score.labeled
            score.top1_hits += batch_score.top1_hits
            score.top5_hits += batch_score.top5_hits
        return score

    def fit(self, train: Sequence[TfgData], valid: Sequence[TfgData], epochs: int) -> Dict:
        """
        Train for the given number of epochs and restore the parameters of the
        epoch with the lowest validation loss (training loss without a validation split).
        """
        if not train:
            raise EmptyCorpus("no labeled training graphs")
        if not valid:
            logger.warning("Empty validation split; selecting the epoch by training loss")

        best = {"epoch": 0, "valid_loss": None, "state": None}
        if epochs == 0:
            valid_score = self.evaluate(valid if valid else train)
            self._log(0, "valid", valid_score)
            best["valid_loss"] = valid_score.summary()[0]
            best["state"] = copy.deepcopy(self.model.state_dict())

        pool = ThreadPoolExecutor(max_workers=self.training.workers) if self.training.workers > 0 else None
        try:
            with Progress(
                SpinnerColumn(),
                TextColumn("[progress.description]{task.description}"),
                BarColumn(),
                TextColumn("[progress.percentage]{task.percentage:>3.0f}%"),
                TimeRemainingColumn(),
                console=console,
                disable=not self.show_progress,
            ) as progress:
                task = progress.add_task("[cyan]Training...", total=epochs)
                for epoch in range(1, epochs + 1):
                    train_record = self._log(epoch, "train", self.run_epoch(train, epoch, pool))
                    selection = self._log(epoch, "valid", self.evaluate(valid)) if valid else train_record
                    loss = selection.loss if selection.loss is not None else math.inf
                    best_loss = best["valid_loss"] if best["valid_loss"] is not None else math.inf
                    if best["state"] is None or loss < best_loss:
                        best = {"epoch": epoch, "valid_loss": selection.loss,
                                "state": copy.deepcopy(self.model.state_dict())}
                    logger.debug(
                        f"epoch {epoch}: train loss {train_record.loss:.4f} top1 {train_record.top1:.3f}"
                        + (f", valid loss {selection.loss:.4f}" if valid and selection.loss is not None else "")
                    )
                    progress.update(task, advance=1)
        finally:
            if pool is not None:
                pool.shutdown()

        self.model.load_state_dict(best["state"])
        logger.success(f"Training done; best epoch {best['epoch']} (validation loss {best['valid_loss']})")
        return {"epoch": best["epoch"], "valid_loss": best["valid_loss"]}


def train(
    config: ModelConfig,
    dataset: DatasetSplits,
    bundle: VocabularyBundle,
    training: Optional[TrainingConfig] = None,
    log_path: Optional[Union[str, Path]] = None,
    show_progress: bool = True,
) -> Checkpoint:
    """Train a model of the given configuration and return the best-validation checkpoint."""
    training = training or TrainingConfig()
    seed_everything(training.seed)
    config = config.with_overrides(type_count=len(bundle.types))
    contextual = config.contextual_layer

    train_graphs = tensorize_split(dataset.train, bundle, contextual, "train", labeled_only=True)
    valid_graphs = tensorize_split(dataset.valid, bundle, contextual, "valid", labeled_only=True)
    logger.info(f"Training {config.preset} (K={config.K}) on {len(train_graphs)} graphs, "
                f"validating on {len(valid_graphs)}")

    model = TypeFlowGNN(config, VocabSizes.from_bundle(bundle))
    trainer = Trainer(model, training, log_path, show_progress)
    selected = trainer.fit(train_graphs, valid_graphs, training.epochs)
    metadata = {
        "epoch": selected["epoch"],
        "valid_loss": selected["valid_loss"],
        "seed": training.seed,
        "epochs": training.epochs,
        "batch_size": training.batch_size,
        "learning_rate": training.learning_rate,
        "train_files": len(train_graphs),
    }
    return Checkpoint.from_model(model, bundle, metadata)
