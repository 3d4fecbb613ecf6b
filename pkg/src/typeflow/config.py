"""Configuration management for typeflow."""
import os
from typing import Tuple

from dotenv import load_dotenv
from pydantic import BaseModel, Field

load_dotenv()


class VocabConfig(BaseModel):
    """Vocabulary sizes."""
    max_names: int = Field(default_factory=lambda: int(os.getenv("TYPEFLOW_MAX_NAMES", "10000")))
    bpe_merges: int = Field(default_factory=lambda: int(os.getenv("TYPEFLOW_BPE_MERGES", "10000")))
    max_types: int = Field(default_factory=lambda: int(os.getenv("TYPEFLOW_MAX_TYPES", "100")))


class TrainingConfig(BaseModel):
    """Training loop hyperparameters."""
    batch_size: int = Field(default_factory=lambda: int(os.getenv("TYPEFLOW_BATCH_SIZE", "64")))
    epochs: int = Field(default_factory=lambda: int(os.getenv("TYPEFLOW_EPOCHS", "60")))
    learning_rate: float = Field(
        default_factory=lambda: float(os.getenv("TYPEFLOW_LEARNING_RATE", "1e-3"))
    )
    weight_decay: float = Field(
        default_factory=lambda: float(os.getenv("TYPEFLOW_WEIGHT_DECAY", "0.01"))
    )
    seed: int = Field(default_factory=lambda: int(os.getenv("TYPEFLOW_SEED", "0")))
    # files with more tokens are dropped from the dataset
    max_file_tokens: int = Field(default=5000)
    split_fractions: Tuple[float, float, float] = Field(default=(0.8, 0.1, 0.1))
    # 0 runs forward/backward on the calling thread
    workers: int = Field(default_factory=lambda: int(os.getenv("TYPEFLOW_WORKERS", "0")))


class BenchConfig(BaseModel):
    """Throughput benchmark protocol."""
    batch_size: int = Field(default=64)
    repeats: int = Field(default_factory=lambda: int(os.getenv("TYPEFLOW_BENCH_REPEATS", "6")))
    warmup: int = Field(default=1)


class Config(BaseModel):
    """Main configuration."""
    vocab: VocabConfig = Field(default_factory=VocabConfig)
    training: TrainingConfig = Field(default_factory=TrainingConfig)
    bench: BenchConfig = Field(default_factory=BenchConfig)

    log_level: str = Field(default_factory=lambda: os.getenv("LOG_LEVEL", "INFO"))
    log_dir: str = Field(default_factory=lambda: os.getenv("TYPEFLOW_LOG_DIR", "logs"))


config = Config()
