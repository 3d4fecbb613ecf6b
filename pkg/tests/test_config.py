"""Tests for environment-driven configuration."""
import pytest

from typeflow.config import BenchConfig, Config, TrainingConfig, VocabConfig


@pytest.mark.unit
class TestConfig:
    """Test configuration defaults and environment overrides."""

    def test_defaults(self, monkeypatch):
        """Test the documented defaults."""
        for name in ("TYPEFLOW_EPOCHS", "TYPEFLOW_BATCH_SIZE", "TYPEFLOW_LEARNING_RATE", "TYPEFLOW_WORKERS",
                     "TYPEFLOW_MAX_TYPES", "TYPEFLOW_BENCH_REPEATS"):
            monkeypatch.delenv(name, raising=False)
        training = TrainingConfig()

        assert (training.batch_size, training.epochs, training.learning_rate) == (64, 60, 1e-3)
        assert training.split_fractions == (0.8, 0.1, 0.1)
        assert training.max_file_tokens == 5000
        assert training.workers == 0
        assert VocabConfig().max_types == 100
        assert BenchConfig().repeats == 6

    def test_environment_overrides(self, monkeypatch):
        """Test that environment variables are read at construction."""
        monkeypatch.setenv("TYPEFLOW_EPOCHS", "3")
        monkeypatch.setenv("TYPEFLOW_LEARNING_RATE", "0.05")
        monkeypatch.setenv("TYPEFLOW_BPE_MERGES", "12")
        monkeypatch.setenv("TYPEFLOW_LOG_DIR", "")

        config = Config()

        assert config.training.epochs == 3
        assert config.training.learning_rate == 0.05
        assert config.vocab.bpe_merges == 12
        assert config.log_dir == ""

    def test_copy_with_updates(self):
        """Test per-command overrides on a copy."""
        base = TrainingConfig(seed=1)
        updated = base.model_copy(update={"seed": 9, "epochs": 2})

        assert (updated.seed, updated.epochs) == (9, 2)
        assert base.seed == 1
