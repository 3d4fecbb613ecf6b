"""Error types and per-stage error bookkeeping."""
from typing import Any, Callable, Dict, Iterable, Optional, Tuple

from loguru import logger

# process exit codes per error class
EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3


class TypeflowError(Exception):
    """Base class for all typeflow errors."""
    exit_code = EXIT_DATA


class UsageError(TypeflowError):
    """Bad command-line usage: missing input paths or inconsistent flags."""
    exit_code = EXIT_USAGE


class LexError(TypeflowError):
    """Illegal character or unterminated literal."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at offset {position}")
        self.position = position


class ParseError(TypeflowError):
    """Syntax violation or construct outside the supported subset."""

    def __init__(self, message: str, span: Tuple[int, int], expected: Iterable[str] = ()):
        self.span = span
        self.expected = sorted(set(expected))
        detail = f" (expected one of: {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{message} at {span[0]}..{span[1]}{detail}")


class SchemaError(TypeflowError):
    """JSON document does not match the expected schema."""

    def __init__(self, message: str, path: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class FormatError(TypeflowError):
    """Malformed container (bad magic, version or truncated data)."""


class IntegrityError(TypeflowError):
    """Container contents disagree with the configuration they claim."""


class EmptyCorpus(TypeflowError):
    """No items to learn a vocabulary or merge list from."""


class MissingVocabEntry(TypeflowError):
    """A feature that must be in the vocabulary is absent."""

    def __init__(self, vocab_kind: str, entry: str):
        super().__init__(f"'{entry}' missing from {vocab_kind} vocabulary")
        self.vocab_kind = vocab_kind
        self.entry = entry


class LabelOutOfRange(TypeflowError):
    """Class label outside [0, C)."""
    exit_code = EXIT_INTERNAL


class SpecError(TypeflowError):
    """Corpus generation constraints cannot be satisfied."""


class MissingPrediction(TypeflowError):
    """A labeled node has no ranked prediction list."""
    exit_code = EXIT_INTERNAL


class ExtractError(TypeflowError):
    """Internal inconsistency while building a type flow graph."""
    exit_code = EXIT_INTERNAL


class ShapeError(TypeflowError):
    """Tensor shapes are incompatible for an operation."""
    exit_code = EXIT_INTERNAL

    def __init__(self, op: str, *shapes):
        self.shapes = tuple(tuple(s) for s in shapes)
        super().__init__(f"{op}: incompatible shapes {' vs '.join(str(s) for s in self.shapes)}")


class EmptySequence(TypeflowError):
    """Recurrent encoder called on an empty sequence."""
    exit_code = EXIT_INTERNAL


class MissingToken(TypeflowError):
    """An IdentNode has no matching token in the file's token sequence."""
    exit_code = EXIT_INTERNAL


class DivergenceError(TypeflowError):
    """Training loss became non-finite."""
    exit_code = EXIT_INTERNAL


class ErrorHandler:
    """Tallies errors raised by per-file work during a batch stage."""

    def __init__(self, stage: str = "default"):
        self.stage = stage
        self.error_counts: Dict[str, int] = {}
        self.failed_items: Dict[str, str] = {}

    def record_error(self, error_type: str, item: Optional[str] = None, message: str = ""):
        """Record an error occurrence."""
        self.error_counts[error_type] = self.error_counts.get(error_type, 0) + 1
        if item is not None:
            self.failed_items[item] = f"{error_type}: {message}"

    def run(self, item: str, func: Callable, *args, **kwargs) -> Any:
        """Run func for one item; log and skip on a typeflow error."""
        try:
            return func(*args, **kwargs)
        except TypeflowError as e:
            self.record_error(type(e).__name__, item, str(e))
            logger.warning(f"[{self.stage}] skipping {item}: {type(e).__name__}: {e}")
            return None

    def get_error_stats(self) -> dict:
        """Get error statistics."""
        return {
            "stage": self.stage,
            "total_errors": sum(self.error_counts.values()),
            "error_types": self.error_counts.copy(),
        }

    def log_summary(self):
        stats = self.get_error_stats()
        if stats["total_errors"] == 0:
            return
        breakdown = ", ".join(f"{k}={v}" for k, v in sorted(stats["error_types"].items()))
        logger.warning(f"[{self.stage}] {stats['total_errors']} item(s) skipped ({breakdown})")


def exit_code_for(error: BaseException) -> int:
    """Map an exception to the CLI exit code class."""
    if isinstance(error, TypeflowError):
        return error.exit_code
    return EXIT_INTERNAL
