"""Synthetic annotated corpus generation."""

from .generator import (
    SIGNAL_CLASSES,
    TYPE_ORDER,
    FilePlan,
    GeneratedCorpus,
    GenSpec,
    check_signals,
    default_palette,
    generate_corpus,
    generate_file,
    label_frequencies,
    write_corpus,
)

__all__ = [
    "SIGNAL_CLASSES",
    "TYPE_ORDER",
    "FilePlan",
    "GenSpec",
    "GeneratedCorpus",
    "check_signals",
    "default_palette",
    "generate_corpus",
    "generate_file",
    "label_frequencies",
    "write_corpus",
]
