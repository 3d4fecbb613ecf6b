"""Dataset assembly, batching, training and checkpoints."""

from .checkpoint import Checkpoint, load_checkpoint, read_checkpoint, save_checkpoint, write_checkpoint
from .dataset import (
    Corpus,
    DatasetSplits,
    SourceFile,
    assemble,
    build_vocabularies,
    graph_from_ast_json,
    load_corpus,
    make_dataset,
    prepare_file,
    prepare_files,
    split_corpus,
)
from .labels import ANY_TYPE, preprocess_type_label
from .tensorize import TfgData, collate, tensorize
from .trainer import Trainer, train

__all__ = [
    "ANY_TYPE",
    "Checkpoint",
    "Corpus",
    "DatasetSplits",
    "SourceFile",
    "TfgData",
    "Trainer",
    "assemble",
    "build_vocabularies",
    "collate",
    "graph_from_ast_json",
    "load_checkpoint",
    "load_corpus",
    "make_dataset",
    "prepare_file",
    "prepare_files",
    "preprocess_type_label",
    "read_checkpoint",
    "save_checkpoint",
    "split_corpus",
    "tensorize",
    "train",
    "write_checkpoint",
]
