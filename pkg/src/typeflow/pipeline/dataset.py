"""Corpus loading, splitting, per-file preparation and vocabulary construction."""
import json
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from loguru import logger

from ..config import VocabConfig
from ..frontend.annotations import strip_annotations
from ..frontend.ast_json import load_ast_json
from ..frontend.lexer import tokenize
from ..frontend.parser import parse
from ..graph.builder import attach_labels, build_tfg
from ..graph.prepass import collect_function_decls
from ..infrastructure.error_handling import EmptyCorpus, ErrorHandler, SchemaError
from ..models import Example, Span, Tfg, TfgNodeKind, TokenKind, dual_feature
from ..vocab.bpe import bpe_train
from ..vocab.vocabulary import VocabKind, VocabularyBundle, build_vocab
from .labels import is_vocabulary_type, preprocess_type_label

SOURCE_SUFFIXES = (".ts", ".js")
AST_JSON_SUFFIX = ".ast.json"
MANIFEST_NAME = "manifest.json"


@dataclass
class SourceFile:
    file_id: str
    source: str


@dataclass
class Corpus:
    """Source files plus the generator manifest (file id -> label entries), if any."""
    files: List[SourceFile]
    manifest: Dict[str, List[dict]] = field(default_factory=dict)


@dataclass
class Split:
    train: List[str]
    valid: List[str]
    test: List[str]


@dataclass
class DatasetSplits:
    train: List[Example]
    valid: List[Example]
    test: List[Example]

    def sizes(self) -> Tuple[int, int, int]:
        return len(self.train), len(self.valid), len(self.test)


def load_corpus(directory: Union[str, Path]) -> Corpus:
    """Read a corpus directory: sources under files/ (or the directory itself) and an optional manifest."""
    directory = Path(directory)
    source_dir = directory / "files" if (directory / "files").is_dir() else directory
    paths = sorted(p for p in source_dir.rglob("*") if p.suffix in SOURCE_SUFFIXES and p.is_file())
    files = [SourceFile(p.relative_to(source_dir).as_posix(), p.read_text(encoding="utf-8")) for p in paths]

    manifest: Dict[str, List[dict]] = {}
    manifest_path = directory / MANIFEST_NAME
    if manifest_path.exists():
        try:
            raw = json.loads(manifest_path.read_text(encoding="utf-8"))
        except ValueError as e:
            raise SchemaError(f"invalid JSON: {e}", "$")
        if not isinstance(raw, dict) or not isinstance(raw.get("files", {}), dict):
            raise SchemaError("expected an object with a 'files' map", "$.files")
        manifest = raw.get("files", {})
    logger.info(f"Loaded {len(files)} source files from {directory}")
    return Corpus(files, manifest)


def split_corpus(file_ids: Sequence[str], fractions: Sequence[float], seed: int) -> Split:
    """Seeded random partition into train/valid/test by file."""
    ordered = sorted(file_ids)
    order = np.random.default_rng(seed).permutation(len(ordered))
    shuffled = [ordered[i] for i in order]
    total = sum(fractions)
    n_train = int(len(shuffled) * fractions[0] / total)
    n_valid = int(len(shuffled) * fractions[1] / total)
    split = Split(
        train=shuffled[:n_train],
        valid=shuffled[n_train:n_train + n_valid],
        test=shuffled[n_train + n_valid:],
    )
    logger.info(f"Split: {len(split.train)} train, {len(split.valid)} valid, {len(split.test)} test")
    return split


def _token_index_by_span(tokens) -> Dict[Span, int]:
    return {tok.span: i for i, tok in enumerate(tokens) if tok.kind is TokenKind.IDENTIFIER}


def prepare_file(
    file_id: str,
    source: str,
    max_tokens: Optional[int] = 5000,
    manifest_entries: Optional[List[dict]] = None,
) -> Optional[Example]:
    """
    Strip annotations, parse, extract the TFG and attach canonical labels.

    Returns None for files over max_tokens. Labels stay type strings on the TFG;
    index_example maps them to vocabulary indices.
    """
    stripped, raw_labels = strip_annotations(source)
    tokens = tokenize(stripped)
    if max_tokens is not None and len(tokens) > max_tokens:
        logger.debug(f"{file_id}: {len(tokens)} tokens exceeds {max_tokens}, dropped")
        return None
    ast = parse(tokens)
    graph = build_tfg(ast, collect_function_decls(ast), file_id)

    labels = {}
    for span, raw in raw_labels.items():
        canonical = preprocess_type_label(raw)
        if canonical is not None:
            labels[span] = canonical
    attach_labels(graph, ast, labels)

    token_at = _token_index_by_span(tokens)
    ident_tokens: Dict[int, int] = {}
    node_at_span: Dict[Span, int] = {}
    for node in graph.nodes:
        if node.kind is TfgNodeKind.IDENT:
            span = ast.node(node.ast_ref).span
            node_at_span[span] = node.id
            if span in token_at:
                ident_tokens[node.id] = token_at[span]

    signal_classes: Dict[int, str] = {}
    for entry in manifest_entries or []:
        node_id = node_at_span.get(tuple(entry.get("span", ())))
        if node_id is not None and "signal_class" in entry:
            signal_classes[node_id] = entry["signal_class"]

    return Example(file_id, graph, tokens, ident_tokens, {}, signal_classes)


def graph_from_ast_json(file_id: str, data: Union[bytes, str]) -> Tfg:
    """Extract the TFG of an AST JSON document; such documents carry no tokens or annotations."""
    ast = load_ast_json(data)
    return build_tfg(ast, collect_function_decls(ast), file_id)


def prepare_files(
    files: Sequence[SourceFile],
    manifest: Optional[Dict[str, List[dict]]] = None,
    max_tokens: Optional[int] = 5000,
    jobs: int = 1,
    handler: Optional[ErrorHandler] = None,
) -> List[Example]:
    """Prepare every file, skipping (and logging) files that fail to lex, parse or extract."""
    handler = handler or ErrorHandler("prepare")
    manifest = manifest or {}

    def work(item: SourceFile):
        return handler.run(item.file_id, prepare_file, item.file_id, item.source, max_tokens,
                           manifest.get(item.file_id))

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(work, files))
    else:
        results = [work(item) for item in files]
    handler.log_summary()
    return [example for example in results if example is not None]


def build_vocabularies(train: Sequence[Example], vocab_config: Optional[VocabConfig] = None) -> VocabularyBundle:
    """Build every vocabulary and the BPE merge list from training examples only."""
    vocab_config = vocab_config or VocabConfig()
    if not train:
        raise EmptyCorpus("no training files to build vocabularies from")

    names: Counter = Counter()
    node_features: Counter = Counter()
    edge_features: Counter = Counter()
    type_counts: Counter = Counter()
    for example in train:
        for node in example.tfg.nodes:
            if node.kind is TfgNodeKind.IDENT:
                names[node.feature] += 1
            else:
                node_features[node.feature] += 1
        for token in example.tokens:
            if token.kind is not TokenKind.IDENTIFIER:
                node_features[token.feature] += 1
        edge_features.update(e.feature for e in example.tfg.edges)
        type_counts.update(t for t in example.tfg.labels.values() if is_vocabulary_type(t))

    bpe = bpe_train(names, vocab_config.bpe_merges)
    segment_counts: Counter = Counter({symbol: 0 for symbol in bpe.symbols})
    for name, count in names.items():
        for segment in bpe.encode_name(name):
            segment_counts[segment] += count

    if not type_counts:
        raise EmptyCorpus("no labelled identifiers in the training split")
    bundle = VocabularyBundle(
        names=build_vocab(names, vocab_config.max_names, True, VocabKind.NAME),
        segments=build_vocab(segment_counts, None, True, VocabKind.SEGMENT),
        node_features=build_vocab(node_features, None, False, VocabKind.NODE_FEATURE),
        edge_features=build_vocab(edge_features, None, False, VocabKind.EDGE_FEATURE),
        types=build_vocab(type_counts, vocab_config.max_types, False, VocabKind.TYPE),
        bpe=bpe,
        type_counts=dict(sorted(type_counts.items())),
    )
    logger.info(
        f"Vocabularies: {len(bundle.names)} names, {len(bundle.segments)} segments, "
        f"{len(bundle.node_features)} node features, {len(bundle.edge_features)} edge features, "
        f"{len(bundle.types)} types"
    )
    return bundle


def drop_unknown_edges(example: Example, bundle: VocabularyBundle) -> int:
    """Remove edges whose feature (or its dual's) is out of vocabulary; returns the number removed."""
    vocab = bundle.edge_features
    kept = [e for e in example.tfg.edges if e.feature in vocab and dual_feature(e.feature) in vocab]
    removed = len(example.tfg.edges) - len(kept)
    example.tfg.edges = kept
    return removed


def index_example(example: Example, bundle: VocabularyBundle) -> Example:
    """Map the TFG's type labels to type-vocabulary indices; labels outside the vocabulary are dropped."""
    example.labels = {}
    for node_id, type_name in sorted(example.tfg.labels.items()):
        index = bundle.types.get(type_name)
        if index is not None:
            example.labels[node_id] = index
    return example


def make_dataset(
    prepared: Dict[str, List[Example]],
    bundle: VocabularyBundle,
    handler: Optional[ErrorHandler] = None,
) -> DatasetSplits:
    """
    Index prepared train/valid/test examples against vocabularies built from train.

    Valid and test graphs lose out-of-vocabulary edges together with their duals.
    """
    handler = handler or ErrorHandler("dataset")
    dropped_edges = 0
    splits = {}
    for split_name in ("train", "valid", "test"):
        examples = []
        for example in prepared.get(split_name, []):
            if split_name != "train":
                dropped_edges += drop_unknown_edges(example, bundle)
            examples.append(index_example(example, bundle))
        splits[split_name] = examples
    if dropped_edges:
        logger.info(f"Dropped {dropped_edges} out-of-vocabulary edges from valid/test graphs")
    handler.log_summary()
    return DatasetSplits(splits["train"], splits["valid"], splits["test"])


def assemble(
    corpus: Corpus,
    fractions: Sequence[float],
    seed: int,
    vocab_config: Optional[VocabConfig] = None,
    max_tokens: Optional[int] = 5000,
    jobs: int = 1,
    bundle: Optional[VocabularyBundle] = None,
) -> Tuple[DatasetSplits, VocabularyBundle, Split]:
    """Split, prepare, build vocabularies from train (unless given) and index all splits."""
    split = split_corpus([f.file_id for f in corpus.files], fractions, seed)
    by_id = {f.file_id: f for f in corpus.files}
    handler = ErrorHandler("prepare")
    prepared = {
        name: prepare_files([by_id[i] for i in ids], corpus.manifest, max_tokens, jobs, handler)
        for name, ids in (("train", split.train), ("valid", split.valid), ("test", split.test))
    }
    if bundle is None:
        bundle = build_vocabularies(prepared["train"], vocab_config)
    return make_dataset(prepared, bundle), bundle, split
