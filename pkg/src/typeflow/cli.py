"""The typeflow command: pipeline stages as subcommands."""
import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import torch
from loguru import logger
from rich.console import Console

from .config import VocabConfig, config
from .core.gnn import NODE_KIND_CODES
from .core.model_config import PRESET_NAMES, preset
from .core.predict import predict_rows
from .corpus.generator import GenSpec, generate_corpus, write_corpus
from .frontend.annotations import strip_annotations
from .frontend.ast_json import dump_ast_json
from .frontend.lexer import tokenize
from .frontend.parser import parse
from .graph.tfg_io import save_tfg
from .infrastructure.error_handling import (
    EXIT_INTERNAL,
    EXIT_OK,
    EXIT_USAGE,
    ErrorHandler,
    TypeflowError,
    UsageError,
    exit_code_for,
)
from .models import TfgNodeKind
from .monitoring.benchmark import throughput_bench
from .monitoring.metrics import evaluate_model
from .monitoring.reports import (
    bench_table,
    graph_stats_table,
    metrics_table,
    plot_accuracy,
    plot_k_sweep,
    plot_throughput,
    signal_table,
    size_quartiles,
    write_json,
)
from .pipeline.checkpoint import read_checkpoint, write_checkpoint
from .pipeline.dataset import (
    AST_JSON_SUFFIX,
    SOURCE_SUFFIXES,
    Corpus,
    SourceFile,
    assemble,
    build_vocabularies,
    drop_unknown_edges,
    graph_from_ast_json,
    load_corpus,
    make_dataset,
    prepare_file,
    prepare_files,
    split_corpus,
)
from .pipeline.diagnostics import model_grad_check
from .pipeline.tensorize import collate, tensorize
from .pipeline.trainer import train
from .vocab.vocabulary import VocabularyBundle

GRAD_TOLERANCE = 1e-5

console = Console()


class CommandParser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit code 1."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _require(path: Optional[str], what: str) -> Path:
    if path is None or not Path(path).exists():
        raise UsageError(f"{what} not found: {path}")
    return Path(path)


def setup_logging(level: str, log_dir: Optional[str]):
    """Diagnostics go to stderr; a rotating file sink is added when log_dir is set."""
    logger.remove()
    logger.add(sys.stderr, level=level)
    if log_dir:
        logger.add(
            str(Path(log_dir) / "typeflow_{time}.log"),
            rotation="1 day",
            retention="7 days",
            level=level,
        )


def _training_config(args):
    updates = {"seed": args.seed}
    for flag, key in (("batch", "batch_size"), ("epochs", "epochs"), ("lr", "learning_rate"),
                      ("workers", "workers")):
        value = getattr(args, flag, None)
        if value is not None:
            updates[key] = value
    return config.training.model_copy(update=updates)


def _sources_for_split(corpus: Corpus, seed: int, split: str) -> List[SourceFile]:
    parts = split_corpus([f.file_id for f in corpus.files], config.training.split_fractions, seed)
    wanted = set(getattr(parts, split))
    return [f for f in corpus.files if f.file_id in wanted]


# subcommands


def cmd_gen_corpus(args) -> int:
    spec = GenSpec.load(_require(args.spec, "spec file")) if args.spec else GenSpec()
    updates = {k: v for k, v in (("seed", args.seed), ("files", args.files)) if v is not None}
    if updates:
        spec = spec.model_copy(update=updates)
    write_corpus(generate_corpus(spec, jobs=args.jobs, show_progress=True), args.out)
    return EXIT_OK


def _extract_one(source_path: Path, file_id: str, out_path: Path, ast_json: bool):
    if source_path.suffix == ".json":
        graph = graph_from_ast_json(file_id, source_path.read_bytes())
    else:
        source = source_path.read_text(encoding="utf-8")
        graph = prepare_file(file_id, source, max_tokens=None).tfg
        if ast_json:
            ast = parse(tokenize(strip_annotations(source)[0]))
            stem = out_path.name.removesuffix(".json").removesuffix(".tfg")
            out_path.with_name(stem + ".ast.json").write_bytes(dump_ast_json(ast))
    save_tfg(graph, out_path)
    logger.debug(f"{file_id}: {len(graph.nodes)} nodes, {len(graph.edges)} edges")


def cmd_extract(args) -> int:
    source = _require(args.input, "input")
    out = Path(args.out)
    if source.is_file():
        target = out if out.suffix == ".json" else out / f"{source.name}.tfg.json"
        target.parent.mkdir(parents=True, exist_ok=True)
        _extract_one(source, source.name, target, args.ast_json)
        logger.success(f"Wrote {target}")
        return EXIT_OK

    out.mkdir(parents=True, exist_ok=True)
    paths = sorted(p for p in source.rglob("*")
                   if p.is_file() and (p.suffix in SOURCE_SUFFIXES or p.name.endswith(AST_JSON_SUFFIX)))
    handler = ErrorHandler("extract")

    def work(path: Path):
        file_id = path.relative_to(source).as_posix()
        target = out / f"{file_id}.tfg.json"
        target.parent.mkdir(parents=True, exist_ok=True)
        return handler.run(file_id, _extract_one, path, file_id, target, args.ast_json)

    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            list(pool.map(work, paths))
    else:
        for path in paths:
            work(path)
    handler.log_summary()
    failed = handler.get_error_stats()["total_errors"]
    logger.success(f"Extracted {len(paths) - failed}/{len(paths)} files into {out}")
    return EXIT_OK


def cmd_vocab_build(args) -> int:
    corpus = load_corpus(_require(args.train, "training directory"))
    parts = split_corpus([f.file_id for f in corpus.files], config.training.split_fractions, args.seed)
    train_ids = set(parts.train)
    examples = prepare_files([f for f in corpus.files if f.file_id in train_ids], corpus.manifest,
                             config.training.max_file_tokens, args.jobs)
    vocab_config = VocabConfig(max_names=args.names, bpe_merges=args.merges, max_types=args.types)
    bundle = build_vocabularies(examples, vocab_config)
    bundle.save(args.out)
    logger.success(f"Saved vocabularies to {args.out}")
    return EXIT_OK


def _assemble(args, bundle: Optional[VocabularyBundle] = None):
    corpus = load_corpus(_require(args.data, "data directory"))
    vocab_config = VocabConfig(max_types=args.types) if getattr(args, "types", None) else config.vocab
    return assemble(corpus, config.training.split_fractions, args.seed, vocab_config,
                    config.training.max_file_tokens, args.jobs, bundle)


def cmd_train(args) -> int:
    bundle = VocabularyBundle.load(_require(args.vocab, "vocabulary directory")) if args.vocab else None
    dataset, bundle, _ = _assemble(args, bundle)
    model_config = preset(args.config, K=args.K)
    log_path = args.log or str(Path(args.out).with_suffix(".train.jsonl"))
    checkpoint = train(model_config, dataset, bundle, _training_config(args), log_path)
    write_checkpoint(checkpoint, args.out)
    return EXIT_OK


def cmd_predict(args) -> int:
    checkpoint = read_checkpoint(_require(args.model, "checkpoint"))
    source_path = _require(args.input, "input")
    example = prepare_file(source_path.name, source_path.read_text(encoding="utf-8"), max_tokens=None)
    drop_unknown_edges(example, checkpoint.bundle)
    example.labels = {}
    data = tensorize(example, checkpoint.bundle, checkpoint.config.contextual_layer)
    model = checkpoint.build_model()
    with torch.no_grad():
        logits = model(collate([data]))

    ast = parse(example.tokens)
    ident_code = NODE_KIND_CODES[TfgNodeKind.IDENT]
    rows = [i for i, code in enumerate(data.x_kind.tolist()) if code == ident_code]
    ranked = predict_rows(logits[rows], min(args.topk, len(checkpoint.bundle.types)), checkpoint.bundle.types.entries)
    results = []
    for node_id, ranking in zip(rows, ranked):
        node = example.tfg.nodes[node_id]
        span = ast.node(node.ast_ref).span
        results.append({
            "span": list(span),
            "name": node.feature,
            "predictions": [{"type": t, "probability": p} for t, p in ranking],
        })
    results.sort(key=lambda r: tuple(r["span"]))
    sys.stdout.write(json.dumps({"file": example.file_id, "identifiers": results}, indent=2) + "\n")
    return EXIT_OK


def _test_examples(checkpoint, args):
    corpus = load_corpus(_require(args.data, "data directory"))
    seed = args.seed if args.seed is not None else checkpoint.metadata.get("seed", 0)
    sources = _sources_for_split(corpus, seed, args.split)
    prepared = prepare_files(sources, corpus.manifest, config.training.max_file_tokens, args.jobs)
    return make_dataset({args.split: prepared}, checkpoint.bundle)


def cmd_eval(args) -> int:
    paths = [_require(p, "checkpoint") for p in args.model]
    reports = []
    for path in paths:
        checkpoint = read_checkpoint(path)
        examples = getattr(_test_examples(checkpoint, args), args.split)
        report = evaluate_model(checkpoint.build_model(), examples, checkpoint.bundle,
                                config.training.batch_size, name=path.stem)
        reports.append(report)
    console.print(metrics_table(reports))
    for report in reports:
        if report.by_signal:
            console.print(signal_table(report))
    if args.json:
        write_json([r.to_dict() for r in reports], args.json)
    if args.plot:
        plot_accuracy(reports, args.plot)
    return EXIT_OK


def cmd_bench(args) -> int:
    paths = [_require(p, "checkpoint") for p in args.model]
    corpus = load_corpus(_require(args.data, "data directory"))
    reports = []
    for path in paths:
        checkpoint = read_checkpoint(path)
        seed = args.seed if args.seed is not None else checkpoint.metadata.get("seed", 0)
        sources = _sources_for_split(corpus, seed, args.split)
        reports.append(throughput_bench(checkpoint, sources, args.batch, args.repeats,
                                        config.bench.warmup, name=path.stem))
    console.print(bench_table(reports))
    if args.json:
        write_json([r.to_dict() for r in reports], args.json)
    if args.plot:
        plot_throughput(reports, args.plot)
    return EXIT_OK


def cmd_grad_check(args) -> int:
    names = PRESET_NAMES if args.config == "all" else (args.config,)
    worst = 0.0
    for name in names:
        error = model_grad_check(name, args.seed, args.samples)
        worst = max(worst, error)
        sys.stdout.write(json.dumps({"config": name, "max_relative_error": error}) + "\n")
    if worst > GRAD_TOLERANCE:
        logger.error(f"gradient check failed: {worst:.3e} > {GRAD_TOLERANCE}")
        return EXIT_INTERNAL
    logger.success("gradient check passed")
    return EXIT_OK


def cmd_stats(args) -> int:
    dataset, _, _ = _assemble(args)
    stats: Dict[str, Dict[str, Sequence[float]]] = {}
    for split in ("train", "valid", "test"):
        examples = getattr(dataset, split)
        stats[split] = {
            "files": [len(examples)],
            "nodes": size_quartiles([len(e.tfg.nodes) for e in examples]),
            "edges": size_quartiles([len(e.tfg.edges) for e in examples]),
        }
    console.print(graph_stats_table(stats))
    if args.json:
        write_json(stats, args.json)
    return EXIT_OK


def cmd_sweep(args) -> int:
    try:
        ks = [int(k) for k in args.ks.split(",") if k.strip()]
    except ValueError:
        raise UsageError(f"--ks expects comma-separated integers, got {args.ks!r}") from None
    dataset, bundle, _ = _assemble(args)
    training = _training_config(args)
    results: Dict[int, float] = {}
    reports, records = [], []
    for k in ks:
        checkpoint = train(preset(args.config, K=k), dataset, bundle, training, show_progress=False)
        report = evaluate_model(checkpoint.build_model(), dataset.test, bundle,
                                training.batch_size, name=f"{args.config}-K{k}")
        results[k] = report.all.top1 or 0.0
        reports.append(report)
        records.append({"K": k, **report.to_dict()})
    console.print(metrics_table(reports, title=f"{args.config}: accuracy per K (%)"))
    write_json({"config": args.config, "seed": args.seed, "results": records}, args.out)
    if args.plot:
        plot_k_sweep(results, args.plot)
    return EXIT_OK


def build_parser() -> CommandParser:
    parser = CommandParser(prog="typeflow", description="GNN-based type inference for a JS/TS subset")
    parser.add_argument("--log-level", default=config.log_level, help="loguru level (default: %(default)s)")
    parser.add_argument("--log-dir", default=config.log_dir, help="directory of the rotating log file; '' disables it")
    commands = parser.add_subparsers(dest="command", required=True)

    def stage(name: str, help_text: str, handler, seed: Optional[int] = 0):
        sub = commands.add_parser(name, help=help_text)
        sub.add_argument("--seed", type=int, default=seed, help="run seed (default: %(default)s)")
        sub.set_defaults(handler=handler)
        return sub

    sub = stage("gen-corpus", "generate a synthetic annotated corpus", cmd_gen_corpus, seed=None)
    sub.add_argument("--spec", help="generation spec JSON (default: built-in spec)")
    sub.add_argument("--files", type=int, help="override the spec's file count")
    sub.add_argument("--out", required=True, help="output directory")
    sub.add_argument("--jobs", type=int, default=1)

    sub = stage("extract", "extract type flow graphs", cmd_extract)
    sub.add_argument("--in", dest="input", required=True,
                     help="source file, AST JSON document (.json) or directory")
    sub.add_argument("--out", required=True, help="output .json path (single file) or directory")
    sub.add_argument("--ast-json", action="store_true", help="also write the AST as JSON")
    sub.add_argument("--jobs", type=int, default=1)

    vocab = commands.add_parser("vocab", help="vocabulary commands")
    vocab_commands = vocab.add_subparsers(dest="vocab_command", required=True)
    sub = vocab_commands.add_parser("build", help="build vocabularies from the training split")
    sub.add_argument("--train", required=True, help="corpus directory")
    sub.add_argument("--names", type=int, default=config.vocab.max_names)
    sub.add_argument("--merges", type=int, default=config.vocab.bpe_merges)
    sub.add_argument("--types", type=int, default=config.vocab.max_types)
    sub.add_argument("--out", required=True, help="output directory")
    sub.add_argument("--seed", type=int, default=config.training.seed, help="split seed")
    sub.add_argument("--jobs", type=int, default=1)
    sub.set_defaults(handler=cmd_vocab_build)

    def training_flags(sub):
        sub.add_argument("--config", choices=PRESET_NAMES, default="rgnn")
        sub.add_argument("--batch", type=int, default=config.training.batch_size)
        sub.add_argument("--epochs", type=int, default=config.training.epochs)
        sub.add_argument("--lr", type=float, default=config.training.learning_rate)
        sub.add_argument("--workers", type=int, default=config.training.workers)
        sub.add_argument("--data", required=True, help="corpus directory")
        sub.add_argument("--jobs", type=int, default=1)

    sub = stage("train", "train a model", cmd_train, seed=config.training.seed)
    training_flags(sub)
    sub.add_argument("--K", type=int, default=8, help="propagation steps")
    sub.add_argument("--vocab", help="prebuilt vocabulary directory (default: build from the training split)")
    sub.add_argument("--log", help="training log path (default: <out>.train.jsonl)")
    sub.add_argument("--out", required=True, help="checkpoint path")

    sub = stage("predict", "rank types for every identifier of a file", cmd_predict)
    sub.add_argument("--model", required=True)
    sub.add_argument("--in", dest="input", required=True)
    sub.add_argument("--topk", type=int, default=5)

    for name, help_text, handler in (("eval", "top-k accuracy on a corpus split", cmd_eval),
                                     ("bench", "inference throughput", cmd_bench)):
        sub = stage(name, help_text, handler, seed=None)
        sub.add_argument("--model", required=True, nargs="+", help="one or more checkpoints")
        sub.add_argument("--data", required=True, help="corpus directory")
        sub.add_argument("--split", choices=("train", "valid", "test"), default="test")
        sub.add_argument("--json", help="write the report as JSON")
        sub.add_argument("--plot", help="write an SVG plot")
        sub.add_argument("--jobs", type=int, default=1)
        if name == "bench":
            sub.add_argument("--repeats", type=int, default=config.bench.repeats)
            sub.add_argument("--batch", type=int, default=config.bench.batch_size)

    sub = stage("grad-check", "finite-difference gradient check", cmd_grad_check)
    sub.add_argument("--config", choices=PRESET_NAMES + ("all",), default="all")
    sub.add_argument("--samples", type=int, default=200)

    sub = stage("stats", "graph size statistics per split", cmd_stats, seed=config.training.seed)
    sub.add_argument("--data", required=True)
    sub.add_argument("--json")
    sub.add_argument("--jobs", type=int, default=1)

    sub = stage("sweep", "train and evaluate one model per K", cmd_sweep, seed=config.training.seed)
    training_flags(sub)
    sub.add_argument("--ks", default="2,4,6,8,10,12")
    sub.add_argument("--out", required=True, help="result JSON path")
    sub.add_argument("--plot", help="SVG line plot of top-1 vs. K")
    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Parse argv, run the subcommand and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else EXIT_USAGE
    setup_logging(args.log_level.upper(), args.log_dir)
    try:
        return args.handler(args)
    except TypeflowError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return exit_code_for(e)
    except FileNotFoundError as e:
        logger.error(str(e))
        return EXIT_USAGE
    except Exception:
        logger.exception("internal error")
        return EXIT_INTERNAL


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
