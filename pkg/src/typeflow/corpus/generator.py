"""
Synthetic annotated corpus generator.

Every labeled identifier gets its type from one signal source:

- literal: initialised from a literal, directly or through a chain of
  literal-initialised variables
- name: only the identifier's name hints at the type (parameters and
  opaque initialisers)
- property: read from a property that was written with a value of the type
- call: returned by a typed factory or by a function defined in the file

The generator keeps a record of every label's source and checks it against
the emitted code before writing anything.
"""
import json
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from loguru import logger
from pydantic import BaseModel, Field, ValidationError
from rich.console import Console
from rich.progress import BarColumn, Progress, SpinnerColumn, TextColumn, TimeRemainingColumn

from ..frontend.annotations import strip_annotations
from ..frontend.lexer import tokenize
from ..infrastructure.error_handling import SpecError
from ..models import TokenKind, literal_kind

SIGNAL_CLASSES = ("literal", "name", "property", "call")

# palette order is frequency rank
TYPE_ORDER = (
    "number", "string", "boolean", "Array", "Promise", "Date", "Map",
    "Error", "Set", "RegExp", "Element", "Response", "Buffer", "URL",
)
LITERAL_TYPES = frozenset({"number", "string", "boolean", "RegExp"})
_LITERAL_KIND_TYPES = {
    TokenKind.NUMBER: "number",
    TokenKind.STRING: "string",
    TokenKind.BOOL: "boolean",
    TokenKind.REGEX: "RegExp",
}

# annotation text per type; generic arguments are removed by label preprocessing
ANNOTATIONS = {
    "Array": ("Array<number>", "Array<string>", "string[]"),
    "Promise": ("Promise<string>", "Promise<boolean>"),
    "Map": ("Map<string, number>",),
    "Set": ("Set<string>",),
}

NAME_POOLS = {
    "number": ("count", "total", "size", "index", "amount", "offset", "limit", "width"),
    "string": ("name", "label", "title", "message", "path", "prefix", "suffix", "text"),
    "boolean": ("enabled", "visible", "done", "isReady", "hasItems", "valid", "isOpen"),
    "Array": ("items", "values", "rows", "entries", "records", "elements"),
    "Promise": ("pending", "request", "task", "future", "job"),
    "Date": ("createdAt", "deadline", "startDate", "expiry", "birthday"),
    "Map": ("lookup", "registry", "byId", "cache", "dictionary"),
    "Error": ("error", "failure", "problem", "fault", "exception"),
    "Set": ("seen", "visited", "uniqueIds", "tags", "members"),
    "RegExp": ("pattern", "matcher", "regex", "rule"),
    "Element": ("button", "container", "panel", "widget", "header"),
    "Response": ("response", "reply", "httpResult", "answer"),
    "Buffer": ("chunk", "bytes", "payload", "rawData", "blob"),
    "URL": ("endpoint", "link", "href", "address", "location"),
}

PROPERTY_POOLS = {
    "number": ("port", "retries", "height", "depth"),
    "string": ("host", "slug", "caption", "locale"),
    "boolean": ("active", "hidden", "ok", "dirty"),
    "Array": ("children", "queue", "history"),
    "Promise": ("ready", "loading"),
    "Date": ("updatedAt", "modifiedAt"),
    "Map": ("headers", "mapping"),
    "Error": ("lastError", "cause"),
    "Set": ("flags", "labels"),
    "RegExp": ("validator", "tokenRule"),
    "Element": ("root", "anchor"),
    "Response": ("lastResponse", "reply"),
    "Buffer": ("body", "contents"),
    "URL": ("origin", "baseUrl"),
}

FACTORY_POOLS = {
    "number": ("parseNumber", "computeScore"),
    "string": ("formatText", "readLine"),
    "boolean": ("checkFlag", "isAllowed"),
    "Array": ("listItems", "collectAll"),
    "Promise": ("fetchLater", "scheduleTask"),
    "Date": ("parseDate", "currentDate"),
    "Map": ("createMap", "groupBy"),
    "Error": ("makeError", "wrapError"),
    "Set": ("createSet", "uniqueOf"),
    "RegExp": ("compilePattern", "toRegex"),
    "Element": ("querySelector", "createElement"),
    "Response": ("fetchResponse", "sendRequest"),
    "Buffer": ("readFile", "encodeBytes"),
    "URL": ("parseUrl", "resolveUrl"),
}

NEUTRAL_NAMES = ("value", "item", "current", "result", "output", "temp", "local", "ref", "slot", "thing")
OPAQUE_CALLS = ("load", "unwrap", "resolve", "lookupValue", "getValue")
HOLDER_NAMES = ("state", "context", "options", "store", "settings")
FUNCTION_VERBS = ("process", "handle", "compute", "build", "update", "render", "prepare", "apply")
FUNCTION_NOUNS = ("Order", "User", "Item", "Report", "Session", "Batch", "Request", "Config")
WORDS = ("alpha", "beta", "gamma", "delta", "north", "south", "hello", "world", "queue", "stack")
REGEX_LITERALS = ("/ab+c/", "/^[a-z]+$/i", "/\\d+/g", "/[0-9a-f]{4}/")

# upper bound of tokens one generated statement can produce
TOKENS_PER_STATEMENT = 24
MAX_FILE_TOKENS = 5000


def default_palette() -> Dict[str, float]:
    """Zipf-like frequencies over the 14 palette types."""
    weights = np.array([1.0 / (rank + 1) for rank in range(len(TYPE_ORDER))])
    weights /= weights.sum()
    return {name: float(w) for name, w in zip(TYPE_ORDER, weights)}


class GenSpec(BaseModel):
    """Generation parameters."""
    seed: int = 0
    files: int = 100
    functions_per_file: Tuple[int, int] = (1, 3)
    statements_per_function: Tuple[int, int] = (3, 8)
    palette: Dict[str, float] = Field(default_factory=default_palette)
    signal_mix: Dict[str, float] = Field(
        default_factory=lambda: {"literal": 0.4, "name": 0.2, "property": 0.2, "call": 0.2}
    )

    @classmethod
    def from_json(cls, obj) -> "GenSpec":
        try:
            return cls.model_validate(obj)
        except ValidationError as e:
            raise SpecError(f"invalid generation spec: {e}") from None

    @classmethod
    def load(cls, path: Union[str, Path]) -> "GenSpec":
        try:
            obj = json.loads(Path(path).read_text(encoding="utf-8"))
        except ValueError as e:
            raise SpecError(f"{path}: invalid JSON: {e}") from None
        return cls.from_json(obj)

    def check(self):
        """Raise SpecError when the constraints cannot be satisfied."""
        if self.files < 0:
            raise SpecError("file count must be non-negative")
        for label, (low, high) in (("functions_per_file", self.functions_per_file),
                                   ("statements_per_function", self.statements_per_function)):
            if low < 1 or high < low:
                raise SpecError(f"{label} must be a range with 1 <= low <= high, got {(low, high)}")
        unknown_types = sorted(set(self.palette) - set(TYPE_ORDER))
        if unknown_types:
            raise SpecError(f"no generator for palette types {unknown_types}")
        unknown_signals = sorted(set(self.signal_mix) - set(SIGNAL_CLASSES))
        if unknown_signals:
            raise SpecError(f"unknown signal classes {unknown_signals}")
        for label, dist in (("palette", self.palette), ("signal_mix", self.signal_mix)):
            if any(v < 0 for v in dist.values()) or sum(dist.values()) <= 0:
                raise SpecError(f"{label} must hold non-negative weights with a positive sum")
        if self.only_literal_signal() and not any(t in LITERAL_TYPES and w > 0 for t, w in self.palette.items()):
            raise SpecError("a literal-only signal mix needs at least one literal-expressible type in the palette")
        worst = self.functions_per_file[1] * (self.statements_per_function[1] + 4) * TOKENS_PER_STATEMENT
        if worst > MAX_FILE_TOKENS:
            raise SpecError(f"files could reach {worst} tokens, above the {MAX_FILE_TOKENS} limit")
        if len([w for w in self.palette.values() if w > 0]) < 12:
            logger.warning("palette has fewer than 12 types; frequent/rest accuracy split will be thin")

    def only_literal_signal(self) -> bool:
        return {s for s, w in self.signal_mix.items() if w > 0} == {"literal"}

    def type_distribution(self) -> Tuple[List[str], np.ndarray]:
        """Palette restricted to what the signal mix can express, normalised."""
        names = [t for t in TYPE_ORDER if self.palette.get(t, 0) > 0]
        if self.only_literal_signal():
            names = [t for t in names if t in LITERAL_TYPES]
        weights = np.array([self.palette[t] for t in names], dtype=np.float64)
        return names, weights / weights.sum()


@dataclass
class LabelRecord:
    """One annotated identifier and where its type comes from."""
    name: str
    type: str
    signal_class: str
    # ("literal", text) | ("var", record index) | ("name",) | ("property", prop) | ("call", callee) | ("return", record index)
    source: Tuple


@dataclass
class FilePlan:
    """Generated source of one file with its label records in identifier order."""
    file_id: str
    source: str = ""
    labels: List[LabelRecord] = field(default_factory=list)
    property_types: Dict[str, str] = field(default_factory=dict)
    callee_types: Dict[str, str] = field(default_factory=dict)
    manifest: List[dict] = field(default_factory=list)


@dataclass
class _Local:
    name: str
    type: str
    record: Optional[int]


class _FileWriter:
    """Builds one file from a per-file random stream."""

    def __init__(self, spec: GenSpec, rng: np.random.Generator, file_id: str):
        self.spec = spec
        self.rng = rng
        self.plan = FilePlan(file_id)
        self.types, self.type_weights = spec.type_distribution()
        self.signals = [s for s in SIGNAL_CLASSES if spec.signal_mix.get(s, 0) > 0]
        self.used_names: Dict[str, int] = {}
        self.functions: List[Tuple[str, str, int]] = []  # (name, return type, arity)
        self.lines: List[str] = []

    # sampling helpers

    def pick(self, options: Sequence):
        return options[int(self.rng.integers(len(options)))]

    def sample_type(self) -> str:
        return self.types[int(self.rng.choice(len(self.types), p=self.type_weights))]

    def sample_signal(self, type_name: str) -> str:
        feasible = [s for s in self.signals if s != "literal" or type_name in LITERAL_TYPES]
        weights = np.array([self.spec.signal_mix[s] for s in feasible], dtype=np.float64)
        return feasible[int(self.rng.choice(len(feasible), p=weights / weights.sum()))]

    def fresh(self, base: str) -> str:
        count = self.used_names.get(base, 0)
        self.used_names[base] = count + 1
        return base if count == 0 else f"{base}{count + 1}"

    def annotation(self, type_name: str) -> str:
        return self.pick(ANNOTATIONS[type_name]) if type_name in ANNOTATIONS else type_name

    def literal(self, type_name: str) -> str:
        if type_name == "number":
            return str(int(self.rng.integers(0, 1000))) if self.rng.random() < 0.7 else f"{self.rng.integers(0, 100)}.5"
        if type_name == "string":
            return f"'{self.pick(WORDS)}'"
        if type_name == "boolean":
            return self.pick(("true", "false"))
        return self.pick(REGEX_LITERALS)

    def record(self, name: str, type_name: str, signal: str, source: Tuple) -> int:
        self.plan.labels.append(LabelRecord(name, type_name, signal, source))
        return len(self.plan.labels) - 1

    # statements

    def typed_value(self, type_name: str, scope: List[_Local]) -> str:
        """An unlabeled expression of the given type."""
        same = [v for v in scope if v.type == type_name]
        if same and self.rng.random() < 0.3:
            return self.pick(same).name
        if type_name in LITERAL_TYPES and self.rng.random() < 0.6:
            return self.literal(type_name)
        return f"{self.pick(FACTORY_POOLS[type_name])}({self.argument(scope)})"

    def argument(self, scope: List[_Local]) -> str:
        if scope and self.rng.random() < 0.7:
            return self.pick(scope).name
        return self.literal(self.pick(("number", "string")))

    def declaration(self, type_name: str, signal: str, scope: List[_Local], holder: str, indent: str) -> _Local:
        """Emit a labeled declaration whose type is carried by the chosen signal."""
        keyword = self.pick(("let", "const", "var"))
        if signal == "name":
            name = self.fresh(self.pick(NAME_POOLS[type_name]))
            init = f"{self.pick(OPAQUE_CALLS)}({self.argument(scope)})"
            source: Tuple = ("name",)
        elif signal == "literal":
            name = self.fresh(self.pick(NEUTRAL_NAMES))
            chain = [v for v in scope if v.type == type_name and v.record is not None
                     and self.plan.labels[v.record].signal_class == "literal"]
            if chain and self.rng.random() < 0.4:
                origin = self.pick(chain)
                init, source = origin.name, ("var", origin.record)
            else:
                init = self.literal(type_name)
                source = ("literal", init)
        elif signal == "property":
            name = self.fresh(self.pick(NEUTRAL_NAMES))
            prop = self.pick(PROPERTY_POOLS[type_name])
            if prop not in self.plan.property_types:
                self.plan.property_types[prop] = type_name
                self.lines.append(f"{indent}{holder}.{prop} = {self.typed_value(type_name, scope)};")
            init, source = f"{holder}.{prop}", ("property", prop)
        else:
            name = self.fresh(self.pick(NEUTRAL_NAMES))
            local_fns = [f for f in self.functions if f[1] == type_name]
            if local_fns and self.rng.random() < 0.5:
                callee, _, arity = self.pick(local_fns)
            else:
                callee, arity = self.pick(FACTORY_POOLS[type_name]), 1
                self.plan.callee_types[callee] = type_name
            args = ", ".join(self.argument(scope) for _ in range(arity))
            init, source = f"{callee}({args})", ("call", callee)
        index = self.record(name, type_name, signal, source)
        self.lines.append(f"{indent}{keyword} {name}: {self.annotation(type_name)} = {init};")
        return _Local(name, type_name, index)

    def filler(self, scope: List[_Local], indent: str):
        """An unlabeled statement using variables in scope."""
        numbers = [v for v in scope if v.type == "number"]
        flags = [v for v in scope if v.type == "boolean"]
        roll = self.rng.random()
        if numbers and roll < 0.3:
            target = self.pick(numbers)
            self.lines.append(f"{indent}{target.name} = {target.name} + {self.literal('number')};")
        elif flags and roll < 0.5:
            flag = self.pick(flags)
            self.lines.append(f"{indent}if ({flag.name}) {{")
            self.lines.append(f"{indent}  log({self.argument(scope)});")
            self.lines.append(f"{indent}}}")
        else:
            self.lines.append(f"{indent}log({self.argument(scope)});")

    def function(self):
        name = self.fresh(self.pick(FUNCTION_VERBS) + self.pick(FUNCTION_NOUNS))
        annotate_return = "call" in self.signals
        annotate_params = "name" in self.signals
        if annotate_return:
            # type is fixed once the returned value is chosen
            fn_record = self.record(name, "", "call", ("return", None))

        params: List[_Local] = []
        for _ in range(int(self.rng.integers(0, 3))):
            p_type = self.sample_type()
            p_name = self.fresh(self.pick(NAME_POOLS[p_type]))
            record = self.record(p_name, p_type, "name", ("name",)) if annotate_params else None
            params.append(_Local(p_name, p_type, record))

        header_line = len(self.lines)
        self.lines.append("")
        indent = "  "
        holder = self.fresh(self.pick(HOLDER_NAMES))
        self.lines.append(f"{indent}const {holder} = {self.pick(OPAQUE_CALLS)}({self.argument(params)});")
        scope = list(params)
        low, high = self.spec.statements_per_function
        for _ in range(int(self.rng.integers(low, high + 1))):
            if self.rng.random() < 0.75:
                t = self.sample_type()
                scope.append(self.declaration(t, self.sample_signal(t), scope, holder, indent))
            else:
                self.filler(scope, indent)

        returned = [v for v in scope if v.record is not None]
        if not returned:
            t = self.sample_type()
            returned = [self.declaration(t, self.sample_signal(t), scope, holder, indent)]
        value = self.pick(returned)
        self.lines.append(f"{indent}return {value.name};")
        self.lines.append("}")
        self.lines.append("")

        rendered = ", ".join(f"{p.name}: {self.annotation(p.type)}" if annotate_params else p.name for p in params)
        header = f"function {name}({rendered})"
        if annotate_return:
            header += f": {self.annotation(value.type)}"
            self.plan.labels[fn_record].type = value.type
            self.plan.labels[fn_record].source = ("return", value.record)
        self.lines[header_line] = header + " {"
        self.functions.append((name, value.type, len(params)))

    def write(self) -> FilePlan:
        low, high = self.spec.functions_per_file
        for _ in range(int(self.rng.integers(low, high + 1))):
            self.function()
        name, _, arity = self.functions[-1]
        args = ", ".join(self.literal(self.pick(("number", "string"))) for _ in range(arity))
        self.lines.append(f"{name}({args});")
        self.plan.source = "\n".join(self.lines) + "\n"
        return self.plan


def _base_name(name: str) -> str:
    return re.sub(r"\d+$", "", name)


def check_signals(plan: FilePlan) -> List[str]:
    """
    Verify every label against its recorded source; returns the violations.

    Literal chains are followed back to a literal whose kind must match the label.
    """
    problems = []
    for i, label in enumerate(plan.labels):
        kind, *rest = label.source
        if label.signal_class == "literal":
            seen, current = set(), label
            while current.source[0] == "var" and current.source[1] not in seen:
                seen.add(current.source[1])
                current = plan.labels[current.source[1]]
                if current.signal_class != "literal":
                    problems.append(f"{label.name}: chain passes through non-literal {current.name}")
                    break
            if current.source[0] != "literal":
                problems.append(f"{label.name}: literal chain does not end in a literal")
            elif _LITERAL_KIND_TYPES.get(literal_kind(current.source[1])) != label.type:
                problems.append(f"{label.name}: literal {current.source[1]} is not a {label.type}")
        elif label.signal_class == "name":
            if _base_name(label.name) not in NAME_POOLS.get(label.type, ()):
                problems.append(f"{label.name}: name does not hint {label.type}")
        elif label.signal_class == "property":
            if plan.property_types.get(rest[0]) != label.type:
                problems.append(f"{label.name}: property {rest[0]} holds {plan.property_types.get(rest[0])}")
        elif kind == "return":
            if rest[0] is None or plan.labels[rest[0]].type != label.type:
                problems.append(f"{label.name}: returns a value of another type")
        else:
            callee = rest[0]
            local = {f: t for f, t in plan.callee_types.items()}
            local.update({lab.name: lab.type for lab in plan.labels if lab.source[0] == "return"})
            if local.get(callee) != label.type:
                problems.append(f"{label.name}: callee {callee} returns {local.get(callee)}")
    return problems


def attach_spans(plan: FilePlan):
    """Locate every label in the stripped source and fill the manifest entries."""
    stripped, annotations = strip_annotations(plan.source)
    spans = sorted(annotations)
    if len(spans) != len(plan.labels):
        raise SpecError(f"{plan.file_id}: {len(spans)} annotations for {len(plan.labels)} labels")
    plan.manifest = []
    for span, label in zip(spans, plan.labels):
        if stripped[span[0]:span[1]] != label.name:
            raise SpecError(f"{plan.file_id}: label {label.name} not found at {span}")
        plan.manifest.append({"span": list(span), "name": label.name, "type": label.type,
                              "signal_class": label.signal_class})
    tokens = len(tokenize(stripped))
    if tokens > MAX_FILE_TOKENS:
        raise SpecError(f"{plan.file_id}: {tokens} tokens exceeds {MAX_FILE_TOKENS}")


def file_id_for(index: int) -> str:
    return f"file_{index:05d}.ts"


def generate_file(spec: GenSpec, index: int) -> FilePlan:
    """Generate file number index; depends only on (seed, index)."""
    rng = np.random.default_rng([spec.seed, index])
    plan = _FileWriter(spec, rng, file_id_for(index)).write()
    problems = check_signals(plan)
    if problems:
        raise SpecError(f"{plan.file_id}: generator self-check failed: {problems[0]}")
    attach_spans(plan)
    return plan


@dataclass
class GeneratedCorpus:
    spec: GenSpec
    files: List[FilePlan]

    def manifest(self) -> dict:
        return {
            "spec": self.spec.model_dump(mode="json"),
            "files": {plan.file_id: plan.manifest for plan in self.files},
        }


def generate_corpus(spec: GenSpec, jobs: int = 1, show_progress: bool = False) -> GeneratedCorpus:
    """Generate spec.files annotated files plus their ground-truth manifest."""
    spec.check()
    indices = range(spec.files)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            files = list(pool.map(lambda i: generate_file(spec, i), indices))
    else:
        files = []
        with Progress(
            SpinnerColumn(),
            TextColumn("[progress.description]{task.description}"),
            BarColumn(),
            TextColumn("[progress.percentage]{task.percentage:>3.0f}%"),
            TimeRemainingColumn(),
            console=Console(stderr=True),
            disable=not show_progress,
        ) as progress:
            task = progress.add_task("[cyan]Generating corpus...", total=spec.files)
            for i in indices:
                files.append(generate_file(spec, i))
                progress.update(task, advance=1)
    labels = sum(len(plan.labels) for plan in files)
    logger.info(f"Generated {len(files)} files with {labels} labels (seed {spec.seed})")
    return GeneratedCorpus(spec, files)


def write_corpus(corpus: GeneratedCorpus, out_dir: Union[str, Path]) -> Path:
    """Write files/<id> and manifest.json under out_dir."""
    out_dir = Path(out_dir)
    files_dir = out_dir / "files"
    files_dir.mkdir(parents=True, exist_ok=True)
    for plan in corpus.files:
        (files_dir / plan.file_id).write_text(plan.source, encoding="utf-8")
    (out_dir / "manifest.json").write_text(
        json.dumps(corpus.manifest(), indent=1, sort_keys=True) + "\n", encoding="utf-8"
    )
    logger.success(f"Wrote {len(corpus.files)} files to {out_dir}")
    return out_dir


def label_frequencies(corpus: GeneratedCorpus) -> Dict[str, float]:
    """Observed label type distribution."""
    counts: Dict[str, int] = {}
    for plan in corpus.files:
        for label in plan.labels:
            counts[label.type] = counts.get(label.type, 0) + 1
    total = sum(counts.values())
    if total == 0:
        return {}
    return {t: c / total for t, c in sorted(counts.items())}
