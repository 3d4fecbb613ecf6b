"""Fixed-size vocabularies and the bundle persisted next to a model."""
import json
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Union

from ..infrastructure.error_handling import EmptyCorpus, MissingVocabEntry, SchemaError
from .bpe import BpeModel

UNKNOWN = "<unk>"


class VocabKind(Enum):
    NAME = "name"
    SEGMENT = "segment"
    NODE_FEATURE = "node_feature"
    EDGE_FEATURE = "edge_feature"
    TYPE = "type"


@dataclass
class Vocabulary:
    """Bijection between strings and dense indices."""
    kind: VocabKind
    entries: List[str]
    unknown_index: Optional[int] = None
    _index: Dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        self._index = {entry: i for i, entry in enumerate(self.entries)}
        if len(self._index) != len(self.entries):
            raise SchemaError("duplicate vocabulary entries", f"$[{self.kind.value}]")

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, item: str) -> bool:
        return item in self._index and self._index[item] != self.unknown_index

    def get(self, item: str) -> Optional[int]:
        """Index of item, UNKNOWN's index when out of vocabulary, else None."""
        index = self._index.get(item)
        if index is None or index == self.unknown_index:
            return self.unknown_index
        return index

    def index(self, item: str) -> int:
        """Index of item; raises MissingVocabEntry when absent and there is no UNKNOWN."""
        index = self.get(item)
        if index is None:
            raise MissingVocabEntry(self.kind.value, item)
        return index

    def lookup(self, index: int) -> str:
        return self.entries[index]

    def to_json(self) -> List[str]:
        return list(self.entries)

    @classmethod
    def from_json(cls, kind: VocabKind, entries) -> "Vocabulary":
        if not isinstance(entries, list) or not all(isinstance(e, str) for e in entries):
            raise SchemaError("expected a JSON array of strings", f"$[{kind.value}]")
        unknown = entries.index(UNKNOWN) if UNKNOWN in entries else None
        return cls(kind, list(entries), unknown)


def build_vocab(
    items: Union[Iterable[str], Mapping[str, int]],
    max_size: Optional[int],
    with_unknown: bool,
    kind: VocabKind = VocabKind.NAME,
) -> Vocabulary:
    """The max_size most frequent items (ties lexicographic), UNKNOWN appended last when requested."""
    counts = Counter(dict(items)) if isinstance(items, Mapping) else Counter(items)
    counts.pop(UNKNOWN, None)
    if not counts:
        raise EmptyCorpus(f"no items for the {kind.value} vocabulary")
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    if max_size is not None:
        ranked = ranked[:max_size]
    entries = [item for item, _ in ranked]
    unknown_index = None
    if with_unknown:
        unknown_index = len(entries)
        entries.append(UNKNOWN)
    return Vocabulary(kind, entries, unknown_index)


_FILES = {
    "names": (VocabKind.NAME, "names.json"),
    "segments": (VocabKind.SEGMENT, "segments.json"),
    "node_features": (VocabKind.NODE_FEATURE, "node_features.json"),
    "edge_features": (VocabKind.EDGE_FEATURE, "edge_features.json"),
    "types": (VocabKind.TYPE, "types.json"),
}


@dataclass
class VocabularyBundle:
    """All vocabularies of one training split, the BPE model and training type counts."""
    names: Vocabulary
    segments: Vocabulary
    node_features: Vocabulary
    edge_features: Vocabulary
    types: Vocabulary
    bpe: BpeModel
    type_counts: Dict[str, int] = field(default_factory=dict)

    def top_frequent_types(self, n: int = 10) -> List[str]:
        """The n most frequent training types (ties lexicographic)."""
        ranked = sorted(self.type_counts.items(), key=lambda kv: (-kv[1], kv[0]))
        return [t for t, _ in ranked[:n]]

    def to_json(self) -> dict:
        out = {attr: getattr(self, attr).to_json() for attr in _FILES}
        out["bpe"] = self.bpe.to_json()
        out["type_counts"] = dict(self.type_counts)
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "VocabularyBundle":
        if not isinstance(obj, dict):
            raise SchemaError("expected an object", "$")
        missing = [key for key in list(_FILES) + ["bpe"] if key not in obj]
        if missing:
            raise SchemaError(f"missing {', '.join(missing)}", "$")
        vocabs = {attr: Vocabulary.from_json(kind, obj[attr]) for attr, (kind, _) in _FILES.items()}
        return cls(bpe=BpeModel.from_json(obj["bpe"]), type_counts=dict(obj.get("type_counts", {})), **vocabs)

    def save(self, directory: Union[str, Path]):
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        for attr, (_, filename) in _FILES.items():
            (directory / filename).write_text(json.dumps(getattr(self, attr).to_json()), encoding="utf-8")
        (directory / "bpe.json").write_text(json.dumps(self.bpe.to_json()), encoding="utf-8")
        (directory / "type_counts.json").write_text(json.dumps(self.type_counts, indent=1), encoding="utf-8")

    @classmethod
    def load(cls, directory: Union[str, Path]) -> "VocabularyBundle":
        directory = Path(directory)
        obj = {}
        for attr, (_, filename) in _FILES.items():
            obj[attr] = json.loads((directory / filename).read_text(encoding="utf-8"))
        obj["bpe"] = json.loads((directory / "bpe.json").read_text(encoding="utf-8"))
        counts_path = directory / "type_counts.json"
        if counts_path.exists():
            obj["type_counts"] = json.loads(counts_path.read_text(encoding="utf-8"))
        return cls.from_json(obj)
