"""Byte pair encoding over identifier subtokens."""
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple, Union

from loguru import logger

from ..infrastructure.error_handling import EmptyCorpus, SchemaError
from .split import split_subtokens

END_OF_WORD = "</w>"

Pair = Tuple[str, str]


def word_symbols(subtoken: str) -> Tuple[str, ...]:
    """Initial character symbols of a subtoken, end-of-word marker on the last."""
    if not subtoken:
        return ()
    chars = list(subtoken)
    chars[-1] += END_OF_WORD
    return tuple(chars)


def merge_pair(symbols: Sequence[str], pair: Pair) -> Tuple[str, ...]:
    """Merge every non-overlapping occurrence of pair, scanning left to right."""
    out: List[str] = []
    i = 0
    while i < len(symbols):
        if i + 1 < len(symbols) and symbols[i] == pair[0] and symbols[i + 1] == pair[1]:
            out.append(pair[0] + pair[1])
            i += 2
        else:
            out.append(symbols[i])
            i += 1
    return tuple(out)


@dataclass
class BpeModel:
    """Ordered merge list plus the symbol inventory it produces."""
    merges: List[Pair] = field(default_factory=list)
    symbols: List[str] = field(default_factory=list)
    ranks: Dict[Pair, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        self.merges = [tuple(m) for m in self.merges]
        self.ranks = {pair: rank for rank, pair in enumerate(self.merges)}

    def encode(self, subtoken: str) -> List[str]:
        """Apply merges greedily in rank order."""
        symbols = word_symbols(subtoken)
        while len(symbols) > 1:
            ranked = [self.ranks[p] for p in zip(symbols, symbols[1:]) if p in self.ranks]
            if not ranked:
                break
            symbols = merge_pair(symbols, self.merges[min(ranked)])
        return list(symbols)

    def encode_name(self, name: str) -> List[str]:
        """Segments of a full identifier: split into subtokens, then encode each."""
        segments: List[str] = []
        for subtoken in split_subtokens(name):
            segments.extend(self.encode(subtoken))
        return segments

    def to_json(self) -> dict:
        return {"merges": [list(m) for m in self.merges], "symbols": list(self.symbols)}

    @classmethod
    def from_json(cls, obj: dict) -> "BpeModel":
        merges = obj.get("merges") if isinstance(obj, dict) else None
        if not isinstance(merges, list) or not all(
            isinstance(m, list) and len(m) == 2 and all(isinstance(s, str) for s in m) for m in merges
        ):
            raise SchemaError("expected a list of [left, right] string pairs", "$.merges")
        symbols = obj.get("symbols")
        if symbols is None:
            symbols = _inventory([], merges)
        return cls(merges=[tuple(m) for m in merges], symbols=list(symbols))


def _inventory(words: Iterable[Tuple[str, ...]], merges: Iterable[Sequence[str]]) -> List[str]:
    base = sorted({symbol for word in words for symbol in word})
    merged = [a + b for a, b in merges]
    return list(dict.fromkeys(base + merged))


def bpe_train(names: Union[Iterable[str], Mapping[str, int]], max_merges: int) -> BpeModel:
    """
    Learn merges from identifier names (training split only).

    Names are split into lower-cased subtokens first. Training stops after
    max_merges merges or when the most frequent pair occurs only once. Frequency
    ties go to the lexicographically smallest pair.
    """
    counts = Counter(names) if not isinstance(names, Mapping) else Counter(dict(names))
    if not counts:
        raise EmptyCorpus("cannot train BPE on an empty name multiset")

    vocab: Counter = Counter()
    for name, count in counts.items():
        for subtoken in split_subtokens(name):
            vocab[word_symbols(subtoken)] += count
    initial_words = list(vocab)

    merges: List[Pair] = []
    while len(merges) < max_merges:
        pairs: Counter = Counter()
        for symbols, count in vocab.items():
            for pair in zip(symbols, symbols[1:]):
                pairs[pair] += count
        if not pairs:
            break
        best_count = max(pairs.values())
        if best_count < 2:
            break
        best = min(pair for pair, count in pairs.items() if count == best_count)
        merges.append(best)
        merged: Counter = Counter()
        for symbols, count in vocab.items():
            merged[merge_pair(symbols, best)] += count
        vocab = merged

    logger.info(f"BPE learned {len(merges)} merges from {len(counts)} distinct names")
    return BpeModel(merges=merges, symbols=_inventory(initial_words, merges))
