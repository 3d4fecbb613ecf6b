"""Name segmentation and vocabularies."""

from .bpe import END_OF_WORD, BpeModel, bpe_train
from .split import split_subtokens
from .vocabulary import UNKNOWN, VocabKind, Vocabulary, VocabularyBundle, build_vocab


def bpe_encode(model: BpeModel, subtoken: str):
    """Segment one subtoken with a trained merge list."""
    return model.encode(subtoken)


__all__ = [
    "END_OF_WORD",
    "UNKNOWN",
    "BpeModel",
    "VocabKind",
    "Vocabulary",
    "VocabularyBundle",
    "bpe_encode",
    "bpe_train",
    "build_vocab",
    "split_subtokens",
]
