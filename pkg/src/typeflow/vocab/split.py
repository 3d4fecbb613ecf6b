"""Identifier name segmentation into subtokens."""
import re
from typing import List

_SEPARATORS = re.compile(r"[_$]+")
# acronym run, capitalised or lower-case word, digit run
_WORDS = re.compile(r"[A-Z]+(?![a-z])|[A-Z]?[a-z]+|[0-9]+")


def split_subtokens(name: str) -> List[str]:
    """
    Split an identifier at underscores and case boundaries.

    'parseHTMLDoc' -> ['parse', 'html', 'doc']; digits stay with the preceding
    subtoken ('utf8Decoder' -> ['utf8', 'decoder']).
    """
    subtokens: List[str] = []
    for part in _SEPARATORS.split(name):
        words: List[str] = []
        for word in _WORDS.findall(part):
            if word.isdigit() and words:
                words[-1] += word
            else:
                words.append(word)
        subtokens.extend(w.lower() for w in words)
    return subtokens or [name.lower()]
