"""Separating ": Type" annotations from code.

Annotations are accepted after a declared variable name, after a parameter
name and after a function's parameter list. The annotation text itself is
kept verbatim; label preprocessing interprets it later.
"""
from typing import Dict, List, Optional, Sequence, Tuple

from loguru import logger

from ..infrastructure.error_handling import ParseError
from ..models import Span, Token, TokenKind
from .lexer import from_byte_view, to_byte_view, tokenize
from .parser import DECLARATION_KEYWORDS, parse

# bracket depth change of each punctuator inside a type expression
_DEPTH = {"<": 1, ">": -1, ">>": -2, ">>>": -3, "(": 1, ")": -1, "[": 1, "]": -1}


def _is_punct(tok: Optional[Token], text: str) -> bool:
    return tok is not None and tok.kind is TokenKind.PUNCTUATOR and tok.text == text


class _Annotation:
    __slots__ = ("target", "colon", "first", "last")

    def __init__(self, target: Optional[Token], colon: Token, first: Token, last: Token):
        self.target = target
        self.colon = colon
        self.first = first
        self.last = last


class AnnotationScanner:
    """Finds annotation token ranges in an annotated token stream."""

    def __init__(self, tokens: Sequence[Token]):
        self.tokens = list(tokens)
        self.found: List[_Annotation] = []

    def tok(self, i: int) -> Optional[Token]:
        return self.tokens[i] if 0 <= i < len(self.tokens) else None

    def scan(self) -> List[_Annotation]:
        i = 0
        while i < len(self.tokens):
            tok = self.tokens[i]
            if tok.kind is TokenKind.KEYWORD and tok.text in DECLARATION_KEYWORDS:
                name = self.tok(i + 1)
                if name is not None and name.kind is TokenKind.IDENTIFIER and _is_punct(self.tok(i + 2), ":"):
                    i = self.type_range(name, i + 2, {"=", ";"})
                    continue
            elif tok.kind is TokenKind.KEYWORD and tok.text == "function":
                i = self.function_header(i)
                continue
            i += 1
        return self.found

    def function_header(self, i: int) -> int:
        j = i + 1
        name = self.tok(j)
        if name is not None and name.kind is TokenKind.IDENTIFIER:
            j += 1
        else:
            name = None
        if not _is_punct(self.tok(j), "("):
            return i + 1
        j += 1
        while self.tok(j) is not None and not _is_punct(self.tok(j), ")"):
            param = self.tok(j)
            if param.kind is TokenKind.IDENTIFIER and _is_punct(self.tok(j + 1), ":"):
                j = self.type_range(param, j + 1, {",", ")"})
            else:
                j += 1
        j += 1
        if _is_punct(self.tok(j), ":"):
            j = self.type_range(name, j, {"{"})
        return j

    def type_range(self, target: Optional[Token], colon_index: int, stops: set) -> int:
        """Record the type after the colon; return the index of the stop token."""
        colon = self.tokens[colon_index]
        depth = 0
        j = colon_index + 1
        while True:
            tok = self.tok(j)
            if tok is None:
                raise ParseError("unterminated type annotation", colon.span, sorted(stops))
            if depth <= 0 and tok.kind is TokenKind.PUNCTUATOR and tok.text in stops:
                break
            if tok.kind is TokenKind.PUNCTUATOR:
                depth += _DEPTH.get(tok.text, 0)
            j += 1
        if j == colon_index + 1:
            raise ParseError("expected a type after ':'", colon.span, ["type"])
        self.found.append(_Annotation(target, colon, self.tokens[colon_index + 1], self.tokens[j - 1]))
        return j


def strip_annotations(source: str) -> Tuple[str, Dict[Span, str]]:
    """
    Remove annotation syntax from source.

    Returns the stripped source and a map from each annotated identifier's span
    in the stripped source to its raw annotation text. Return-type annotations are
    keyed to the function's name; those of anonymous functions are dropped.
    """
    view = to_byte_view(source)
    found = AnnotationScanner(tokenize(source)).scan()
    if not found:
        parse(tokenize(source))
        return source, {}

    pieces = []
    cursor = 0
    removed: List[Tuple[int, int]] = []
    for ann in found:
        start, end = ann.colon.span[0], ann.last.span[1]
        pieces.append(view[cursor:start])
        removed.append((start, end))
        cursor = end
    pieces.append(view[cursor:])
    stripped = from_byte_view("".join(pieces))

    def shifted(offset: int) -> int:
        return offset - sum(e - s for s, e in removed if e <= offset)

    annotations: Dict[Span, str] = {}
    for ann in found:
        raw = from_byte_view(view[ann.first.span[0]:ann.last.span[1]])
        if ann.target is None:
            logger.debug(f"dropping return annotation {raw!r} of an anonymous function")
            continue
        span = (shifted(ann.target.span[0]), shifted(ann.target.span[1]))
        annotations[span] = raw

    # annotations in unsupported positions are left in place and fail here
    parse(tokenize(stripped))
    return stripped, dict(sorted(annotations.items()))
