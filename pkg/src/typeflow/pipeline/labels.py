"""Canonicalisation of raw type annotations into label strings.

Steps, in order:
1. function types map to their return type
2. type arguments are dropped (Array<number> -> Array, number[] -> Array)
3. literal types map to their base type ("a" | "b" -> string)
4. single-character names (type parameters) are rejected

Unions and intersections keep their canonical members, deduplicated in order
of first appearance. Unparsable annotations are rejected.
"""
from typing import List, Optional

from loguru import logger

from ..frontend.lexer import tokenize
from ..infrastructure.error_handling import LexError
from ..models import Token, TokenKind

ANY_TYPE = "any"

_LITERAL_BASE = {
    TokenKind.STRING: "string",
    TokenKind.NUMBER: "number",
    TokenKind.BOOL: "boolean",
    TokenKind.NULL: "null",
}


class _Rejected(Exception):
    pass


class _TypeParser:
    """Recursive descent over the annotation grammar, producing canonical names."""

    def __init__(self, tokens: List[Token]):
        self.tokens = tokens
        self.pos = 0
        # '>' characters still owed by a split '>>' or '>>>' token
        self.pending_close = 0
        # nesting of type argument lists being skipped
        self.argument_depth = 0

    def peek(self, offset: int = 0) -> Optional[Token]:
        index = self.pos + offset
        return self.tokens[index] if index < len(self.tokens) else None

    def at(self, text: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.kind is TokenKind.PUNCTUATOR and tok.text == text

    def eat(self, text: str):
        if not self.at(text):
            raise _Rejected(text)
        self.pos += 1

    def parse(self) -> str:
        result = self.union()
        if self.peek() is not None or self.pending_close:
            raise _Rejected("trailing tokens")
        return result

    def union(self) -> str:
        if self.at("|"):
            self.pos += 1
        members = [self.intersection()]
        while self.at("|"):
            self.pos += 1
            members.append(self.intersection())
        return _join(members, "|")

    def intersection(self) -> str:
        members = [self.postfix()]
        while self.at("&"):
            self.pos += 1
            members.append(self.postfix())
        return _join(members, "&")

    def postfix(self) -> str:
        result = self.primary()
        while self.at("[") and self.peek(1) is not None and self.peek(1).text == "]":
            self.pos += 2
            result = "Array"
        return result

    def primary(self) -> str:
        tok = self.peek()
        if tok is None:
            raise _Rejected("end of annotation")
        if tok.kind is TokenKind.PUNCTUATOR and tok.text == "(":
            return self.function_type() if self.is_function_type() else self.parenthesized()
        if tok.kind in _LITERAL_BASE:
            self.pos += 1
            return _LITERAL_BASE[tok.kind]
        if tok.kind is TokenKind.PUNCTUATOR and tok.text == "-":
            nxt = self.peek(1)
            if nxt is not None and nxt.kind is TokenKind.NUMBER:
                self.pos += 2
                return "number"
        if tok.kind is TokenKind.KEYWORD and tok.text == "void":
            self.pos += 1
            return "void"
        if tok.kind is TokenKind.IDENTIFIER:
            return self.named()
        raise _Rejected(tok.text)

    def named(self) -> str:
        parts = [self.peek().text]
        self.pos += 1
        while self.at(".") and self.peek(1) is not None and self.peek(1).kind is TokenKind.IDENTIFIER:
            parts.append(self.peek(1).text)
            self.pos += 2
        name = ".".join(parts)
        if self.at("<"):
            self.pos += 1
            self.argument_depth += 1
            self.union()
            while self.at(","):
                self.pos += 1
                self.union()
            self.argument_depth -= 1
            self.close_angle()
        if len(name) == 1 and not self.argument_depth:
            raise _Rejected("single-character type name")
        return name

    def close_angle(self):
        if self.pending_close:
            self.pending_close -= 1
            if self.pending_close == 0:
                self.pos += 1
            return
        tok = self.peek()
        if tok is None or tok.kind is not TokenKind.PUNCTUATOR or tok.text not in (">", ">>", ">>>"):
            raise _Rejected("expected '>'")
        if tok.text == ">":
            self.pos += 1
        else:
            self.pending_close = len(tok.text) - 1

    def is_function_type(self) -> bool:
        depth = 0
        for offset in range(len(self.tokens) - self.pos):
            tok = self.peek(offset)
            if tok.kind is TokenKind.PUNCTUATOR and tok.text == "(":
                depth += 1
            elif tok.kind is TokenKind.PUNCTUATOR and tok.text == ")":
                depth -= 1
                if depth == 0:
                    after = self.peek(offset + 1)
                    return after is not None and after.kind is TokenKind.PUNCTUATOR and after.text == "=>"
        return False

    def function_type(self) -> str:
        depth = 0
        while True:
            tok = self.peek()
            self.pos += 1
            if tok.text == "(":
                depth += 1
            elif tok.text == ")":
                depth -= 1
                if depth == 0:
                    break
        self.eat("=>")
        return self.union()

    def parenthesized(self) -> str:
        self.eat("(")
        inner = self.union()
        self.eat(")")
        return inner


def _join(members: List[str], separator: str) -> str:
    unique = list(dict.fromkeys(members))
    return unique[0] if len(unique) == 1 else separator.join(unique)


def preprocess_type_label(raw: str) -> Optional[str]:
    """Canonical type string for a raw annotation, or None when rejected."""
    try:
        tokens = tokenize(raw)
        if not tokens:
            return None
        return _TypeParser(tokens).parse()
    except (_Rejected, LexError) as e:
        logger.debug(f"rejected type annotation {raw!r}: {e}")
        return None


def is_vocabulary_type(canonical: Optional[str]) -> bool:
    """Whether a canonical label may enter the type vocabulary."""
    return canonical is not None and canonical != ANY_TYPE
