"""Tokenizer for the supported JavaScript/TypeScript subset.

Spans are byte offsets into the UTF-8 encoding of the source. The scanner runs
over a latin-1 view of those bytes so every character index is a byte index.
"""
from typing import List, Optional

from ..infrastructure.error_handling import LexError
from ..models import Token, TokenKind

KEYWORDS = frozenset(
    {
        "function", "var", "let", "const", "if", "else", "return", "typeof",
        # reserved words outside the subset, lexed so the parser can reject them
        "break", "case", "catch", "class", "continue", "debugger", "default",
        "delete", "do", "export", "extends", "finally", "for", "import", "in",
        "instanceof", "new", "super", "switch", "this", "throw", "try", "void",
        "while", "with", "yield", "async", "await",
    }
)

PUNCTUATORS = (
    ">>>=", "...", "===", "!==", ">>>", "<<=", ">>=", "**=",
    "=>", "==", "!=", "<=", ">=", "&&", "||", "??", "++", "--", "<<", ">>",
    "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "**",
    "{", "}", "(", ")", "[", "]", ";", ",", "<", ">", "+", "-", "*", "/",
    "%", "&", "|", "^", "!", "~", "?", ":", "=", ".",
)

# a '/' after one of these starts a division, anywhere else a regex literal
_DIVISION_PRECEDERS = frozenset({")", "]", "}"})


def _is_digit(ch: str) -> bool:
    return len(ch) == 1 and "0" <= ch <= "9"


def _is_ident_start(ch: str) -> bool:
    return ch.isascii() and (ch.isalpha() or ch in "$_")


def _is_ident_part(ch: str) -> bool:
    return ch.isascii() and (ch.isalnum() or ch in "$_")


def to_byte_view(source: str) -> str:
    """Latin-1 view of the UTF-8 bytes: one character per byte."""
    return source.encode("utf-8").decode("latin-1")


def from_byte_view(view: str) -> str:
    return view.encode("latin-1").decode("utf-8")


class Lexer:
    """Single-pass scanner producing tokens with byte spans."""

    def __init__(self, source: str):
        self.text = to_byte_view(source)
        self.pos = 0
        self.tokens: List[Token] = []

    def peek(self, offset: int = 0) -> str:
        i = self.pos + offset
        return self.text[i] if i < len(self.text) else ""

    def at_end(self) -> bool:
        return self.pos >= len(self.text)

    def push(self, kind: TokenKind, start: int):
        raw = self.text[start:self.pos]
        text = from_byte_view(raw) if not raw.isascii() else raw
        self.tokens.append(Token(kind, text, (start, self.pos)))

    def tokenize(self) -> List[Token]:
        while True:
            self.skip_trivia()
            if self.at_end():
                return self.tokens
            self.token()

    def skip_trivia(self):
        while not self.at_end():
            ch = self.peek()
            if ch in " \t\r\n\v\f":
                self.pos += 1
            elif ch == "/" and self.peek(1) == "/":
                while not self.at_end() and self.peek() != "\n":
                    self.pos += 1
            elif ch == "/" and self.peek(1) == "*":
                end = self.text.find("*/", self.pos + 2)
                if end < 0:
                    raise LexError("unterminated block comment", self.pos)
                self.pos = end + 2
            else:
                return

    def token(self):
        ch = self.peek()
        start = self.pos
        if _is_ident_start(ch):
            self.word(start)
        elif _is_digit(ch) or (ch == "." and _is_digit(self.peek(1))):
            self.number(start)
        elif ch in ("'", '"'):
            self.string(start)
        elif ch == "/" and self.regex_allowed():
            self.regex(start)
        else:
            self.punctuator(start)

    def word(self, start: int):
        while _is_ident_part(self.peek()):
            self.pos += 1
        text = self.text[start:self.pos]
        if text in ("true", "false"):
            self.push(TokenKind.BOOL, start)
        elif text == "null":
            self.push(TokenKind.NULL, start)
        elif text in KEYWORDS:
            self.push(TokenKind.KEYWORD, start)
        else:
            self.push(TokenKind.IDENTIFIER, start)

    def number(self, start: int):
        if self.peek() == "0" and self.peek(1) in ("x", "X"):
            self.pos += 2
            digits = self.pos
            while self.peek() and self.peek() in "0123456789abcdefABCDEF":
                self.pos += 1
            if self.pos == digits:
                raise LexError("malformed hex literal", start)
        else:
            while _is_digit(self.peek()):
                self.pos += 1
            if self.peek() == ".":
                self.pos += 1
                while _is_digit(self.peek()):
                    self.pos += 1
            if self.peek() in ("e", "E"):
                self.pos += 1
                if self.peek() in ("+", "-"):
                    self.pos += 1
                if not _is_digit(self.peek()):
                    raise LexError("malformed exponent", start)
                while _is_digit(self.peek()):
                    self.pos += 1
        if _is_ident_start(self.peek()):
            raise LexError(f"identifier directly after number: {self.peek()!r}", self.pos)
        self.push(TokenKind.NUMBER, start)

    def string(self, start: int):
        quote = self.peek()
        self.pos += 1
        while True:
            ch = self.peek()
            if ch == "" or ch == "\n":
                raise LexError("unterminated string literal", start)
            self.pos += 1
            if ch == "\\":
                if self.at_end():
                    raise LexError("unterminated string literal", start)
                self.pos += 1
            elif ch == quote:
                break
        self.push(TokenKind.STRING, start)

    def regex_allowed(self) -> bool:
        previous: Optional[Token] = self.tokens[-1] if self.tokens else None
        if previous is None:
            return True
        if previous.kind is TokenKind.PUNCTUATOR:
            return previous.text not in _DIVISION_PRECEDERS
        # return /x/ and typeof /x/ start a regex; every other keyword is rejected later
        return previous.kind is TokenKind.KEYWORD

    def regex(self, start: int):
        self.pos += 1
        in_class = False
        while True:
            ch = self.peek()
            if ch == "" or ch == "\n":
                raise LexError("unterminated regular expression", start)
            self.pos += 1
            if ch == "\\":
                if self.at_end():
                    raise LexError("unterminated regular expression", start)
                self.pos += 1
            elif ch == "[":
                in_class = True
            elif ch == "]":
                in_class = False
            elif ch == "/" and not in_class:
                break
        while _is_ident_part(self.peek()):
            self.pos += 1
        self.push(TokenKind.REGEX, start)

    def punctuator(self, start: int):
        for p in PUNCTUATORS:
            if self.text.startswith(p, self.pos):
                self.pos += len(p)
                self.push(TokenKind.PUNCTUATOR, start)
                return
        ch = self.peek()
        raise LexError(f"illegal character {ch!r}", start)


def tokenize(source: str) -> List[Token]:
    """Split source into tokens; whitespace and comments are skipped."""
    return Lexer(source).tokenize()
