"""Recursive-descent parser for the supported JavaScript/TypeScript subset."""
from typing import List, Optional, Sequence, Tuple

from ..infrastructure.error_handling import ParseError
from .lexer import tokenize
from ..models import (
    LITERAL_TOKEN_KINDS,
    Ast,
    AstNode,
    NodeKind,
    Span,
    Token,
    TokenKind,
)

# binary operator precedence, higher binds tighter
BINARY_PRECEDENCE = {
    "??": 1,
    "||": 2,
    "&&": 3,
    "|": 4,
    "^": 5,
    "&": 6,
    "==": 7, "!=": 7, "===": 7, "!==": 7,
    "<": 8, ">": 8, "<=": 8, ">=": 8,
    "<<": 9, ">>": 9, ">>>": 9,
    "+": 10, "-": 10,
    "*": 11, "/": 11, "%": 11,
    "**": 12,
}

ASSIGNMENT_OPERATORS = frozenset({"=", "+=", "-=", "*=", "/=", "%="})
UNARY_OPERATORS = frozenset({"!", "-", "+", "~"})
DECLARATION_KEYWORDS = frozenset({"var", "let", "const"})


def _join(first: Span, last: Span) -> Span:
    return (first[0], last[1])


class Parser:
    """Builds an Ast from a token sequence; rejects anything outside the subset."""

    def __init__(self, tokens: Sequence[Token]):
        self.tokens = list(tokens)
        self.pos = 0

    # token helpers

    def peek(self, offset: int = 0) -> Optional[Token]:
        i = self.pos + offset
        return self.tokens[i] if i < len(self.tokens) else None

    def at_end(self) -> bool:
        return self.pos >= len(self.tokens)

    def check_punct(self, text: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.kind is TokenKind.PUNCTUATOR and tok.text == text

    def check_keyword(self, text: str) -> bool:
        tok = self.peek()
        return tok is not None and tok.kind is TokenKind.KEYWORD and tok.text == text

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def here(self) -> Span:
        tok = self.peek()
        if tok is not None:
            return tok.span
        end = self.tokens[-1].span[1] if self.tokens else 0
        return (end, end)

    def fail(self, message: str, expected: Sequence[str] = ()) -> ParseError:
        tok = self.peek()
        found = f"'{tok.text}'" if tok is not None else "end of input"
        return ParseError(f"{message}, found {found}", self.here(), expected)

    def expect_punct(self, text: str) -> Token:
        if not self.check_punct(text):
            raise self.fail(f"expected '{text}'", [text])
        return self.advance()

    def expect_identifier(self) -> AstNode:
        tok = self.peek()
        if tok is None or tok.kind is not TokenKind.IDENTIFIER:
            raise self.fail("expected identifier", ["identifier"])
        self.advance()
        return AstNode(NodeKind.IDENTIFIER, tok.span, name=tok.text)

    # statements

    def parse_program(self) -> Ast:
        body = []
        while not self.at_end():
            body.append(self.statement())
        span = _join(self.tokens[0].span, self.tokens[-1].span) if self.tokens else (0, 0)
        children = [(f"body[{i}]", stmt) for i, stmt in enumerate(body)]
        return Ast(AstNode(NodeKind.PROGRAM, span, children=children))

    def statement(self) -> AstNode:
        tok = self.peek()
        if tok is None:
            raise self.fail("expected statement")
        if tok.kind is TokenKind.KEYWORD:
            if tok.text == "function":
                return self.function(NodeKind.FUNCTION_DECL)
            if tok.text in DECLARATION_KEYWORDS:
                return self.var_decl()
            if tok.text == "if":
                return self.if_stmt()
            if tok.text == "return":
                return self.return_stmt()
            if tok.text != "typeof":
                raise ParseError(f"'{tok.text}' is outside the supported subset", tok.span)
        if self.check_punct("{"):
            return self.block()
        expr = self.expression()
        end = self.expect_punct(";")
        return AstNode(NodeKind.EXPR_STMT, _join(expr.span, end.span), children=[("expression", expr)])

    def function(self, kind: NodeKind) -> AstNode:
        start = self.advance()
        children: List[Tuple[str, AstNode]] = []
        tok = self.peek()
        if tok is not None and tok.kind is TokenKind.IDENTIFIER:
            children.append(("name", self.expect_identifier()))
        elif kind is NodeKind.FUNCTION_DECL:
            raise self.fail("function declaration requires a name", ["identifier"])
        self.expect_punct("(")
        index = 0
        while not self.check_punct(")"):
            if index:
                self.expect_punct(",")
            name = self.expect_identifier()
            param = AstNode(NodeKind.PARAM, name.span, children=[("name", name)])
            children.append((f"params[{index}]", param))
            index += 1
        self.expect_punct(")")
        if not self.check_punct("{"):
            raise self.fail("expected function body", ["{"])
        body = self.block()
        children.append(("body", body))
        return AstNode(kind, _join(start.span, body.span), children=children)

    def var_decl(self) -> AstNode:
        keyword = self.advance()
        name = self.expect_identifier()
        children = [("name", name)]
        if self.check_punct("="):
            self.advance()
            children.append(("init", self.expression()))
        elif self.check_punct(","):
            raise self.fail("multiple declarators are outside the supported subset", [";", "="])
        end = self.expect_punct(";")
        return AstNode(NodeKind.VAR_DECL, _join(keyword.span, end.span), value=keyword.text, children=children)

    def if_stmt(self) -> AstNode:
        start = self.advance()
        self.expect_punct("(")
        condition = self.expression()
        self.expect_punct(")")
        consequent = self.statement()
        children = [("condition", condition), ("consequent", consequent)]
        last = consequent
        if self.check_keyword("else"):
            self.advance()
            last = self.statement()
            children.append(("alternate", last))
        return AstNode(NodeKind.IF_STMT, _join(start.span, last.span), children=children)

    def return_stmt(self) -> AstNode:
        start = self.advance()
        children = []
        if not self.check_punct(";"):
            children.append(("argument", self.expression()))
        end = self.expect_punct(";")
        return AstNode(NodeKind.RETURN_STMT, _join(start.span, end.span), children=children)

    def block(self) -> AstNode:
        start = self.expect_punct("{")
        body = []
        while not self.check_punct("}"):
            if self.at_end():
                raise self.fail("unterminated block", ["}"])
            body.append(self.statement())
        end = self.advance()
        children = [(f"body[{i}]", stmt) for i, stmt in enumerate(body)]
        return AstNode(NodeKind.BLOCK_STMT, _join(start.span, end.span), children=children)

    # expressions

    def expression(self) -> AstNode:
        left = self.binary(1)
        tok = self.peek()
        if tok is not None and tok.kind is TokenKind.PUNCTUATOR and tok.text in ASSIGNMENT_OPERATORS:
            if left.kind not in (NodeKind.IDENTIFIER, NodeKind.MEMBER_EXPR):
                raise ParseError("invalid assignment target", left.span)
            self.advance()
            right = self.expression()
            return AstNode(
                NodeKind.ASSIGN_EXPR,
                _join(left.span, right.span),
                value=tok.text,
                children=[("left", left), ("right", right)],
            )
        return left

    def binary(self, min_precedence: int) -> AstNode:
        left = self.unary()
        while True:
            tok = self.peek()
            if tok is None or tok.kind is not TokenKind.PUNCTUATOR:
                return left
            precedence = BINARY_PRECEDENCE.get(tok.text)
            if precedence is None or precedence < min_precedence:
                return left
            self.advance()
            # ** is right-associative
            right = self.binary(precedence if tok.text == "**" else precedence + 1)
            left = AstNode(
                NodeKind.BINARY_EXPR,
                _join(left.span, right.span),
                value=tok.text,
                children=[("left", left), ("right", right)],
            )

    def unary(self) -> AstNode:
        tok = self.peek()
        if tok is not None and (
            (tok.kind is TokenKind.PUNCTUATOR and tok.text in UNARY_OPERATORS)
            or (tok.kind is TokenKind.KEYWORD and tok.text == "typeof")
        ):
            self.advance()
            argument = self.unary()
            return AstNode(
                NodeKind.UNARY_EXPR,
                _join(tok.span, argument.span),
                value=tok.text,
                children=[("argument", argument)],
            )
        return self.call_member()

    def call_member(self) -> AstNode:
        expr = self.primary()
        while True:
            if self.check_punct("."):
                self.advance()
                prop = self.expect_identifier()
                expr = AstNode(
                    NodeKind.MEMBER_EXPR,
                    _join(expr.span, prop.span),
                    children=[("object", expr), ("property", prop)],
                )
            elif self.check_punct("("):
                self.advance()
                children = [("callee", expr)]
                index = 0
                while not self.check_punct(")"):
                    if index:
                        self.expect_punct(",")
                    children.append((f"arguments[{index}]", self.expression()))
                    index += 1
                end = self.advance()
                expr = AstNode(NodeKind.CALL_EXPR, _join(expr.span, end.span), children=children)
            elif self.check_punct("["):
                raise self.fail("computed member access is outside the supported subset", [".", "("])
            else:
                return expr

    def primary(self) -> AstNode:
        tok = self.peek()
        expected = ["identifier", "literal", "(", "function"]
        if tok is None:
            raise self.fail("expected expression", expected)
        if tok.kind is TokenKind.IDENTIFIER:
            self.advance()
            return AstNode(NodeKind.IDENTIFIER, tok.span, name=tok.text)
        if tok.kind in LITERAL_TOKEN_KINDS:
            self.advance()
            return AstNode(NodeKind.LITERAL, tok.span, value=tok.text)
        if self.check_punct("("):
            self.advance()
            inner = self.expression()
            self.expect_punct(")")
            return inner
        if self.check_keyword("function"):
            return self.function(NodeKind.FUNCTION_EXPR)
        raise self.fail("expected expression", expected)


def parse(tokens: Sequence[Token]) -> Ast:
    """Parse a token sequence into an Ast."""
    return Parser(tokens).parse_program()


def parse_source(source: str) -> Ast:
    """Tokenize and parse source text."""
    return parse(tokenize(source))
