"""Tests for the lexer, parser, annotation stripping and AST JSON interchange."""
import json

import pytest

from typeflow.frontend.annotations import strip_annotations
from typeflow.frontend.ast_json import dump_ast_json, load_ast_json
from typeflow.frontend.lexer import tokenize
from typeflow.frontend.parser import parse_source
from typeflow.infrastructure.error_handling import LexError, ParseError, SchemaError
from typeflow.models import NodeKind, TokenKind


def kinds(source):
    return [tok.kind for tok in tokenize(source)]


@pytest.mark.unit
class TestLexer:
    """Test tokenization."""

    def test_simple_declaration(self):
        """Test kinds, texts and spans of a declaration."""
        tokens = tokenize("let x = 1;")

        assert [t.kind for t in tokens] == [
            TokenKind.KEYWORD, TokenKind.IDENTIFIER, TokenKind.PUNCTUATOR, TokenKind.NUMBER, TokenKind.PUNCTUATOR,
        ]
        assert [t.text for t in tokens] == ["let", "x", "=", "1", ";"]
        assert [t.span for t in tokens] == [(0, 3), (4, 5), (6, 7), (8, 9), (9, 10)]

    def test_literal_kinds(self):
        """Test every literal category."""
        assert kinds("'a' \"b\" 1.5e3 0xFF true false null") == [
            TokenKind.STRING, TokenKind.STRING, TokenKind.NUMBER, TokenKind.NUMBER,
            TokenKind.BOOL, TokenKind.BOOL, TokenKind.NULL,
        ]

    def test_token_features(self):
        """Test the feature strings used for token embeddings."""
        features = [t.feature for t in tokenize("return a + 'x';")]
        assert features == ["kw:return", "identifier", "punct:+", "string-lit", "punct:;"]

    def test_spans_are_byte_offsets(self):
        """Test that multi-byte characters advance spans by their UTF-8 length."""
        tokens = tokenize('let s = "é";')

        assert tokens[3].text == '"é"'
        assert tokens[3].span == (8, 12)
        assert tokens[4].span == (12, 13)

    def test_comments_skipped(self):
        """Test line and block comments."""
        tokens = tokenize("a // note\n/* block\n */ b")
        assert [t.text for t in tokens] == ["a", "b"]

    def test_longest_punctuator(self):
        """Test maximal munch on punctuators."""
        assert [t.text for t in tokenize("a === b !== c >>> d")] == ["a", "===", "b", "!==", "c", ">>>", "d"]

    def test_regex_versus_division(self):
        """Test that '/' starts a regex only where an expression may begin."""
        assert kinds("x = /ab+c/g;")[2] is TokenKind.REGEX
        assert kinds("return /a/;")[1] is TokenKind.REGEX
        assert kinds("(a) / b / c")[3] is TokenKind.PUNCTUATOR
        assert TokenKind.REGEX not in kinds("a / b / c")

    def test_regex_with_class(self):
        """Test that a slash inside a character class does not end the regex."""
        tokens = tokenize("x = /[/]+/;")
        assert tokens[2].text == "/[/]+/"

    def test_reserved_words_are_keywords(self):
        """Test that words outside the subset still lex as keywords."""
        assert kinds("while")[0] is TokenKind.KEYWORD
        assert kinds("typeof")[0] is TokenKind.KEYWORD

    @pytest.mark.parametrize(
        "source",
        ['"abc', "/abc", "/* open", "a # b", "1a", "0x", "1e+"],
    )
    def test_lex_errors(self, source):
        """Test malformed inputs."""
        with pytest.raises(LexError):
            tokenize(source)

    def test_illegal_character_position(self):
        """Test that the lex error points at the offending byte."""
        with pytest.raises(LexError) as info:
            tokenize("let a = #;")
        assert info.value.position == 8


@pytest.mark.unit
class TestParser:
    """Test parsing of the supported subset."""

    def test_empty_program(self):
        """Test the empty program."""
        ast = parse_source("")
        assert ast.root.kind is NodeKind.PROGRAM
        assert ast.root.span == (0, 0)
        assert ast.root.children == []

    def test_var_decl(self):
        """Test a declaration with initialiser."""
        ast = parse_source("const total = 1;")
        decl = ast.root.child("body[0]")

        assert decl.kind is NodeKind.VAR_DECL
        assert decl.value == "const"
        assert decl.child("name").name == "total"
        assert decl.child("init").value == "1"
        assert decl.span == (0, 16)

    def test_pre_order_ids(self):
        """Test that node ids follow pre-order."""
        ast = parse_source("let a = b + c;")

        assert [n.id for n in ast.nodes] == list(range(len(ast.nodes)))
        assert [n.kind for n in ast.nodes] == [
            NodeKind.PROGRAM, NodeKind.VAR_DECL, NodeKind.IDENTIFIER,
            NodeKind.BINARY_EXPR, NodeKind.IDENTIFIER, NodeKind.IDENTIFIER,
        ]
        assert [n.name for n in ast.identifiers()] == ["a", "b", "c"]

    def test_precedence(self):
        """Test that multiplication binds tighter than addition."""
        expr = parse_source("a + b * c;").root.child("body[0]").child("expression")

        assert expr.value == "+"
        assert expr.child("left").name == "a"
        assert expr.child("right").value == "*"

    def test_left_associative(self):
        """Test subtraction chains to the left."""
        expr = parse_source("a - b - c;").root.child("body[0]").child("expression")
        assert expr.child("left").value == "-"
        assert expr.child("right").name == "c"

    def test_exponent_right_associative(self):
        """Test ** chains to the right."""
        expr = parse_source("a ** b ** c;").root.child("body[0]").child("expression")
        assert expr.child("left").name == "a"
        assert expr.child("right").value == "**"

    def test_assignment_right_associative(self):
        """Test chained assignment."""
        expr = parse_source("a = b = 1;").root.child("body[0]").child("expression")

        assert expr.kind is NodeKind.ASSIGN_EXPR
        assert expr.child("left").name == "a"
        assert expr.child("right").kind is NodeKind.ASSIGN_EXPR

    def test_function_and_call(self):
        """Test function declarations, parameters, member calls and arguments."""
        ast = parse_source("function f(p, q) { return p.len(q); }")
        func = ast.root.child("body[0]")

        assert func.kind is NodeKind.FUNCTION_DECL
        assert [p.child("name").name for p in func.child_list("params")] == ["p", "q"]
        ret = func.child("body").child("body[0]")
        call = ret.child("argument")
        assert call.kind is NodeKind.CALL_EXPR
        assert call.child("callee").kind is NodeKind.MEMBER_EXPR
        assert len(call.child_list("arguments")) == 1

    def test_if_else_and_unary(self):
        """Test if/else with typeof and negation."""
        ast = parse_source("if (!a) { b; } else typeof c;")
        stmt = ast.root.child("body[0]")

        assert stmt.kind is NodeKind.IF_STMT
        assert stmt.child("condition").value == "!"
        assert stmt.child("consequent").kind is NodeKind.BLOCK_STMT
        assert stmt.child("alternate").child("expression").value == "typeof"

    def test_function_expression(self):
        """Test anonymous and named function expressions."""
        ast = parse_source("let f = function () { return 1; };\nlet g = function h(x) { return x; };")

        assert ast.root.child("body[0]").child("init").kind is NodeKind.FUNCTION_EXPR
        assert ast.root.child("body[0]").child("init").child("name") is None
        assert ast.root.child("body[1]").child("init").child("name").name == "h"

    def test_top_level_return(self):
        """Test that a return outside a function is accepted."""
        assert parse_source("return 1;").root.child("body[0]").kind is NodeKind.RETURN_STMT

    @pytest.mark.parametrize(
        "source",
        [
            "for (;;) {}",
            "while (a) {}",
            "let a = new B();",
            "a[0];",
            "let a, b;",
            "function (x) { return x; }",
            "function f() { return 1;",
            "1 = 2;",
            "a + ;",
            "let x = 1",
        ],
    )
    def test_rejected(self, source):
        """Test constructs outside the subset and malformed programs."""
        with pytest.raises(ParseError):
            parse_source(source)

    def test_error_reports_expectation(self):
        """Test that a missing semicolon is reported with its expected token."""
        with pytest.raises(ParseError) as info:
            parse_source("let x = 1 2;")
        assert ";" in info.value.expected
        assert info.value.span == (10, 11)


@pytest.mark.unit
class TestAnnotations:
    """Test annotation stripping."""

    def test_no_annotations(self):
        """Test that plain source passes through."""
        assert strip_annotations("let x = 1;") == ("let x = 1;", {})

    def test_variable_annotation(self):
        """Test a declared variable's annotation."""
        stripped, labels = strip_annotations('let s: string = "a";')

        assert stripped == 'let s = "a";'
        assert labels == {(4, 5): "string"}

    def test_function_annotations(self):
        """Test parameter and return annotations."""
        stripped, labels = strip_annotations("function len(s: string): number { return s.length; }")

        assert stripped == "function len(s) { return s.length; }"
        assert labels == {(9, 12): "number", (13, 14): "string"}
        assert list(labels) == sorted(labels)

    def test_generic_annotation(self):
        """Test nested generic brackets, including the '>>' token."""
        stripped, labels = strip_annotations("let m: Map<string, Array<number>> = null;")

        assert stripped == "let m = null;"
        assert labels == {(4, 5): "Map<string, Array<number>>"}

    def test_function_type_parameter(self):
        """Test a parameter annotated with a function type."""
        stripped, labels = strip_annotations("function f(g: (x: number) => string, n) { return g; }")

        assert stripped == "function f(g, n) { return g; }"
        assert labels == {(11, 12): "(x: number) => string"}

    def test_anonymous_return_dropped(self):
        """Test that an anonymous function's return annotation has no target."""
        stripped, labels = strip_annotations("let f = function (a: number): string { return a; };")

        assert stripped == "let f = function (a) { return a; };"
        assert labels == {(18, 19): "number"}

    def test_spans_follow_stripping(self):
        """Test that later spans are shifted by removed annotation text."""
        stripped, labels = strip_annotations("let a: number = 1;\nlet b: string = a;")

        assert stripped == "let a = 1;\nlet b = a;"
        assert labels == {(4, 5): "number", (15, 16): "string"}
        assert [stripped[s:e] for s, e in labels] == ["a", "b"]

    @pytest.mark.parametrize(
        "source",
        ["let x: = 1;", "let x: number", "let o = f(a: number);"],
    )
    def test_annotation_errors(self, source):
        """Test empty, unterminated and misplaced annotations."""
        with pytest.raises(ParseError):
            strip_annotations(source)


@pytest.mark.unit
class TestAstJson:
    """Test the AST interchange format."""

    def test_round_trip(self, running_example):
        """Test that a loaded tree equals the original."""
        ast = parse_source(running_example)
        loaded = load_ast_json(dump_ast_json(ast))

        assert loaded == ast
        assert [n.id for n in loaded.nodes] == [n.id for n in ast.nodes]

    def test_schema_fields(self):
        """Test the serialised shape of a small tree."""
        doc = json.loads(dump_ast_json(parse_source("x;")))

        assert doc["kind"] == "Program"
        stmt = doc["children"][0]
        assert stmt["tag"] == "body[0]"
        assert stmt["node"]["children"][0]["node"] == {"kind": "Identifier", "name": "x", "span": [0, 1], "children": []}

    def test_minimal_document(self):
        """Test that spans and children are optional."""
        ast = load_ast_json('{"kind": "Program", "children": [{"tag": "body[0]", "node": '
                            '{"kind": "ExprStmt", "children": [{"tag": "expression", "node": '
                            '{"kind": "Literal", "value": "1"}}]}}]}')
        assert ast.nodes[-1].kind is NodeKind.LITERAL
        assert ast.nodes[-1].span == (0, 0)

    @pytest.mark.parametrize(
        "document",
        [
            "{",
            "[]",
            '{"kind": "WhileStmt"}',
            '{"span": [0, 1]}',
            '{"kind": "Identifier", "span": [0, 1]}',
            '{"kind": "Literal", "span": [0, 1]}',
            '{"kind": "Identifier", "name": "a", "span": [3, 1]}',
            '{"kind": "Identifier", "name": "a", "span": [-1, 1]}',
            '{"kind": "Identifier", "name": 5}',
            '{"kind": "Identifier", "name": "a", "children": [{"tag": "x", "node": {"kind": "Literal", "value": "1"}}]}',
            '{"kind": "BinaryExpr", "value": "+", "children": ['
            '{"tag": "left", "node": {"kind": "Identifier", "name": "a"}}, '
            '{"tag": "left", "node": {"kind": "Identifier", "name": "b"}}]}',
            '{"kind": "Program", "children": [{"tag": "body[0]", "node": {"kind": "FunctionDecl"}}]}',
            '{"kind": "FunctionDecl", "children": [{"tag": "name", "node": {"kind": "Identifier", "name": "f"}}]}',
            '{"kind": "FunctionDecl", "children": [{"tag": "name", "node": {"kind": "Literal", "value": "1"}}, '
            '{"tag": "body", "node": {"kind": "BlockStmt"}}]}',
            '{"kind": "VarDecl", "value": "let"}',
            '{"kind": "VarDecl", "value": "auto", "children": [{"tag": "name", "node": {"kind": "Identifier", "name": "a"}}]}',
            '{"kind": "MemberExpr", "children": [{"tag": "object", "node": {"kind": "Identifier", "name": "a"}}]}',
            '{"kind": "BinaryExpr", "children": [{"tag": "left", "node": {"kind": "Identifier", "name": "a"}}, '
            '{"tag": "right", "node": {"kind": "Identifier", "name": "b"}}]}',
            '{"kind": "CallExpr"}',
        ],
    )
    def test_schema_errors(self, document):
        """Test malformed documents."""
        with pytest.raises(SchemaError):
            load_ast_json(document)

    def test_error_path(self):
        """Test that the schema error names the offending location."""
        with pytest.raises(SchemaError) as info:
            load_ast_json('{"kind": "Program", "children": [{"tag": "body[0]", "node": {"kind": "Nope"}}]}')
        assert info.value.path == "$.children[0].node.kind"

    def test_missing_child_path(self):
        """Test that a declaration without its name child is rejected at the declaration."""
        with pytest.raises(SchemaError) as info:
            load_ast_json('{"kind": "Program", "children": [{"tag": "body[0]", "node": '
                          '{"kind": "FunctionDecl", "span": [0, 0]}}]}')
        assert info.value.path == "$.children[0].node.children"
