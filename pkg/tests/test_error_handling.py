"""Unit tests for error classes, exit codes and per-file error handling."""
import pytest

from typeflow.infrastructure.error_handling import (
    EXIT_DATA,
    EXIT_INTERNAL,
    EXIT_USAGE,
    ErrorHandler,
    ExtractError,
    FormatError,
    LexError,
    ParseError,
    SchemaError,
    ShapeError,
    TypeflowError,
    UsageError,
    exit_code_for,
)


class TestExitCodes:
    """Test the mapping from exceptions to CLI exit codes."""

    def test_data_errors(self):
        """Test that malformed inputs map to the data exit code."""
        assert exit_code_for(LexError("illegal character", 3)) == EXIT_DATA
        assert exit_code_for(ParseError("bad", (0, 1))) == EXIT_DATA
        assert exit_code_for(SchemaError("expected an object", "$")) == EXIT_DATA
        assert exit_code_for(FormatError("bad magic")) == EXIT_DATA

    def test_usage_error(self):
        """Test that usage errors map to exit code 1."""
        assert exit_code_for(UsageError("input not found")) == EXIT_USAGE == 1

    def test_internal_errors(self):
        """Test internal and unexpected errors."""
        assert exit_code_for(ShapeError("matmul", (2, 3), (4, 5))) == EXIT_INTERNAL
        assert exit_code_for(ExtractError("no symbol")) == EXIT_INTERNAL
        assert exit_code_for(RuntimeError("boom")) == EXIT_INTERNAL == 3


class TestErrorMessages:
    """Test that errors carry their location."""

    def test_lex_error_position(self):
        """Test lex error offset."""
        error = LexError("illegal character '#'", 7)
        assert error.position == 7
        assert "offset 7" in str(error)

    def test_parse_error_expected(self):
        """Test parse error span and sorted, deduplicated expectations."""
        error = ParseError("expected ';'", (4, 9), [";", ")", ";"])
        assert error.span == (4, 9)
        assert error.expected == [")", ";"]
        assert "4..9" in str(error)

    def test_shape_error_names_both_shapes(self):
        """Test shape error message."""
        error = ShapeError("add", (2, 3), (4,))
        assert error.shapes == ((2, 3), (4,))
        assert "(2, 3)" in str(error) and "(4,)" in str(error)


class TestErrorHandler:
    """Test per-item error tallying."""

    def test_run_success(self):
        """Test that successful work passes its result through."""
        handler = ErrorHandler("prepare")
        assert handler.run("a.ts", lambda x: x * 2, 21) == 42
        assert handler.get_error_stats()["total_errors"] == 0

    def test_run_skips_typeflow_errors(self):
        """Test that typeflow errors are recorded and the item skipped."""
        handler = ErrorHandler("prepare")

        def failing():
            raise LexError("unterminated string literal", 0)

        assert handler.run("bad.ts", failing) is None
        stats = handler.get_error_stats()
        assert stats["stage"] == "prepare"
        assert stats["total_errors"] == 1
        assert stats["error_types"] == {"LexError": 1}
        assert "bad.ts" in handler.failed_items

    def test_run_propagates_other_errors(self):
        """Test that programming errors are not swallowed."""
        handler = ErrorHandler()

        def broken():
            raise KeyError("x")

        with pytest.raises(KeyError):
            handler.run("a.ts", broken)

    def test_record_error(self):
        """Test manual error recording."""
        handler = ErrorHandler()
        handler.record_error("ParseError")
        handler.record_error("ParseError", "b.ts", "expected ';'")
        assert handler.error_counts["ParseError"] == 2
        assert handler.failed_items == {"b.ts": "ParseError: expected ';'"}

    def test_base_class(self):
        """Test that every domain error is a TypeflowError."""
        for cls in (LexError, ParseError, SchemaError, FormatError, ShapeError, UsageError):
            assert issubclass(cls, TypeflowError)
