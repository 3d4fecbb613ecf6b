"""Source frontend: tokens, syntax trees and annotation stripping."""

from .annotations import strip_annotations
from .ast_json import dump_ast_json, load_ast_json
from .lexer import tokenize
from .parser import parse, parse_source

__all__ = [
    "dump_ast_json",
    "load_ast_json",
    "parse",
    "parse_source",
    "strip_annotations",
    "tokenize",
]
