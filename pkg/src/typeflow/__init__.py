"""
typeflow - GNN-based probabilistic type inference for a JavaScript/TypeScript subset.
"""

from .config import config
from .models import Ast, AstNode, Example, Tfg, TfgEdge, TfgNode, TfgNodeKind, Token, TokenKind

__version__ = "1.0.0"
__all__ = [
    "config",
    "Ast",
    "AstNode",
    "Example",
    "Tfg",
    "TfgEdge",
    "TfgNode",
    "TfgNodeKind",
    "Token",
    "TokenKind",
]
