"""Lexical scope resolution for variable symbols.

let/const bind in the innermost block, var and function declarations in the
nearest function scope, parameters in their function's scope. A named function
expression binds its own name inside itself. Names with no declaration share a
single file-level symbol per name.
"""
from dataclasses import dataclass, field
from itertools import count
from typing import Dict, Optional, Set

from ..models import Ast, AstNode, NodeKind


@dataclass(frozen=True)
class Symbol:
    """A variable symbol; free symbols have no declaring identifier."""
    uid: int
    name: str
    decl_ast_id: Optional[int] = None

    @property
    def is_free(self) -> bool:
        return self.decl_ast_id is None


@dataclass
class Scope:
    is_function: bool
    parent: Optional["Scope"] = None
    bindings: Dict[str, Symbol] = field(default_factory=dict)

    def function_scope(self) -> "Scope":
        scope = self
        while not scope.is_function:
            scope = scope.parent
        return scope

    def lookup(self, name: str) -> Optional[Symbol]:
        scope = self
        while scope is not None:
            if name in scope.bindings:
                return scope.bindings[name]
            scope = scope.parent
        return None


@dataclass
class ScopeResolution:
    """Symbol of every variable-position identifier, plus property-position identifiers."""
    symbols: Dict[int, Symbol]
    properties: Set[int]


class ScopeResolver:
    def __init__(self, ast: Ast):
        self.ast = ast
        self._ids = count()
        self.symbols: Dict[int, Symbol] = {}
        self.properties: Set[int] = set()
        self.reference_scope: Dict[int, Scope] = {}
        self.free: Dict[str, Symbol] = {}

    def bind(self, scope: Scope, ident: AstNode) -> Symbol:
        symbol = scope.bindings.get(ident.name)
        if symbol is None:
            symbol = Symbol(next(self._ids), ident.name, ident.id)
            scope.bindings[ident.name] = symbol
        self.symbols[ident.id] = symbol
        return symbol

    def resolve(self) -> ScopeResolution:
        root = Scope(is_function=True)
        for _, child in self.ast.root.children:
            self.declare(child, root)
        for ident_id, scope in self.reference_scope.items():
            if ident_id in self.symbols:
                continue
            name = self.ast.node(ident_id).name
            symbol = scope.lookup(name)
            if symbol is None:
                symbol = self.free.get(name)
                if symbol is None:
                    symbol = Symbol(next(self._ids), name)
                    self.free[name] = symbol
            self.symbols[ident_id] = symbol
        return ScopeResolution(self.symbols, self.properties)

    def declare_function(self, node: AstNode, scope: Scope):
        inner = Scope(is_function=True, parent=scope)
        name = node.child("name")
        if name is not None:
            # declarations bind outside, named expressions bind inside
            target = scope.function_scope() if node.kind is NodeKind.FUNCTION_DECL else inner
            self.bind(target, name)
        for param in node.child_list("params"):
            self.bind(inner, param.child("name"))
        body = node.child("body")
        for _, stmt in body.children:
            self.declare(stmt, inner)

    def declare(self, node: AstNode, scope: Scope):
        kind = node.kind
        if kind in (NodeKind.FUNCTION_DECL, NodeKind.FUNCTION_EXPR):
            self.declare_function(node, scope)
        elif kind is NodeKind.VAR_DECL:
            target = scope.function_scope() if node.value == "var" else scope
            self.bind(target, node.child("name"))
            init = node.child("init")
            if init is not None:
                self.declare(init, scope)
        elif kind is NodeKind.BLOCK_STMT:
            inner = Scope(is_function=False, parent=scope)
            for _, stmt in node.children:
                self.declare(stmt, inner)
        elif kind is NodeKind.MEMBER_EXPR:
            self.declare(node.child("object"), scope)
            self.properties.add(node.child("property").id)
        elif kind is NodeKind.IDENTIFIER:
            self.reference_scope[node.id] = scope
        else:
            for _, child in node.children:
                self.declare(child, scope)


def resolve_scopes(ast: Ast) -> ScopeResolution:
    """Map every identifier occurrence to its variable symbol or mark it a property."""
    return ScopeResolver(ast).resolve()
