"""Type flow graph construction by bottom-up AST traversal.

Node order: AST post-order (each CtxNode right after the expression it
contextualises), then VarSymNodes and ObjPropNodes in first-occurrence order.
Every forward edge is immediately followed by its backward dual.
"""
from collections import OrderedDict
from typing import Dict, List, Mapping, Optional, Tuple

from loguru import logger

from ..infrastructure.error_handling import ExtractError
from ..models import (
    OPERATOR_KINDS,
    STATEMENT_KINDS,
    Ast,
    AstNode,
    FuncDeclTable,
    NodeKind,
    PREDICTABLE_KINDS,
    Span,
    Tfg,
    TfgEdge,
    TfgEdgeKind,
    TfgNode,
    TfgNodeKind,
    base_tag,
    edge_feature,
    literal_kind,
)
from .prepass import collect_function_decls
from .scopes import Symbol, resolve_scopes

_FUNCTION_KINDS = (NodeKind.FUNCTION_DECL, NodeKind.FUNCTION_EXPR)


class TfgBuilder:
    """Builds the TFG of one file."""

    def __init__(self, ast: Ast, decls: FuncDeclTable, file_id: str = ""):
        self.ast = ast
        self.decls = decls
        self.graph = Tfg(file_id=file_id)
        self.scopes = resolve_scopes(ast)

        # AST id -> TFG id of the node standing for that AST node
        self.represented: Dict[int, int] = {}
        self.var_occurrences: "OrderedDict[Symbol, List[int]]" = OrderedDict()
        self.prop_occurrences: "OrderedDict[str, List[int]]" = OrderedDict()
        # (function AST id, returned ExprNode id)
        self.returns: List[Tuple[int, int]] = []
        self.calls: List[AstNode] = []
        self.function_stack: List[int] = []

    # emission

    def add_node(self, kind: TfgNodeKind, feature: str, ast_ref: Optional[int] = None) -> int:
        node_id = len(self.graph.nodes)
        self.graph.nodes.append(TfgNode(node_id, kind, feature, kind in PREDICTABLE_KINDS, ast_ref))
        return node_id

    def add_edge_pair(self, src: int, dst: int, parts: Tuple[str, ...]):
        self.graph.edges.append(TfgEdge(src, dst, edge_feature(parts, "f")))
        self.graph.edges.append(TfgEdge(dst, src, edge_feature(parts, "b")))

    # traversal

    def build(self) -> Tfg:
        self.visit(self.ast.root)
        self.add_hubs()
        self.add_return_edges()
        self.add_call_edges()
        logger.debug(
            f"built TFG {self.graph.file_id or '<anonymous>'}: "
            f"{len(self.graph.nodes)} nodes, {len(self.graph.edges)} edges"
        )
        return self.graph

    def visit(self, node: AstNode) -> Optional[int]:
        """Visit node bottom-up; returns the id of its representative TFG node, None for statements."""
        kind = node.kind
        if kind is NodeKind.IDENTIFIER:
            return self.visit_identifier(node)
        if kind is NodeKind.LITERAL:
            tok = self.add_node(TfgNodeKind.TOK, literal_kind(node.value).value, node.id)
            self.represented[node.id] = tok
            return tok
        if kind in STATEMENT_KINDS:
            self.visit_statement(node)
            return None
        return self.visit_expression(node)

    def visit_identifier(self, node: AstNode) -> int:
        ident = self.add_node(TfgNodeKind.IDENT, node.name, node.id)
        self.represented[node.id] = ident
        if node.id in self.scopes.properties:
            self.prop_occurrences.setdefault(node.name, []).append(ident)
        else:
            symbol = self.scopes.symbols.get(node.id)
            if symbol is None:
                raise ExtractError(f"identifier {node.name!r} at {node.span} has no symbol")
            self.var_occurrences.setdefault(symbol, []).append(ident)
        return ident

    def visit_statement(self, node: AstNode):
        for tag, child in node.children:
            rep = self.visit(child)
            if rep is None:
                continue
            expr = rep
            if child.kind in (NodeKind.IDENTIFIER, NodeKind.LITERAL):
                # bare leaf under a statement gets its own ExprNode
                expr = self.add_node(TfgNodeKind.EXPR, child.kind.value, child.id)
                self.add_edge_pair(rep, expr, (child.kind.value, base_tag(tag)))
            ctx = self.add_node(TfgNodeKind.CTX, f"({node.kind.value},{base_tag(tag)})")
            self.add_edge_pair(ctx, expr, (TfgEdgeKind.CTX.value,))
            if node.kind is NodeKind.RETURN_STMT and self.function_stack:
                self.returns.append((self.function_stack[-1], expr))

    def visit_expression(self, node: AstNode) -> int:
        is_function = node.kind in _FUNCTION_KINDS
        if is_function:
            self.function_stack.append(node.id)
        child_reps = []
        for tag, child in node.children:
            rep = self.visit(child)
            if rep is not None:
                child_reps.append((rep, base_tag(tag)))
        if is_function:
            self.function_stack.pop()

        operator = None
        if node.kind in OPERATOR_KINDS:
            operator = self.add_node(TfgNodeKind.TOK, f"op:{node.value}")
        expr = self.add_node(TfgNodeKind.EXPR, node.kind.value, node.id)
        self.represented[node.id] = expr
        for rep, tag in child_reps:
            self.add_edge_pair(rep, expr, (node.kind.value, tag))
        if operator is not None:
            self.add_edge_pair(operator, expr, (node.kind.value, "operator"))
        if node.kind is NodeKind.CALL_EXPR:
            self.calls.append(node)
        return expr

    # hubs and inter-procedural links

    def add_hubs(self):
        var_hubs = [(self.add_node(TfgNodeKind.VAR_SYM, TfgNodeKind.VAR_SYM.value), occ)
                    for occ in self.var_occurrences.values()]
        prop_hubs = [(self.add_node(TfgNodeKind.OBJ_PROP, TfgNodeKind.OBJ_PROP.value), occ)
                     for occ in self.prop_occurrences.values()]
        for hub, occurrences in var_hubs:
            for ident in occurrences:
                self.add_edge_pair(ident, hub, (TfgEdgeKind.VAR_SYM.value,))
        for hub, occurrences in prop_hubs:
            for ident in occurrences:
                self.add_edge_pair(ident, hub, (TfgEdgeKind.OBJ_PROP.value,))

    def add_return_edges(self):
        for function_ast_id, returned in self.returns:
            self.add_edge_pair(returned, self.represented[function_ast_id], (TfgEdgeKind.RET.value,))

    def add_call_edges(self):
        returns_by_function: Dict[int, List[int]] = {}
        for function_ast_id, returned in self.returns:
            returns_by_function.setdefault(function_ast_id, []).append(returned)

        for call in self.calls:
            callee = call.child("callee")
            if callee.kind is not NodeKind.IDENTIFIER or callee.name not in self.decls:
                continue
            decl = self.decls[callee.name]
            call_expr = self.represented[call.id]
            for returned in returns_by_function.get(decl.decl_ast_id, []):
                self.add_edge_pair(returned, call_expr, (TfgEdgeKind.CALL.value,))
            arguments = call.child_list("arguments")
            for argument, param_ast_id in zip(arguments, decl.param_ast_ids):
                self.add_edge_pair(
                    self.represented[argument.id],
                    self.represented[param_ast_id],
                    (TfgEdgeKind.CALL.value,),
                )


def build_tfg(ast: Ast, decls: Optional[FuncDeclTable] = None, file_id: str = "") -> Tfg:
    """Build the type flow graph of a file."""
    if decls is None:
        decls = collect_function_decls(ast)
    return TfgBuilder(ast, decls, file_id).build()


def attach_labels(graph: Tfg, ast: Ast, labels: Mapping[Span, str]) -> Tfg:
    """Attach canonical type labels, keyed by identifier span, to the matching IdentNodes."""
    ident_by_ast = {n.ast_ref: n.id for n in graph.nodes if n.kind is TfgNodeKind.IDENT}
    by_span = {node.span: node.id for node in ast.identifiers()}
    for span, type_name in labels.items():
        ast_id = by_span.get(tuple(span))
        if ast_id is None or ast_id not in ident_by_ast:
            logger.warning(f"{graph.file_id}: no identifier at {span} for label {type_name!r}")
            continue
        graph.labels[ident_by_ast[ast_id]] = type_name
    return graph
