"""Function-declaration pre-pass used for call linking."""
from ..models import Ast, FuncDecl, FuncDeclTable, NodeKind


def collect_function_decls(ast: Ast) -> FuncDeclTable:
    """Collect every named function declaration; a later declaration of a name replaces an earlier one."""
    table: FuncDeclTable = {}
    for node in ast.nodes:
        if node.kind is not NodeKind.FUNCTION_DECL:
            continue
        name = node.child("name")
        params = [p.id for p in node.child_list("params")]
        table[name.name] = FuncDecl(name=name.name, decl_ast_id=node.id, param_ast_ids=params)
    return table
