"""JSON interchange for syntax trees.

Schema::

    {"kind": str, "name"?: str, "value"?: str, "span"?: [start, end],
     "children"?: [{"tag": str, "node": {...}}]}

``name`` is carried by Identifier nodes, ``value`` by Literal nodes (the raw
literal text), operator expressions (the operator) and VarDecl (the
declaration keyword). Node ids are not serialised; they are re-derived in
pre-order on load.
"""
import json
from typing import Any, Dict, FrozenSet, Optional, Union

from ..infrastructure.error_handling import SchemaError
from ..models import OPERATOR_KINDS, Ast, AstNode, NodeKind, base_tag
from .parser import DECLARATION_KEYWORDS

_KINDS = {kind.value: kind for kind in NodeKind}

_ID = frozenset({NodeKind.IDENTIFIER})
_STMT = frozenset({NodeKind.BLOCK_STMT})

# tag -> allowed child kinds (None: any kind)
_REQUIRED_CHILDREN: Dict[NodeKind, Dict[str, Optional[FrozenSet[NodeKind]]]] = {
    NodeKind.FUNCTION_DECL: {"name": _ID, "body": _STMT},
    NodeKind.FUNCTION_EXPR: {"body": _STMT},
    NodeKind.PARAM: {"name": _ID},
    NodeKind.VAR_DECL: {"name": _ID},
    NodeKind.IF_STMT: {"condition": None, "consequent": None},
    NodeKind.EXPR_STMT: {"expression": None},
    NodeKind.ASSIGN_EXPR: {"left": frozenset({NodeKind.IDENTIFIER, NodeKind.MEMBER_EXPR}), "right": None},
    NodeKind.BINARY_EXPR: {"left": None, "right": None},
    NodeKind.UNARY_EXPR: {"argument": None},
    NodeKind.CALL_EXPR: {"callee": None},
    NodeKind.MEMBER_EXPR: {"object": None, "property": _ID},
}


def ast_to_dict(node: AstNode) -> Dict[str, Any]:
    out: Dict[str, Any] = {"kind": node.kind.value}
    if node.name is not None:
        out["name"] = node.name
    if node.value is not None:
        out["value"] = node.value
    out["span"] = list(node.span)
    out["children"] = [{"tag": tag, "node": ast_to_dict(child)} for tag, child in node.children]
    return out


def dump_ast_json(ast: Ast) -> bytes:
    """Serialise an Ast to UTF-8 JSON."""
    return json.dumps(ast_to_dict(ast.root), ensure_ascii=False).encode("utf-8")


def _optional_str(obj: dict, key: str, path: str):
    value = obj.get(key)
    if value is not None and not isinstance(value, str):
        raise SchemaError("expected a string", f"{path}.{key}")
    return value


def _span(obj: dict, path: str):
    raw = obj.get("span", [0, 0])
    valid = (
        isinstance(raw, list)
        and len(raw) == 2
        and all(isinstance(v, int) and not isinstance(v, bool) and v >= 0 for v in raw)
        and raw[0] <= raw[1]
    )
    if not valid:
        raise SchemaError("expected [start, end] with 0 <= start <= end", f"{path}.span")
    return (raw[0], raw[1])


def node_from_dict(obj: Any, path: str = "$") -> AstNode:
    if not isinstance(obj, dict):
        raise SchemaError("expected an object", path)
    if "kind" not in obj:
        raise SchemaError("missing node kind", f"{path}.kind")
    kind = _KINDS.get(obj["kind"]) if isinstance(obj["kind"], str) else None
    if kind is None:
        raise SchemaError(f"unknown node kind {obj['kind']!r}", f"{path}.kind")

    node = AstNode(
        kind=kind,
        span=_span(obj, path),
        name=_optional_str(obj, "name", path),
        value=_optional_str(obj, "value", path),
    )

    raw_children = obj.get("children", [])
    if not isinstance(raw_children, list):
        raise SchemaError("expected a list", f"{path}.children")
    seen = set()
    for i, entry in enumerate(raw_children):
        entry_path = f"{path}.children[{i}]"
        if not isinstance(entry, dict):
            raise SchemaError("expected an object", entry_path)
        tag = entry.get("tag")
        if not isinstance(tag, str) or not tag:
            raise SchemaError("expected a non-empty string", f"{entry_path}.tag")
        if tag in seen:
            raise SchemaError(f"duplicate child tag {tag!r}", f"{entry_path}.tag")
        seen.add(tag)
        node.children.append((tag, node_from_dict(entry.get("node"), f"{entry_path}.node")))

    if kind is NodeKind.IDENTIFIER:
        if not node.name:
            raise SchemaError("Identifier requires a name", f"{path}.name")
    if kind is NodeKind.LITERAL and not node.value:
        raise SchemaError("Literal requires a value", f"{path}.value")
    if kind in (NodeKind.IDENTIFIER, NodeKind.LITERAL) and node.children:
        raise SchemaError(f"{kind.value} must be a leaf", f"{path}.children")
    if any(base_tag(tag) != tag and not tag.endswith("]") for tag, _ in node.children):
        raise SchemaError("malformed indexed tag", f"{path}.children")
    _check_required(node, path)
    return node


def _check_required(node: AstNode, path: str):
    for tag, allowed in _REQUIRED_CHILDREN.get(node.kind, {}).items():
        child = node.child(tag)
        if child is None:
            raise SchemaError(f"missing child {tag!r}", f"{path}.children")
        if allowed is not None and child.kind not in allowed:
            raise SchemaError(f"child {tag!r} cannot be a {child.kind.value}", f"{path}.children")
    name = node.child("name") if node.kind is NodeKind.FUNCTION_EXPR else None
    if name is not None and name.kind is not NodeKind.IDENTIFIER:
        raise SchemaError("child 'name' must be an Identifier", f"{path}.children")
    if node.kind in OPERATOR_KINDS and not node.value:
        raise SchemaError(f"{node.kind.value} requires an operator value", f"{path}.value")
    if node.kind is NodeKind.VAR_DECL and node.value not in DECLARATION_KEYWORDS:
        raise SchemaError("VarDecl value must be var, let or const", f"{path}.value")


def load_ast_json(data: Union[bytes, str]) -> Ast:
    """Load an Ast from the JSON schema above."""
    try:
        obj = json.loads(data)
    except (ValueError, UnicodeDecodeError) as e:
        raise SchemaError(f"invalid JSON: {e}", "$")
    return Ast(node_from_dict(obj))
