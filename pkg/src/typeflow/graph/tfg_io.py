"""TFG JSON persistence.

Format::

    {"file": str,
     "nodes": [{"id": int, "kind": str, "feature": str, "predictable": bool}],
     "edges": [{"src": int, "dst": int, "feature": str}],
     "labels": {"<node id>": "<type>"}}
"""
import json
from pathlib import Path
from typing import Any, Dict, Union

from ..infrastructure.error_handling import SchemaError
from ..models import Tfg, TfgEdge, TfgNode, TfgNodeKind

_NODE_KINDS = {kind.value: kind for kind in TfgNodeKind}


def tfg_to_dict(graph: Tfg) -> Dict[str, Any]:
    return {
        "file": graph.file_id,
        "nodes": [
            {"id": n.id, "kind": n.kind.value, "feature": n.feature, "predictable": n.predictable}
            for n in graph.nodes
        ],
        "edges": [{"src": e.src, "dst": e.dst, "feature": e.feature} for e in graph.edges],
        "labels": {str(k): v for k, v in sorted(graph.labels.items())},
    }


def _field(obj: dict, key: str, kind, path: str):
    value = obj.get(key)
    if not isinstance(value, kind) or (kind is int and isinstance(value, bool)):
        raise SchemaError(f"expected {kind.__name__}", f"{path}.{key}")
    return value


def tfg_from_dict(obj: Any) -> Tfg:
    if not isinstance(obj, dict):
        raise SchemaError("expected an object", "$")
    graph = Tfg(file_id=obj.get("file", "") or "")
    for i, raw in enumerate(obj.get("nodes", [])):
        path = f"$.nodes[{i}]"
        if not isinstance(raw, dict):
            raise SchemaError("expected an object", path)
        kind = _NODE_KINDS.get(raw.get("kind"))
        if kind is None:
            raise SchemaError(f"unknown node kind {raw.get('kind')!r}", f"{path}.kind")
        graph.nodes.append(
            TfgNode(
                id=_field(raw, "id", int, path),
                kind=kind,
                feature=_field(raw, "feature", str, path),
                predictable=_field(raw, "predictable", bool, path),
            )
        )
    for i, raw in enumerate(obj.get("edges", [])):
        path = f"$.edges[{i}]"
        if not isinstance(raw, dict):
            raise SchemaError("expected an object", path)
        graph.edges.append(
            TfgEdge(_field(raw, "src", int, path), _field(raw, "dst", int, path), _field(raw, "feature", str, path))
        )
    labels = obj.get("labels", {})
    if not isinstance(labels, dict):
        raise SchemaError("expected an object", "$.labels")
    for key, value in labels.items():
        if not key.isdigit() or not isinstance(value, str):
            raise SchemaError("expected '<node id>': '<type>'", f"$.labels.{key}")
        graph.labels[int(key)] = value
    return graph


def save_tfg(graph: Tfg, path: Union[str, Path]):
    Path(path).write_text(json.dumps(tfg_to_dict(graph), indent=1), encoding="utf-8")


def load_tfg(path: Union[str, Path]) -> Tfg:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except ValueError as e:
        raise SchemaError(f"invalid JSON: {e}", "$")
    return tfg_from_dict(obj)
