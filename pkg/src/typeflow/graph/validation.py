"""Structural checks on type flow graphs."""
from collections import Counter
from dataclasses import dataclass, field
from typing import List

from ..models import PREDICTABLE_KINDS, Tfg


@dataclass
class Finding:
    code: str
    message: str


@dataclass
class ValidationReport:
    """Violations found in one graph; empty means valid."""
    file_id: str = ""
    findings: List[Finding] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.findings

    def add(self, code: str, message: str):
        self.findings.append(Finding(code, message))

    def __len__(self) -> int:
        return len(self.findings)


def validate_tfg(graph: Tfg) -> ValidationReport:
    """Check pairing, predictable flags, dangling ids and label placement."""
    report = ValidationReport(file_id=graph.file_id)
    n = len(graph.nodes)

    for index, node in enumerate(graph.nodes):
        if node.id != index:
            report.add("node-id", f"node at position {index} has id {node.id}")
        if node.predictable != (node.kind in PREDICTABLE_KINDS):
            report.add("predictable", f"node {node.id} ({node.kind.value}) has predictable={node.predictable}")

    forward = Counter()
    backward = Counter()
    for edge in graph.edges:
        if not (0 <= edge.src < n and 0 <= edge.dst < n):
            report.add("dangling", f"edge {edge.src}->{edge.dst} {edge.feature} references a missing node")
            continue
        if not (edge.feature.startswith("(") and edge.feature.endswith(")")) or edge.direction not in "fb":
            report.add("direction", f"edge {edge.src}->{edge.dst} has malformed feature {edge.feature!r}")
            continue
        if edge.direction == "f":
            forward[(edge.src, edge.dst, edge.base)] += 1
        else:
            backward[(edge.dst, edge.src, edge.base)] += 1

    for (src, dst, base), extra in (forward - backward).items():
        for _ in range(extra):
            report.add("unpaired", f"forward edge {src}->{dst} {base},f) has no backward dual")
    for (src, dst, base), extra in (backward - forward).items():
        for _ in range(extra):
            report.add("unpaired", f"backward edge {dst}->{src} {base},b) has no forward dual")

    for node_id in graph.labels:
        if not 0 <= node_id < n:
            report.add("dangling", f"label on missing node {node_id}")
        elif graph.nodes[node_id].kind not in PREDICTABLE_KINDS:
            kind = graph.nodes[node_id].kind
            report.add("label-kind", f"label on non-predictable {kind.value} {node_id}")
    return report

