"""Data models shared across the type inference pipeline."""
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterator, List, Optional, Tuple

Span = Tuple[int, int]


class TokenKind(Enum):
    """Lexical token categories."""
    IDENTIFIER = "identifier"
    STRING = "string-lit"
    NUMBER = "number-lit"
    BOOL = "bool-lit"
    NULL = "null-lit"
    REGEX = "regex-lit"
    KEYWORD = "keyword"
    PUNCTUATOR = "punctuator"


LITERAL_TOKEN_KINDS = frozenset(
    {TokenKind.STRING, TokenKind.NUMBER, TokenKind.BOOL, TokenKind.NULL, TokenKind.REGEX}
)


@dataclass(frozen=True)
class Token:
    """A lexical token with its byte span in the source."""
    kind: TokenKind
    text: str
    span: Span

    @property
    def feature(self) -> str:
        """Feature string used when the token is embedded by kind."""
        if self.kind is TokenKind.KEYWORD:
            return f"kw:{self.text}"
        if self.kind is TokenKind.PUNCTUATOR:
            return f"punct:{self.text}"
        return self.kind.value


class NodeKind(Enum):
    """AST node kinds of the supported subset."""
    PROGRAM = "Program"
    FUNCTION_DECL = "FunctionDecl"
    FUNCTION_EXPR = "FunctionExpr"
    PARAM = "Param"
    VAR_DECL = "VarDecl"
    IF_STMT = "IfStmt"
    RETURN_STMT = "ReturnStmt"
    EXPR_STMT = "ExprStmt"
    BLOCK_STMT = "BlockStmt"
    ASSIGN_EXPR = "AssignExpr"
    BINARY_EXPR = "BinaryExpr"
    UNARY_EXPR = "UnaryExpr"
    CALL_EXPR = "CallExpr"
    MEMBER_EXPR = "MemberExpr"
    IDENTIFIER = "Identifier"
    LITERAL = "Literal"


STATEMENT_KINDS = frozenset(
    {
        NodeKind.PROGRAM,
        NodeKind.BLOCK_STMT,
        NodeKind.EXPR_STMT,
        NodeKind.IF_STMT,
        NodeKind.RETURN_STMT,
    }
)

# kinds that carry an operator in their value field
OPERATOR_KINDS = frozenset({NodeKind.ASSIGN_EXPR, NodeKind.BINARY_EXPR, NodeKind.UNARY_EXPR})


@dataclass
class AstNode:
    """A node of the syntax tree; children are (tag, node) pairs in source order."""
    kind: NodeKind
    span: Span
    name: Optional[str] = None
    value: Optional[str] = None
    children: List[Tuple[str, "AstNode"]] = field(default_factory=list)
    id: int = -1

    def child(self, tag: str) -> Optional["AstNode"]:
        """Return the child with the given tag, if any."""
        for child_tag, node in self.children:
            if child_tag == tag:
                return node
        return None

    def child_list(self, prefix: str) -> List["AstNode"]:
        """Return the indexed children tagged prefix[0], prefix[1], ..."""
        return [node for tag, node in self.children if base_tag(tag) == prefix]


def base_tag(tag: str) -> str:
    """Strip the list index from a child tag: 'arguments[2]' -> 'arguments'."""
    bracket = tag.find("[")
    return tag if bracket < 0 else tag[:bracket]


def literal_kind(text: str) -> TokenKind:
    """Token kind of a literal from its source text."""
    if text in ("true", "false"):
        return TokenKind.BOOL
    if text == "null":
        return TokenKind.NULL
    if text[:1] in ("'", '"'):
        return TokenKind.STRING
    if text[:1] == "/":
        return TokenKind.REGEX
    return TokenKind.NUMBER


@dataclass
class Ast:
    """Syntax tree of one file; node ids are dense pre-order indices."""
    root: AstNode
    nodes: List[AstNode] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        self.nodes = []
        stack = [self.root]
        while stack:
            node = stack.pop()
            node.id = len(self.nodes)
            self.nodes.append(node)
            stack.extend(child for _, child in reversed(node.children))

    def node(self, node_id: int) -> AstNode:
        return self.nodes[node_id]

    def identifiers(self) -> Iterator[AstNode]:
        """Identifier nodes in source order."""
        return (n for n in self.nodes if n.kind is NodeKind.IDENTIFIER)


# raw annotation strings keyed by the annotated identifier's span
AnnotationMap = Dict[Span, str]


class TfgNodeKind(Enum):
    """Type flow graph node kinds."""
    IDENT = "IdentNode"
    TOK = "TokNode"
    EXPR = "ExprNode"
    VAR_SYM = "VarSymNode"
    OBJ_PROP = "ObjPropNode"
    CTX = "CtxNode"


PREDICTABLE_KINDS = frozenset({TfgNodeKind.IDENT, TfgNodeKind.EXPR})


class TfgEdgeKind(Enum):
    """Type flow graph edge families."""
    EXP = "ExpEdge"
    VAR_SYM = "VarSymEdge"
    OBJ_PROP = "ObjPropEdge"
    RET = "RetEdge"
    CALL = "CallEdge"
    CTX = "CtxEdge"


@dataclass
class TfgNode:
    """A TFG node."""
    id: int
    kind: TfgNodeKind
    feature: str
    predictable: bool
    ast_ref: Optional[int] = None


@dataclass
class TfgEdge:
    """A directed, feature-labelled TFG edge."""
    src: int
    dst: int
    feature: str

    @property
    def direction(self) -> str:
        return self.feature[-2]

    @property
    def base(self) -> str:
        """Feature without its direction component."""
        return self.feature[:-3]


def edge_feature(parts: Tuple[str, ...], direction: str) -> str:
    """Render an edge feature tuple: ('BinaryExpr', 'left') + 'f' -> '(BinaryExpr,left,f)'."""
    return "(" + ",".join(parts + (direction,)) + ")"


def dual_feature(feature: str) -> str:
    """The feature of an edge's opposite-direction partner."""
    flipped = "b" if feature[-2] == "f" else "f"
    return feature[:-2] + flipped + ")"


@dataclass
class Tfg:
    """Type flow graph of one file plus its node labels."""
    nodes: List[TfgNode] = field(default_factory=list)
    edges: List[TfgEdge] = field(default_factory=list)
    labels: Dict[int, str] = field(default_factory=dict)
    file_id: str = ""

    def nodes_of(self, kind: TfgNodeKind) -> List[TfgNode]:
        return [n for n in self.nodes if n.kind is kind]

    def degree(self, node_id: int) -> int:
        return sum((e.src == node_id) + (e.dst == node_id) for e in self.edges)


@dataclass
class FuncDecl:
    """Pre-pass record of one named function declaration (AST ids)."""
    name: str
    decl_ast_id: int
    param_ast_ids: List[int]

    @property
    def param_count(self) -> int:
        return len(self.param_ast_ids)


FuncDeclTable = Dict[str, FuncDecl]


@dataclass
class Example:
    """One file prepared for training or evaluation."""
    file_id: str
    tfg: Tfg
    tokens: List[Token] = field(default_factory=list)
    # IdentNode id -> position in tokens
    ident_tokens: Dict[int, int] = field(default_factory=dict)
    # predictable node id -> type vocabulary index
    labels: Dict[int, int] = field(default_factory=dict)
    # labelled node id -> generator signal class, when a corpus manifest is known
    signal_classes: Dict[int, str] = field(default_factory=dict)

    @property
    def token_count(self) -> int:
        return len(self.tokens)
