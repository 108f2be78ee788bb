"""Chromosome text formats: S-expressions, DOT graphs, readable pseudocode.

The S-expression form is canonical: parse(serialize(c)) == c and formatting is
byte-stable. Constants print as bare integers, every other gene as a
parenthesized call, e.g. ``(IfElse (IsEnemyAt 1 0) (Jump) (Seq2 (Right) (Jump)))``.
"""

import re

from .genes import (CONST_MAX, CONST_MIN, GENE_TABLE, Chromosome, GeneType,
                    Node, const)


class AgentParseError(ValueError):
    """S-expression rejected; carries a 1-based line/column position."""

    def __init__(self, message, line, column):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


def serialize_node(node: Node) -> str:
    if node.sig.name == "Const":
        return str(node.value)
    if not node.children:
        return f"({node.sig.name})"
    inner = " ".join(serialize_node(c) for c in node.children)
    return f"({node.sig.name} {inner})"


def serialize(chromosome: Chromosome) -> str:
    return serialize_node(chromosome.root)


_TOKEN = re.compile(r"\(|\)|[^\s()]+")


def _tokenize(text):
    tokens = []
    for m in _TOKEN.finditer(text):
        start = m.start()
        line = text.count("\n", 0, start) + 1
        col = start - (text.rfind("\n", 0, start) + 1) + 1
        tokens.append((m.group(), line, col))
    return tokens


def parse(text: str) -> Chromosome:
    """Parse an agent S-expression; the root must evaluate to an action."""
    node, _ = _parse_expr(text)
    if node.sig.return_type is not GeneType.ACT:
        raise AgentParseError(
            f"root gene {node.sig.name} has type {node.sig.return_type.value}, "
            "expected Act", 1, 1)
    return Chromosome(node)


def parse_node(text: str) -> Node:
    node, _ = _parse_expr(text)
    return node


def _parse_expr(text: str) -> tuple[Node, list]:
    tokens = _tokenize(text)
    if not tokens:
        raise AgentParseError("empty input", 1, 1)
    node, rest = _parse_tokens(tokens)
    if rest:
        tok, line, col = rest[0]
        raise AgentParseError(f"unexpected trailing {tok!r}", line, col)
    return node, rest


_INT = re.compile(r"-?\d+$")


def _parse_tokens(tokens):
    tok, line, col = tokens[0]
    if _INT.match(tok):
        value = int(tok)
        if not CONST_MIN <= value <= CONST_MAX:
            raise AgentParseError(
                f"constant {value} outside [{CONST_MIN}, {CONST_MAX}]", line, col)
        return const(value), tokens[1:]
    if tok == ")":
        raise AgentParseError("unexpected ')'", line, col)
    if tok != "(":
        raise AgentParseError(f"expected '(' or integer, got {tok!r}", line, col)
    if len(tokens) < 2:
        raise AgentParseError("unterminated expression", line, col)
    name, nline, ncol = tokens[1]
    sig = GENE_TABLE.get(name)
    if sig is None or name == "Const":
        raise AgentParseError(f"unknown gene {name!r}", nline, ncol)
    rest = tokens[2:]
    children = []
    while True:
        if not rest:
            raise AgentParseError(f"missing ')' for {name}", nline, ncol)
        if rest[0][0] == ")":
            rest = rest[1:]
            break
        child, rest = _parse_tokens(rest)
        children.append(child)
    if len(children) != sig.arity:
        raise AgentParseError(
            f"{name} expects {sig.arity} arguments, got {len(children)}",
            nline, ncol)
    for child, want in zip(children, sig.arg_types):
        if child.sig.return_type is not want:
            raise AgentParseError(
                f"{name} argument of type {child.sig.return_type.value}, "
                f"expected {want.value}", nline, ncol)
    return Node(sig, children), rest


def to_dot(chromosome: Chromosome) -> str:
    """Render the tree as a DOT digraph, one node per gene, edges in
    argument order. Constants are labeled with their value."""
    lines = ["digraph chromosome {", '  node [shape=box fontname="Helvetica"];']
    counter = [0]

    def walk(node):
        i = counter[0]
        counter[0] += 1
        label = str(node.value) if node.sig.name == "Const" else node.sig.name
        lines.append(f'  n{i} [label="{label}"];')
        for child in node.children:
            j = walk(child)
            lines.append(f"  n{i} -> n{j};")
        return i

    walk(chromosome.root)
    lines.append("}")
    return "\n".join(lines) + "\n"


_SNAKE = re.compile(r"(?<!^)(?=[A-Z])")


def _call_name(name: str) -> str:
    return _SNAKE.sub("_", name).lower()


def _expr(node: Node) -> str:
    if node.sig.name == "Const":
        return str(node.value)
    if not node.children:
        return f"{_call_name(node.sig.name)}()"
    args = ", ".join(_expr(c) for c in node.children)
    return f"{_call_name(node.sig.name)}({args})"


def _act_lines(node: Node, indent: int) -> list[str]:
    pad = "  " * indent
    name = node.sig.name
    if name == "IfElse":
        cond, then, other = node.children
        lines = [f"{pad}if {_expr(cond)}"]
        lines += _branch_lines("then", then, indent + 1)
        lines += _branch_lines("else", other, indent + 1)
        return lines
    if name in ("Seq2", "Seq3"):
        lines = [f"{pad}seq {{"]
        for child in node.children:
            lines += _act_lines(child, indent + 1)
        lines.append(f"{pad}}}")
        return lines
    return [f"{pad}{_expr(node)}"]


def _branch_lines(keyword: str, node: Node, indent: int) -> list[str]:
    pad = "  " * indent
    if not node.children:
        return [f"{pad}{keyword} {_expr(node)}"]
    body = _act_lines(node, indent)
    first = body[0].lstrip()
    return [f"{pad}{keyword} {first}"] + body[1:]


def to_pseudocode(chromosome: Chromosome) -> str:
    """Deterministic indented rendering: if/then/else, seq blocks, actions."""
    return "\n".join(_act_lines(chromosome.root, 0)) + "\n"
