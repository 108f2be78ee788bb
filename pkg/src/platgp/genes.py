"""The typed gene language and decision-tree chromosomes.

The gene table is closed and versioned: 10 functions, 8 action terminals,
3 boolean sensors and the integer constants -6..6. Trees are immutable and
structurally shared; every operation that builds a tree must keep it
well-typed, at most MAX_DEPTH deep and at most MAX_NODES large.
"""

import hashlib
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import kernels as K
from .sim import Observation

GENE_TABLE_VERSION = 1

MAX_DEPTH = 12
MAX_NODES = 256

CONST_MIN = K.CONST_MIN
CONST_MAX = K.CONST_MAX


class GeneType(Enum):
    BOOL = "Bool"
    INT = "Int"
    ACT = "Act"


@dataclass(frozen=True)
class GeneSignature:
    name: str
    arg_types: tuple
    return_type: GeneType
    opcode: int

    @property
    def arity(self) -> int:
        return len(self.arg_types)

    @property
    def is_terminal(self) -> bool:
        return not self.arg_types


_B, _I, _A = GeneType.BOOL, GeneType.INT, GeneType.ACT

_SIGS = [
    GeneSignature("IfElse", (_B, _A, _A), _A, K.OP_IFELSE),
    GeneSignature("And", (_B, _B), _B, K.OP_AND),
    GeneSignature("Or", (_B, _B), _B, K.OP_OR),
    GeneSignature("Not", (_B,), _B, K.OP_NOT),
    GeneSignature("Sub", (_I, _I), _I, K.OP_SUB),
    GeneSignature("IsCoinAt", (_I, _I), _B, K.OP_IS_COIN_AT),
    GeneSignature("IsEnemyAt", (_I, _I), _B, K.OP_IS_ENEMY_AT),
    GeneSignature("IsBreakableAt", (_I, _I), _B, K.OP_IS_BREAKABLE_AT),
    GeneSignature("Seq2", (_A, _A), _A, K.OP_SEQ2),
    GeneSignature("Seq3", (_A, _A, _A), _A, K.OP_SEQ3),
    GeneSignature("Const", (), _I, K.OP_CONST),
    GeneSignature("Left", (), _A, K.OP_LEFT),
    GeneSignature("Right", (), _A, K.OP_RIGHT),
    GeneSignature("Up", (), _A, K.OP_UP),
    GeneSignature("Down", (), _A, K.OP_DOWN),
    GeneSignature("Jump", (), _A, K.OP_JUMP),
    GeneSignature("Shoot", (), _A, K.OP_SHOOT),
    GeneSignature("Run", (), _A, K.OP_RUN),
    GeneSignature("Wait", (), _A, K.OP_WAIT),
    GeneSignature("IsTall", (), _B, K.OP_IS_TALL),
    GeneSignature("CanJump", (), _B, K.OP_CAN_JUMP),
    GeneSignature("CanShoot", (), _B, K.OP_CAN_SHOOT),
]

GENE_TABLE = {s.name: s for s in _SIGS}

FUNCTIONS = tuple(s for s in _SIGS if not s.is_terminal)
TERMINALS = tuple(s for s in _SIGS if s.is_terminal)

FUNCTIONS_BY_TYPE = {t: tuple(s for s in FUNCTIONS if s.return_type == t)
                     for t in GeneType}
TERMINALS_BY_TYPE = {t: tuple(s for s in TERMINALS if s.return_type == t)
                     for t in GeneType}

_ACTION_BITS = {
    K.OP_LEFT: K.BIT_LEFT, K.OP_RIGHT: K.BIT_RIGHT, K.OP_UP: K.BIT_UP,
    K.OP_DOWN: K.BIT_DOWN, K.OP_JUMP: K.BIT_JUMP, K.OP_SHOOT: K.BIT_FIRE,
    K.OP_RUN: K.BIT_FIRE, K.OP_WAIT: 0,
}


class GeneTypeError(TypeError):
    """A tree violates the gene signature table or the size/depth caps."""


class Node:
    """One tree node: a gene signature, an optional constant, children.

    Nodes are immutable; subtrees are shared freely between chromosomes.
    """

    __slots__ = ("sig", "value", "children")

    def __init__(self, sig: GeneSignature, children=(), value=None):
        object.__setattr__(self, "sig", sig)
        object.__setattr__(self, "children", tuple(children))
        object.__setattr__(self, "value", value)

    def __setattr__(self, *_):
        raise AttributeError("Node is immutable")

    def __eq__(self, other):
        if not isinstance(other, Node):
            return NotImplemented
        return (self.sig is other.sig and self.value == other.value
                and self.children == other.children)

    def __hash__(self):
        return hash((self.sig.name, self.value, self.children))

    def __repr__(self):
        from .treeio import serialize_node
        return f"Node({serialize_node(self)})"


def const(value: int) -> Node:
    if not CONST_MIN <= value <= CONST_MAX:
        raise GeneTypeError(f"constant {value} outside [{CONST_MIN}, {CONST_MAX}]")
    return Node(GENE_TABLE["Const"], value=value)


def gene(name: str, *children) -> Node:
    """Convenience constructor; integer arguments become constants."""
    sig = GENE_TABLE.get(name)
    if sig is None:
        raise GeneTypeError(f"unknown gene {name!r}")
    kids = tuple(const(c) if isinstance(c, int) else c for c in children)
    return Node(sig, kids)


def check_types(node: Node, depth: int = 1):
    """Validate typing, arity, constant range and the depth/size caps.

    Returns (node_count, max_depth); raises GeneTypeError on any violation.
    """
    sig = node.sig
    if sig.name == "Const":
        if node.value is None or not CONST_MIN <= node.value <= CONST_MAX:
            raise GeneTypeError(
                f"constant {node.value} outside [{CONST_MIN}, {CONST_MAX}]")
    elif node.value is not None:
        raise GeneTypeError(f"{sig.name} carries a constant value")
    if len(node.children) != sig.arity:
        raise GeneTypeError(
            f"{sig.name} expects {sig.arity} children, has {len(node.children)}")
    if depth > MAX_DEPTH:
        raise GeneTypeError(f"tree deeper than {MAX_DEPTH}")
    count = 1
    deepest = depth
    for child, want in zip(node.children, sig.arg_types):
        if child.sig.return_type is not want:
            raise GeneTypeError(
                f"{sig.name} child {child.sig.name} returns "
                f"{child.sig.return_type.value}, expected {want.value}")
        c, d = check_types(child, depth + 1)
        count += c
        deepest = max(deepest, d)
    if count > MAX_NODES:
        raise GeneTypeError(f"tree larger than {MAX_NODES} nodes")
    return count, deepest


def iter_nodes(node: Node, depth: int = 1):
    """Preorder traversal yielding (node, depth)."""
    yield node, depth
    for child in node.children:
        yield from iter_nodes(child, depth + 1)


def node_count(node: Node) -> int:
    return 1 + sum(node_count(c) for c in node.children)


def tree_depth(node: Node) -> int:
    if not node.children:
        return 1
    return 1 + max(tree_depth(c) for c in node.children)


class Chromosome:
    """An executable agent controller: a well-typed Act tree.

    Validation runs once at construction. The identity hash, node count and
    the flattened kernel program are derived lazily and cached; the object is
    immutable and safe to evaluate from many threads at once.
    """

    __slots__ = ("root", "_count", "_depth", "_id", "_program")

    def __init__(self, root: Node):
        if root.sig.return_type is not GeneType.ACT:
            raise GeneTypeError(
                f"chromosome root must have type Act, got "
                f"{root.sig.return_type.value}")
        count, depth = check_types(root)
        object.__setattr__(self, "root", root)
        object.__setattr__(self, "_count", count)
        object.__setattr__(self, "_depth", depth)
        object.__setattr__(self, "_id", None)
        object.__setattr__(self, "_program", None)

    def __setattr__(self, *_):
        raise AttributeError("Chromosome is immutable")

    @property
    def node_count(self) -> int:
        return self._count

    @property
    def depth(self) -> int:
        return self._depth

    @property
    def id(self) -> str:
        """Hash of the canonical serialization; stable identity for dedupe."""
        if self._id is None:
            from .treeio import serialize
            digest = hashlib.sha256(serialize(self).encode()).hexdigest()[:16]
            object.__setattr__(self, "_id", digest)
        return self._id

    def program(self):
        """Flatten to preorder opcode/child arrays for the kernel interpreter."""
        if self._program is None:
            object.__setattr__(self, "_program", flatten(self.root))
        return self._program

    def __eq__(self, other):
        if not isinstance(other, Chromosome):
            return NotImplemented
        return self.root == other.root

    def __hash__(self):
        return hash(self.root)

    def __repr__(self):
        return f"Chromosome(nodes={self.node_count}, depth={self.depth})"

    def __call__(self, obs: Observation) -> int:
        return evaluate(self, obs)


def flatten(root: Node):
    """Preorder arrays (op, val, c0, c1, c2) for :func:`kernels.eval_program`."""
    n = node_count(root)
    op = np.zeros(n, np.int64)
    val = np.zeros(n, np.int64)
    kids = np.full((n, 3), -1, np.int64)
    idx = [0]

    def walk(node):
        i = idx[0]
        idx[0] += 1
        op[i] = node.sig.opcode
        if node.sig.name == "Const":
            val[i] = node.value
        for slot, child in enumerate(node.children):
            kids[i, slot] = walk(child)
        return i

    walk(root)
    return op, val, kids[:, 0].copy(), kids[:, 1].copy(), kids[:, 2].copy()


def evaluate(chromosome, obs: Observation) -> int:
    """Interpret a chromosome against one observation; returns the 6-bit vector.

    Reference tree-walking interpreter with the same semantics as the
    flattened kernel: Act nodes accumulate bits, Seq runs children left to
    right, IfElse takes exactly one branch, Bool/Int nodes are pure reads.
    Stateless across frames.
    """
    root = chromosome.root if isinstance(chromosome, Chromosome) else chromosome
    return _eval(root, obs) & 63


def _eval(node: Node, obs: Observation) -> int:
    o = node.sig.opcode
    if o == K.OP_CONST:
        return node.value
    bit = _ACTION_BITS.get(o)
    if bit is not None:
        return bit
    if o == K.OP_IS_TALL:
        return int(obs.is_tall)
    if o == K.OP_CAN_JUMP:
        return int(obs.can_jump)
    if o == K.OP_CAN_SHOOT:
        return int(obs.can_shoot)
    c = node.children
    if o == K.OP_IFELSE:
        return _eval(c[1], obs) if _eval(c[0], obs) else _eval(c[2], obs)
    if o == K.OP_SEQ2:
        return _eval(c[0], obs) | _eval(c[1], obs)
    if o == K.OP_SEQ3:
        return _eval(c[0], obs) | _eval(c[1], obs) | _eval(c[2], obs)
    if o == K.OP_AND:
        return int(bool(_eval(c[0], obs)) and bool(_eval(c[1], obs)))
    if o == K.OP_OR:
        return int(bool(_eval(c[0], obs)) or bool(_eval(c[1], obs)))
    if o == K.OP_NOT:
        return int(not _eval(c[0], obs))
    if o == K.OP_SUB:
        return max(CONST_MIN, min(CONST_MAX, _eval(c[0], obs) - _eval(c[1], obs)))
    dx = _eval(c[0], obs)
    dy = _eval(c[1], obs)
    if not (K.OBS_LO <= dx <= K.OBS_HI and K.OBS_LO <= dy <= K.OBS_HI):
        return 0
    if o == K.OP_IS_COIN_AT:
        return int(obs.coin_at(dx, dy))
    if o == K.OP_IS_ENEMY_AT:
        return int(obs.enemy_at(dx, dy))
    if o == K.OP_IS_BREAKABLE_AT:
        return int(obs.breakable_at(dx, dy))
    raise GeneTypeError(f"unknown opcode {o}")  # pragma: no cover
