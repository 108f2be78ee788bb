"""Genetic operators on gene trees: random generation, crossover, mutation.

All randomness comes from a caller-supplied numpy Generator and no global
state is touched, so reproduction is reproducible from a master seed and the
operators are safe to use from any thread that owns its generator.
"""

from .genes import (CONST_MAX, CONST_MIN, FUNCTIONS_BY_TYPE, MAX_DEPTH,
                    MAX_NODES, TERMINALS_BY_TYPE, Chromosome, GeneType, Node,
                    const, iter_nodes, node_count, tree_depth)

GROW = "grow"
FULL = "full"

# crossover picks function nodes 90% of the time, terminals 10%
CROSSOVER_FUNCTION_BIAS = 0.9
CROSSOVER_RETRIES = 5


class _Budget:
    """Unreserved node capacity. Expanding a function must reserve one slot
    per child up front, so the finished tree can never exceed the cap."""

    __slots__ = ("left",)

    def __init__(self, cap):
        self.left = cap


def _make_terminal(rng, required_type) -> Node:
    choices = TERMINALS_BY_TYPE[required_type]
    sig = choices[int(rng.integers(len(choices)))]
    if sig.name == "Const":
        return const(int(rng.integers(CONST_MIN, CONST_MAX + 1)))
    return Node(sig)


def random_tree(rng, method: str, max_depth: int, required_type: GeneType,
                node_cap: int = MAX_NODES) -> Node:
    """Build a well-typed random tree.

    ``full`` places terminals only at the depth limit; ``grow`` chooses
    uniformly among all genes of the required type at every level. Both stay
    within ``max_depth`` and ``node_cap`` (the cap forces early terminals in
    large full trees).
    """
    if max_depth < 1:
        raise ValueError("max_depth must be >= 1")
    if method not in (GROW, FULL):
        raise ValueError(f"method must be 'grow' or 'full', got {method!r}")
    budget = _Budget(node_cap - 1)  # the root slot is already reserved
    return _gen(rng, method, max_depth, required_type, budget)


def _gen(rng, method, depth_left, required_type, budget):
    functions = FUNCTIONS_BY_TYPE[required_type]
    if depth_left <= 1:
        return _make_terminal(rng, required_type)
    if method == GROW:
        pool = functions + TERMINALS_BY_TYPE[required_type]
        sig = pool[int(rng.integers(len(pool)))]
    else:
        sig = functions[int(rng.integers(len(functions)))]
    if sig.is_terminal or budget.left < sig.arity:
        return _make_terminal(rng, required_type)
    budget.left -= sig.arity
    children = tuple(_gen(rng, method, depth_left - 1, t, budget)
                     for t in sig.arg_types)
    return Node(sig, children)


def random_chromosome(rng, method: str, max_depth: int) -> Chromosome:
    return Chromosome(random_tree(rng, method, max_depth, GeneType.ACT))


def _replace_at(root: Node, index: int, subtree: Node) -> Node:
    """Persistent update: new tree with the preorder-``index`` node replaced."""

    def walk(node, i):
        if i == index:
            return subtree, i + node_count(node)
        if i > index:
            return node, i + node_count(node)
        new_children = []
        changed = False
        j = i + 1
        for child in node.children:
            new_child, j = walk(child, j)
            changed = changed or new_child is not child
            new_children.append(new_child)
        return (Node(node.sig, new_children) if changed else node), j

    new_root, _ = walk(root, 0)
    return new_root


def _indexed_nodes(root: Node):
    return list(enumerate(n for n, _ in iter_nodes(root)))


def crossover(parent_a: Chromosome, parent_b: Chromosome, rng) -> Chromosome:
    """Branch-typing single-point crossover.

    Picks a node in A (biased to function nodes), then a node of the same
    return type in B, and grafts a copy of B's subtree into A. Falls back to
    a copy of A when B has no type-compatible node or the depth/size caps
    cannot be met within a few retries. Parents are never modified.
    """
    a_nodes = _indexed_nodes(parent_a.root)
    b_nodes = [n for n, _ in iter_nodes(parent_b.root)]
    for _ in range(CROSSOVER_RETRIES):
        functions = [(i, n) for i, n in a_nodes if not n.sig.is_terminal]
        terminals = [(i, n) for i, n in a_nodes if n.sig.is_terminal]
        pool = functions if (functions and rng.random() < CROSSOVER_FUNCTION_BIAS) \
            else terminals
        idx, target = pool[int(rng.integers(len(pool)))]
        want = target.sig.return_type
        candidates = [n for n in b_nodes if n.sig.return_type is want]
        if not candidates:
            return Chromosome(parent_a.root)
        graft = candidates[int(rng.integers(len(candidates)))]
        child_root = _replace_at(parent_a.root, idx, graft)
        if (tree_depth(child_root) <= MAX_DEPTH
                and node_count(child_root) <= MAX_NODES):
            return Chromosome(child_root)
    return Chromosome(parent_a.root)


def mutate(chromosome: Chromosome, rng) -> Chromosome:
    """Single-point mutation: one uniformly chosen node's subtree is replaced
    by a fresh grow tree of the same return type within the remaining depth
    and size budget."""
    nodes = [(i, n, d) for i, (n, d) in enumerate(iter_nodes(chromosome.root))]
    idx, target, depth = nodes[int(rng.integers(len(nodes)))]
    depth_left = MAX_DEPTH - depth + 1
    cap_left = MAX_NODES - chromosome.node_count + node_count(target)
    fresh = random_tree(rng, GROW, depth_left, target.sig.return_type,
                        node_cap=cap_left)
    return Chromosome(_replace_at(chromosome.root, idx, fresh))
