"""Gene table, chromosome typing, and the two interpreters' agreement."""

import numpy as np
import pytest

from conftest import flat_level
from platgp import kernels as K
from platgp.genes import (GENE_TABLE, Chromosome, GeneType, GeneTypeError,
                          Node, const, evaluate, gene)
from platgp.gp_ops import GROW, random_tree
from platgp.sim import Observation


def obs(coins=(), enemies=(), breakables=(), is_tall=True, can_jump=True,
        can_shoot=True):
    grids = [np.zeros((6, 6), np.uint8) for _ in range(3)]
    for grid, cells in zip(grids, (coins, enemies, breakables)):
        for dx, dy in cells:
            grid[dx + 3, dy + 3] = 1
    return Observation(coin_grid=grids[0], enemy_grid=grids[1],
                       breakable_grid=grids[2], is_tall=is_tall,
                       can_jump=can_jump, can_shoot=can_shoot)


class TestGeneTable:
    def test_closed_set(self):
        assert len(GENE_TABLE) == 22
        functions = [s for s in GENE_TABLE.values() if not s.is_terminal]
        assert {s.name for s in functions} == {
            "IfElse", "And", "Or", "Not", "Sub", "IsCoinAt", "IsEnemyAt",
            "IsBreakableAt", "Seq2", "Seq3"}

    def test_every_type_has_terminals_and_functions(self):
        from platgp.genes import FUNCTIONS_BY_TYPE, TERMINALS_BY_TYPE
        for t in GeneType:
            assert FUNCTIONS_BY_TYPE[t]
            assert TERMINALS_BY_TYPE[t]


class TestTyping:
    def test_root_must_be_act(self):
        with pytest.raises(GeneTypeError, match="Act"):
            Chromosome(gene("IsTall"))

    def test_child_type_mismatch(self):
        bad = Node(GENE_TABLE["IfElse"],
                   (Node(GENE_TABLE["Jump"]), Node(GENE_TABLE["Jump"]),
                    Node(GENE_TABLE["Right"])))
        with pytest.raises(GeneTypeError, match="returns Act, expected Bool"):
            Chromosome(bad)

    def test_const_range(self):
        with pytest.raises(GeneTypeError):
            const(7)
        with pytest.raises(GeneTypeError):
            const(-7)

    def test_depth_cap(self):
        node = gene("Jump")
        for _ in range(12):
            node = gene("Seq2", node, gene("Wait"))
        with pytest.raises(GeneTypeError, match="deeper"):
            Chromosome(node)

    def test_node_cap(self):
        node = gene("Jump")
        # a wide, shallow tree: Seq3(Seq3(...), ...) levels multiply by 3
        level = [gene("Jump")] * 243
        while len(level) > 1:
            level = [gene("Seq3", *level[i:i + 3]) for i in range(0, len(level), 3)]
        with pytest.raises(GeneTypeError, match="larger"):
            Chromosome(level[0])


class TestEvaluate:
    def test_seq2_right_jump(self):
        c = Chromosome(gene("Seq2", gene("Right"), gene("Jump")))
        assert evaluate(c, obs()) == 0b010010

    def test_ifelse_false_branch(self):
        c = Chromosome(gene("IfElse", gene("IsEnemyAt", 1, 0),
                            gene("Jump"), gene("Right")))
        assert evaluate(c, obs()) == int(0b000010)
        assert evaluate(c, obs(enemies=[(1, 0)])) == 0b010000

    def test_not_canjump_gate(self):
        c = Chromosome(gene("IfElse", gene("Not", gene("CanJump")),
                            gene("Wait"), gene("Seq2", gene("Right"),
                                                gene("Jump"))))
        assert evaluate(c, obs(can_jump=True)) == 0b010010
        assert evaluate(c, obs(can_jump=False)) == 0

    def test_shoot_and_run_share_bit5(self):
        assert evaluate(Chromosome(gene("Shoot")), obs()) == 0b100000
        assert evaluate(Chromosome(gene("Run")), obs()) == 0b100000

    def test_wait_contributes_nothing(self):
        assert evaluate(Chromosome(gene("Wait")), obs()) == 0

    def test_sub_saturates(self):
        c = Chromosome(gene("IfElse",
                            gene("IsCoinAt", gene("Sub", -6, 6), 0),
                            gene("Jump"), gene("Right")))
        # Sub(-6, 6) saturates to -6, not -12: sensor looks at dx=-6 -> false
        assert evaluate(c, obs(coins=[(-3, 0)])) == 0b000010

    def test_sensor_outside_window_false(self):
        c = Chromosome(gene("IfElse", gene("IsCoinAt", 3, 0),
                            gene("Jump"), gene("Right")))
        assert evaluate(c, obs(coins=[(2, 0)])) == 0b000010

    def test_untaken_branch_contributes_no_bits(self):
        c = Chromosome(gene("IfElse", gene("IsTall"),
                            gene("Left"), gene("Right")))
        assert evaluate(c, obs(is_tall=True)) == 0b000001
        assert evaluate(c, obs(is_tall=False)) == 0b000010

    def test_and_or(self):
        c = Chromosome(gene("IfElse",
                            gene("And", gene("IsTall"), gene("CanShoot")),
                            gene("Shoot"), gene("Wait")))
        assert evaluate(c, obs(is_tall=True, can_shoot=True)) == 0b100000
        assert evaluate(c, obs(is_tall=False, can_shoot=True)) == 0
        c2 = Chromosome(gene("IfElse",
                             gene("Or", gene("IsTall"), gene("CanShoot")),
                             gene("Up"), gene("Down")))
        assert evaluate(c2, obs(is_tall=False, can_shoot=True)) == 0b000100


class TestInterpreterParity:
    """The tree-walk and the flattened kernel interpreter must agree."""

    def test_parity_on_random_trees_and_observations(self, rng):
        stacks = [np.empty(64, np.int64) for _ in range(4)]
        for trial in range(400):
            c = Chromosome(random_tree(rng, GROW, 8, GeneType.ACT))
            op, val, c0, c1, c2 = c.program()
            o = obs(coins=[(int(rng.integers(-3, 3)), int(rng.integers(-3, 3)))
                           for _ in range(3)],
                    enemies=[(int(rng.integers(-3, 3)), int(rng.integers(-3, 3)))],
                    breakables=[(int(rng.integers(-3, 3)),
                                 int(rng.integers(-3, 3)))],
                    is_tall=bool(rng.integers(2)),
                    can_jump=bool(rng.integers(2)),
                    can_shoot=bool(rng.integers(2)))
            expected = evaluate(c, o)
            got = K.eval_program(op, val, c0, c1, c2, o.coin_grid, o.enemy_grid,
                                 o.breakable_grid, int(o.is_tall),
                                 int(o.can_jump), int(o.can_shoot), *stacks)
            assert got == expected

    def test_whole_episode_parity(self, rng):
        level = flat_level(width=48, coins=[(6, 11), (14, 10)], enemies=[20])
        for _ in range(25):
            c = Chromosome(random_tree(rng, GROW, 7, GeneType.ACT))
            from platgp.sim import run_episode
            fast = run_episode(level, c, budget=400)
            slow = run_episode(level, lambda o: c(o), budget=400)
            assert np.array_equal(fast.inputs, slow.inputs)
            assert fast.events == slow.events
            assert (fast.outcome, fast.score) == (slow.outcome, slow.score)
