import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))  # for the oracles module

from platgp import kernels as K
from platgp.levels import parse_level


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    K.warmup()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def flat_level(width=32, coins=(), bricks=(), enemies=(), seed=0, difficulty=0):
    """Small hand-built level: flat two-row ground, extras where asked."""
    rows = [["."] * width for _ in range(15)]
    for x in range(width):
        rows[13][x] = "#"
        rows[14][x] = "#"
    for x, y in coins:
        rows[y][x] = "c"
    for x, y in bricks:
        rows[y][x] = "B"
    for x in enemies:
        rows[12][x] = "E"
    rows[12][1] = "S"
    rows[12][width - 1] = "F"
    text = f"LVL1 {width} 15 {seed} {difficulty}\n" + "\n".join(
        "".join(r) for r in rows) + "\n"
    return parse_level(text)


@pytest.fixture
def tiny_level():
    return flat_level()
