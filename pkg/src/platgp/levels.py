"""Tile levels: the data type, text format, generator and solvability check.

A level is a fixed grid of tiles (default 256 wide, 15 tall, row 0 at the
top), a spawn tile, a finish column, and walker enemy spawns. The generator is
deterministic in (seed, difficulty, width) and every generated level must pass
the jump-reachability check from spawn to finish.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels as K

DEFAULT_WIDTH = 256
DEFAULT_HEIGHT = 15
GROUND_ROW = 13  # top row of the two solid ground rows

GLYPHS = {K.T_EMPTY: ".", K.T_SOLID: "#", K.T_BRICK: "B", K.T_COIN: "c"}
GLYPH_TILES = {v: k for k, v in GLYPHS.items()}
TILE_LEGEND = {".": "empty", "#": "solid", "B": "brick", "c": "coin",
               "E": "enemy", "S": "spawn", "F": "finish"}

# Conservative jump-reach model used by the solvability check: from a
# standable tile the agent can reach standable tiles up to 5 columns away
# and at most 4 rows higher (drops may be arbitrarily deep).
JUMP_REACH_COLS = 5
JUMP_REACH_ROWS_UP = 4


class LevelError(ValueError):
    """Raised for malformed level text or an unsolvable construction."""

    def __init__(self, message, line=None, column=None):
        if line is not None:
            message = f"line {line}" + (
                f", column {column}" if column is not None else "") + f": {message}"
        super().__init__(message)
        self.line = line
        self.column = column


@dataclass(frozen=True)
class EnemySpawn:
    kind: str
    x: int
    y: int


@dataclass(frozen=True)
class Level:
    width: int
    height: int
    tiles: np.ndarray  # uint8 (height, width), read-only
    spawn: tuple[int, int]
    finish_x: int
    enemies: tuple[EnemySpawn, ...]
    seed: int
    difficulty: int

    def __post_init__(self):
        self.tiles.setflags(write=False)

    def tile(self, x: int, y: int) -> int:
        return int(self.tiles[y, x])

    @property
    def length_units(self) -> int:
        return self.width * K.FP

    def max_score(self) -> int:
        """Highest score obtainable: all coins, stomps and brick breaks."""
        coins = int(np.count_nonzero(self.tiles == K.T_COIN))
        bricks = int(np.count_nonzero(self.tiles == K.T_BRICK))
        return (coins * K.SCORE_COIN + len(self.enemies) * K.SCORE_STOMP
                + bricks * K.SCORE_BRICK)

    def __eq__(self, other):
        if not isinstance(other, Level):
            return NotImplemented
        return (self.width == other.width and self.height == other.height
                and np.array_equal(self.tiles, other.tiles)
                and self.spawn == other.spawn and self.finish_x == other.finish_x
                and self.enemies == other.enemies and self.seed == other.seed
                and self.difficulty == other.difficulty)


def serialize_level(level: Level) -> str:
    """Render a level in the LVL1 text format (inverse of parse_level)."""
    grid = [[GLYPHS[int(level.tiles[y, x])] for x in range(level.width)]
            for y in range(level.height)]
    for e in level.enemies:
        if grid[e.y][e.x] != ".":
            raise LevelError(f"enemy spawn at ({e.x},{e.y}) is not on an empty tile")
        grid[e.y][e.x] = "E"
    sx, sy = level.spawn
    if grid[sy][sx] != ".":
        raise LevelError(f"spawn tile ({sx},{sy}) is not empty")
    grid[sy][sx] = "S"
    fy = _surface_row(level.tiles, level.finish_x)
    if fy is None or grid[fy][level.finish_x] != ".":
        raise LevelError(f"finish column {level.finish_x} has no empty surface tile")
    grid[fy][level.finish_x] = "F"
    head = f"LVL1 {level.width} {level.height} {level.seed} {level.difficulty}"
    return "\n".join([head] + ["".join(row) for row in grid]) + "\n"


def parse_level(text: str) -> Level:
    """Parse the LVL1 text format; errors carry 1-based line/column positions."""
    lines = text.splitlines()
    if not lines:
        raise LevelError("empty level text", line=1)
    head = lines[0].split()
    if len(head) != 5 or head[0] != "LVL1":
        raise LevelError("header must be 'LVL1 <width> <height> <seed> <difficulty>'",
                         line=1)
    try:
        width, height, seed, difficulty = (int(v) for v in head[1:])
    except ValueError:
        raise LevelError("header fields must be integers", line=1) from None
    if width < 16:
        raise LevelError(f"width {width} too small (minimum 16)", line=1)
    if height != DEFAULT_HEIGHT:
        raise LevelError(f"height must be {DEFAULT_HEIGHT}, got {height}", line=1)
    if difficulty < 0:
        raise LevelError("difficulty must be >= 0", line=1)
    if len(lines) < 1 + height:
        raise LevelError(f"expected {height} tile rows, got {len(lines) - 1}",
                         line=len(lines))
    tiles = np.zeros((height, width), np.uint8)
    spawn = None
    finish_x = None
    enemies = []
    for y in range(height):
        row = lines[1 + y]
        if len(row) != width:
            raise LevelError(f"row has {len(row)} glyphs, expected {width}",
                             line=2 + y, column=min(len(row) + 1, width + 1))
        for x, ch in enumerate(row):
            if ch in GLYPH_TILES:
                tiles[y, x] = GLYPH_TILES[ch]
            elif ch == "S":
                if spawn is not None:
                    raise LevelError("duplicate spawn marker 'S'", line=2 + y,
                                     column=x + 1)
                spawn = (x, y)
            elif ch == "F":
                if finish_x is not None:
                    raise LevelError("duplicate finish marker 'F'", line=2 + y,
                                     column=x + 1)
                finish_x = x
            elif ch == "E":
                enemies.append(EnemySpawn(kind="walker", x=x, y=y))
            else:
                raise LevelError(f"unknown tile glyph {ch!r}", line=2 + y,
                                 column=x + 1)
    if spawn is None:
        raise LevelError("missing spawn marker 'S'")
    if finish_x is None:
        finish_x = width - 1
    level = Level(width=width, height=height, tiles=tiles, spawn=spawn,
                  finish_x=finish_x, enemies=tuple(enemies), seed=seed,
                  difficulty=difficulty)
    return level


def _surface_row(tiles, x):
    """Topmost empty row in column x that has solid support directly below."""
    height = tiles.shape[0]
    for y in range(height - 1):
        if tiles[y, x] == K.T_EMPTY and tiles[y + 1, x] in (K.T_SOLID, K.T_BRICK):
            return y
    return None


def _passable(tiles, x, y):
    if x < 0 or x >= tiles.shape[1] or y < 0 or y >= tiles.shape[0]:
        return False
    return tiles[y, x] not in (K.T_SOLID, K.T_BRICK)


def _standable(tiles, x, y):
    return (_passable(tiles, x, y) and _passable(tiles, x, y - 1)
            and 0 <= y + 1 < tiles.shape[0]
            and tiles[y + 1, x] in (K.T_SOLID, K.T_BRICK))


def jump_reachable_tiles(level: Level) -> set[tuple[int, int]]:
    """Standable tiles reachable from spawn under the conservative jump model.

    Breadth-first search where edges go from a standable tile to any standable
    tile at most JUMP_REACH_COLS columns away and at most JUMP_REACH_ROWS_UP
    rows higher; drops of any depth are allowed. This intentionally
    under-approximates the physics, so reachability here implies an actual
    route exists.
    """
    tiles = level.tiles
    start = level.spawn
    if not _standable(tiles, *start):
        return set()
    seen = {start}
    queue = [start]
    while queue:
        x, y = queue.pop()
        for dx in range(-JUMP_REACH_COLS, JUMP_REACH_COLS + 1):
            if dx == 0:
                continue
            nx2 = x + dx
            if nx2 < 0 or nx2 >= level.width:
                continue
            for ny in range(max(0, y - JUMP_REACH_ROWS_UP), level.height - 1):
                if (nx2, ny) not in seen and _standable(tiles, nx2, ny):
                    seen.add((nx2, ny))
                    queue.append((nx2, ny))
    return seen


def validate_level(level: Level) -> None:
    """Raise LevelError unless the finish column is reachable from spawn."""
    if not _standable(level.tiles, *level.spawn):
        raise LevelError(f"spawn tile {level.spawn} is not standable")
    reach = jump_reachable_tiles(level)
    if not any(x >= level.finish_x for x, _ in reach):
        raise LevelError(f"finish column {level.finish_x} unreachable from spawn")
    for e in level.enemies:
        if level.tiles[e.y, e.x] != K.T_EMPTY:
            raise LevelError(f"enemy spawn ({e.x},{e.y}) not on an empty tile")


def generate_level(seed: int, difficulty: int, width: int = DEFAULT_WIDTH) -> Level:
    """Deterministically generate a solvable level.

    Difficulty 0 is flat ground with coin clusters only. Higher difficulties
    add gaps (wider with difficulty), walker enemies, and brick platforms.
    The construction is retried with fresh randomness if it fails validation;
    100 failures indicate a generator bug and raise.
    """
    if difficulty < 0:
        raise ValueError("difficulty must be >= 0")
    if width < 16:
        raise ValueError("width must be >= 16")
    for attempt in range(100):
        rng = np.random.default_rng([seed, difficulty, width, attempt])
        level = _build(rng, seed, difficulty, width)
        try:
            validate_level(level)
        except LevelError:
            continue
        return level
    raise LevelError(
        f"level generation failed validation 100 times (seed={seed}, "
        f"difficulty={difficulty}, width={width})")


def _build(rng, seed, difficulty, width):
    height = DEFAULT_HEIGHT
    tiles = np.zeros((height, width), np.uint8)
    tiles[GROUND_ROW:, :] = K.T_SOLID
    spawn = (1, GROUND_ROW - 1)
    finish_x = width - 1
    scale = width / DEFAULT_WIDTH

    protected = set(range(0, 6)) | set(range(width - 8, width))
    gap_cols: set[int] = set()
    if difficulty > 0:
        n_gaps = max(1, round((2 + difficulty) * scale))
        max_gap = min(2 + (difficulty - 1), 4)
        placed = 0
        for _ in range(200):
            if placed >= n_gaps:
                break
            gw = int(rng.integers(2, max_gap + 1))
            gx = int(rng.integers(6, width - 8 - gw))
            span = set(range(gx - 6, gx + gw + 6))
            if span & (gap_cols | protected):
                continue
            for c in range(gx, gx + gw):
                tiles[GROUND_ROW:, c] = K.T_EMPTY
                gap_cols.add(c)
            placed += 1

    platforms = []
    if difficulty > 0:
        n_plat = max(1, round(difficulty * scale))
        for _ in range(100):
            if len(platforms) >= n_plat:
                break
            pl = int(rng.integers(3, 6))
            px = int(rng.integers(8, width - 10 - pl))
            cols = set(range(px - 2, px + pl + 2))
            if cols & gap_cols or any(
                    cols & set(range(qx - 2, qx + ql + 2)) for qx, ql in platforms):
                continue
            tiles[GROUND_ROW - 4, px:px + pl] = K.T_BRICK
            platforms.append((px, pl))

    enemies = []
    if difficulty > 0:
        n_enemies = max(1, round(2 * difficulty * scale))
        used = set()
        for _ in range(200):
            if len(enemies) >= n_enemies:
                break
            ecol = int(rng.integers(14, width - 10))
            span = set(range(ecol - 3, ecol + 4))
            if span & gap_cols or span & used or ecol in protected:
                continue
            if any(px - 2 <= ecol < px + pl + 2 for px, pl in platforms):
                continue
            enemies.append(EnemySpawn(kind="walker", x=ecol, y=GROUND_ROW - 1))
            used |= span
        enemies.sort(key=lambda e: e.x)

    reserved = {(e.x, e.y) for e in enemies} | {spawn, (finish_x, GROUND_ROW - 1)}
    n_clusters = 4 + 2 * difficulty
    n_clusters = max(2, round(n_clusters * scale))
    for _ in range(n_clusters * 10):
        if n_clusters == 0:
            break
        size = int(rng.integers(2, 5))
        cx = int(rng.integers(4, width - 6 - size))
        row = GROUND_ROW - 2 if rng.random() < 0.7 else GROUND_ROW - 3
        cols = range(cx, cx + size)
        if any(c in gap_cols for c in cols):
            continue
        if any(tiles[row, c] != K.T_EMPTY or (c, row) in reserved for c in cols):
            continue
        if any(tiles[row + 1, c] == K.T_BRICK for c in cols):
            continue
        for c in cols:
            tiles[row, c] = K.T_COIN
        n_clusters -= 1
    for px, pl in platforms:
        for c in range(px, px + pl):
            if rng.random() < 0.6:
                tiles[GROUND_ROW - 5, c] = K.T_COIN

    return Level(width=width, height=height, tiles=tiles, spawn=spawn,
                 finish_x=finish_x, enemies=tuple(enemies), seed=seed,
                 difficulty=difficulty)
