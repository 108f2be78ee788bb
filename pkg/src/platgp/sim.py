"""Object-level simulator API: world state values, step/observe, episodes.

The heavy lifting happens in :mod:`platgp.kernels`; this module packs and
unpacks the array representation so callers get immutable-feeling values with
named fields. A single episode is strictly sequential; world states are plain
values and episodes never share mutable state, so arbitrarily many episodes
may run concurrently.
"""

from dataclasses import dataclass
from typing import Union

import numpy as np

from . import kernels as K
from .control import ControlVector
from .levels import Level

EVENT_NAMES = ("JumpStart", "Land", "DirChange", "CoinCollected", "EnemyStomped",
               "BrickBroken", "ShotFired", "Damaged", "Death", "Win", "Milestone")
EVENT_KINDS = {name: i for i, name in enumerate(EVENT_NAMES)}

OUTCOME_NAMES = {K.OUT_WIN: "Win", K.OUT_DEATH: "Death", K.OUT_TIMEOUT: "Timeout"}
OUTCOME_CODES = {v: k for k, v in OUTCOME_NAMES.items()}

SIZE_SMALL = 0
SIZE_TALL = 1

DEFAULT_FRAME_BUDGET = 2000  # 200 time units at 10 frames per unit


class SimContractError(RuntimeError):
    """A caller violated a simulator precondition (e.g. stepped a dead world)."""


@dataclass(frozen=True)
class Event:
    kind: int
    frame: int
    payload: int

    @property
    def name(self) -> str:
        return EVENT_NAMES[self.kind]

    def symbol(self) -> int:
        """Symbol code for the trace metric: kind, plus index for milestones."""
        if self.kind == K.EV_MILESTONE:
            return (self.kind << 16) | (self.payload // K.MILESTONE_COLS)
        return self.kind << 16


@dataclass(frozen=True)
class AgentState:
    x: int
    y: int
    vx: int
    vy: int
    size: int
    on_ground: bool
    jump_hold_frames: int
    shoot_cooldown: int
    alive: bool


@dataclass(frozen=True)
class EnemyState:
    x: int
    y: int
    direction: int
    alive: bool


@dataclass(frozen=True)
class ProjectileState:
    x: int
    y: int
    vx: int


@dataclass(frozen=True)
class Observation:
    """6x6 sensor grids around the agent's tile, offsets dx, dy in [-3, 2].

    Grids are indexed [dx + 3, dy + 3]; cells outside the level read False.
    """

    coin_grid: np.ndarray
    enemy_grid: np.ndarray
    breakable_grid: np.ndarray
    is_tall: bool
    can_jump: bool
    can_shoot: bool

    def coin_at(self, dx: int, dy: int) -> bool:
        return bool(self.coin_grid[dx - K.OBS_LO, dy - K.OBS_LO])

    def enemy_at(self, dx: int, dy: int) -> bool:
        return bool(self.enemy_grid[dx - K.OBS_LO, dy - K.OBS_LO])

    def breakable_at(self, dx: int, dy: int) -> bool:
        return bool(self.breakable_grid[dx - K.OBS_LO, dy - K.OBS_LO])


@dataclass(frozen=True)
class WorldState:
    """Full simulation state after some number of frames.

    ``events`` holds only the events emitted by the most recent step. The
    working tile grid and entity arrays are private copies; ``step`` returns a
    fresh value and never mutates its input.
    """

    level: Level
    frame: int
    agent: AgentState
    enemies: tuple[EnemyState, ...]
    projectiles: tuple[ProjectileState, ...]
    score: int
    events: tuple[Event, ...]
    max_x: int
    outcome: int  # OUT_RUNNING until the episode ends
    _tiles: np.ndarray
    _state: np.ndarray
    _enemies: np.ndarray
    _projectiles: np.ndarray

    @classmethod
    def initial(cls, level: Level) -> "WorldState":
        state = np.zeros(K.NSTATE, np.int64)
        sx, sy = level.spawn
        state[K.SX] = sx * K.FP + K.FP // 2
        state[K.SY] = (sy + 1) * K.FP
        state[K.SSIZE] = SIZE_TALL
        state[K.SGROUND] = 1
        state[K.SALIVE] = 1
        state[K.SFACING] = 1
        state[K.SMAXX] = state[K.SX]
        state[K.SMILESTONE] = sx // K.MILESTONE_COLS
        enemies = np.zeros((len(level.enemies), 4), np.int64)
        for i, e in enumerate(level.enemies):
            enemies[i, K.EX] = e.x * K.FP + K.FP // 2
            enemies[i, K.EY] = (e.y + 1) * K.FP
            enemies[i, K.EDIR] = -1
            enemies[i, K.EALIVE] = 1
        projectiles = np.zeros((K.PROJ_CAP, 4), np.int64)
        tiles = level.tiles.copy()
        tiles.setflags(write=True)
        return cls._from_arrays(level, tiles, state, enemies, projectiles, ())

    @classmethod
    def _from_arrays(cls, level, tiles, state, enemies, projectiles, events):
        agent = AgentState(
            x=int(state[K.SX]), y=int(state[K.SY]),
            vx=int(state[K.SVX]), vy=int(state[K.SVY]),
            size=int(state[K.SSIZE]), on_ground=bool(state[K.SGROUND]),
            jump_hold_frames=int(state[K.SJUMPH]),
            shoot_cooldown=int(state[K.SSHOOTCD]), alive=bool(state[K.SALIVE]))
        live_enemies = tuple(
            EnemyState(x=int(enemies[i, K.EX]), y=int(enemies[i, K.EY]),
                       direction=int(enemies[i, K.EDIR]),
                       alive=bool(enemies[i, K.EALIVE]))
            for i in range(enemies.shape[0]))
        live_projectiles = tuple(
            ProjectileState(x=int(projectiles[i, K.PX]), y=int(projectiles[i, K.PY]),
                            vx=int(projectiles[i, K.PVX]))
            for i in range(projectiles.shape[0]) if projectiles[i, K.PALIVE])
        return cls(level=level, frame=int(state[K.SFRAME]), agent=agent,
                   enemies=live_enemies, projectiles=live_projectiles,
                   score=int(state[K.SSCORE]), events=tuple(events),
                   max_x=int(state[K.SMAXX]), outcome=int(state[K.SOUTCOME]),
                   _tiles=tiles, _state=state, _enemies=enemies,
                   _projectiles=projectiles)

    def tile(self, x: int, y: int) -> int:
        """Current working tile (coins collected so far read as empty)."""
        return int(self._tiles[y, x])


def step(world: WorldState, control: Union[ControlVector, int]) -> WorldState:
    """Advance one frame. Pure: equal inputs give bit-identical outputs."""
    if not world.agent.alive or world.outcome != K.OUT_RUNNING:
        raise SimContractError("cannot step a dead or finished world")
    bits = int(control)
    if not 0 <= bits <= 63:
        raise SimContractError(f"control encoding out of range 0..63: {bits}")
    tiles = world._tiles.copy()
    state = world._state.copy()
    enemies = world._enemies.copy()
    projectiles = world._projectiles.copy()
    ev = np.zeros((64, 3), np.int64)
    ev_n = K.step_frame(tiles, world.level.finish_x, state, enemies,
                        projectiles, bits, ev, 0)
    events = tuple(Event(kind=int(ev[i, 0]), frame=int(ev[i, 1]),
                         payload=int(ev[i, 2])) for i in range(ev_n))
    return WorldState._from_arrays(world.level, tiles, state, enemies,
                                   projectiles, events)


def observe(world: WorldState) -> Observation:
    """Snapshot the 6x6 sensor grids and agent flags for the current frame."""
    if not world.agent.alive:
        raise SimContractError("cannot observe a dead agent")
    coin_g = np.zeros((6, 6), np.uint8)
    enemy_g = np.zeros((6, 6), np.uint8)
    break_g = np.zeros((6, 6), np.uint8)
    K.fill_observation(world._tiles, world._state, world._enemies,
                       coin_g, enemy_g, break_g)
    return Observation(coin_grid=coin_g, enemy_grid=enemy_g,
                       breakable_grid=break_g,
                       is_tall=world.agent.size == SIZE_TALL,
                       can_jump=world.agent.on_ground and world.agent.alive,
                       can_shoot=world.agent.shoot_cooldown == 0)


@dataclass(frozen=True)
class EpisodeResult:
    outcome: str  # "Win" | "Death" | "Timeout"
    score: int
    frames_used: int
    max_x: int
    inputs: np.ndarray  # one control encoding per frame actually played
    events: tuple[Event, ...]

    @property
    def won(self) -> bool:
        return self.outcome == "Win"


def _initial_arrays(level: Level):
    w = WorldState.initial(level)
    return w._tiles, w._state, w._enemies, w._projectiles


def _event_capacity(budget: int) -> int:
    return 8 * budget + 64


def run_episode(level: Level, controller, budget: int = DEFAULT_FRAME_BUDGET,
                ) -> EpisodeResult:
    """Run observe -> controller -> step until Win, Death or frame budget.

    ``controller`` is either a per-frame callable Observation -> ControlVector
    (or int encoding), or a Chromosome, in which case the whole episode runs
    inside the compiled kernel.
    """
    if budget <= 0:
        raise ValueError("frame budget must be positive")
    program = getattr(controller, "program", None)
    if program is not None:
        return _run_episode_program(level, program(), budget)
    world = WorldState.initial(level)
    inputs = np.zeros(budget, np.int64)
    events: list[Event] = []
    while world.outcome == K.OUT_RUNNING and world.frame < budget:
        obs = observe(world)
        bits = int(controller(obs))
        if not 0 <= bits <= 63:
            raise SimContractError(f"controller returned encoding {bits}, "
                                   "outside 0..63")
        inputs[world.frame] = bits
        world = step(world, bits)
        events.extend(world.events)
    outcome = world.outcome if world.outcome != K.OUT_RUNNING else K.OUT_TIMEOUT
    return EpisodeResult(outcome=OUTCOME_NAMES[outcome], score=world.score,
                         frames_used=world.frame, max_x=world.max_x,
                         inputs=inputs[:world.frame].copy(),
                         events=tuple(events))


def _run_episode_program(level: Level, program, budget: int) -> EpisodeResult:
    op, val, c0, c1, c2 = program
    tiles, state, enemies, projectiles = _initial_arrays(level)
    inputs = np.zeros(budget, np.int64)
    ev = np.zeros((_event_capacity(budget), 3), np.int64)
    ev_n = K.run_episode_program(tiles, level.finish_x, state, enemies,
                                 projectiles, budget, op, val, c0, c1, c2,
                                 inputs, ev)
    return _pack_result(state, inputs, ev, ev_n)


def replay_inputs(level: Level, inputs, budget: int = DEFAULT_FRAME_BUDGET,
                  ) -> EpisodeResult:
    """Re-run a recorded input sequence (kernel fast path).

    Plays min(len(inputs), budget) frames unless a terminal state is reached
    earlier; a non-terminal end is reported as Timeout.
    """
    inputs = np.asarray(inputs, np.int64)
    if inputs.size and (inputs.min() < 0 or inputs.max() > 63):
        raise SimContractError("recorded inputs contain encodings outside 0..63")
    tiles, state, enemies, projectiles = _initial_arrays(level)
    ev = np.zeros((_event_capacity(min(len(inputs), budget) + 1), 3), np.int64)
    ev_n = K.run_episode_inputs(tiles, level.finish_x, state, enemies,
                                projectiles, budget, inputs, ev)
    return _pack_result(state, inputs, ev, ev_n)


def _pack_result(state, inputs, ev, ev_n) -> EpisodeResult:
    frames = int(state[K.SFRAME])
    events = tuple(Event(kind=int(ev[i, 0]), frame=int(ev[i, 1]),
                         payload=int(ev[i, 2])) for i in range(ev_n))
    return EpisodeResult(outcome=OUTCOME_NAMES[int(state[K.SOUTCOME])],
                         score=int(state[K.SSCORE]), frames_used=frames,
                         max_x=int(state[K.SMAXX]),
                         inputs=np.asarray(inputs[:frames], np.int64).copy(),
                         events=events)
