"""Hot loops: simulator frames, controller-program interpretation, edit distance.

Everything in this module operates on plain numpy arrays and integers so the
same code runs either compiled by numba or as ordinary Python. The backend is
picked once at import time from the ``PLATGP_BACKEND`` environment variable
("numba" when numba is importable, "python" forces the uncompiled fallback).
Because the two backends execute the same statements and the physics is pure
integer fixed-point (1 tile = 256 units), results are bit-identical across
backends, platforms and thread counts.

State layout, tile codes, event kinds and program opcodes are defined here and
shared with the object-level wrappers in :mod:`platgp.sim` and
:mod:`platgp.genes`.
"""

import os

import numpy as np

try:
    import numba

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    _HAVE_NUMBA = False

BACKEND = os.environ.get("PLATGP_BACKEND", "").strip().lower()
if not BACKEND:
    BACKEND = "numba" if _HAVE_NUMBA else "python"
if BACKEND not in ("numba", "python"):
    raise RuntimeError(f"PLATGP_BACKEND must be 'numba' or 'python', got {BACKEND!r}")
if BACKEND == "numba" and not _HAVE_NUMBA:
    BACKEND = "python"


def _jit(fn):
    if BACKEND == "numba":
        return numba.njit(cache=True, nogil=True)(fn)
    return fn


# --- fixed point ---
FP = 256  # units per tile

# --- tile codes ---
T_EMPTY = 0
T_SOLID = 1
T_BRICK = 2
T_COIN = 3

# --- control vector bits (canonical encoding 0..63) ---
BIT_LEFT = 1
BIT_RIGHT = 2
BIT_UP = 4
BIT_DOWN = 8
BIT_JUMP = 16
BIT_FIRE = 32  # shoot|run shared bit

# --- physics constants (positions and speeds in 1/256-tile units) ---
WALK_ACCEL = 4
RUN_ACCEL = 8
FRICTION = 2
MAX_WALK = 40
MAX_RUN = 80
GRAVITY = 8
GRAVITY_HELD = 2  # gravity/4 while the jump button is held after takeoff
JUMP_IMPULSE = -120
JUMP_HOLD_MAX = 8  # frames of reduced gravity
MAX_FALL = 240  # terminal fall speed; < FP so collision never skips a row
ENEMY_SPEED = 16
SHOOT_COOLDOWN = 24
PROJECTILE_SPEED = 96
STOMP_BOUNCE = -60
INVULN_FRAMES = 32  # grace period after taking a hit

AGENT_W = 192
AGENT_H_SMALL = 224
AGENT_H_TALL = 480
ENEMY_W = 192
ENEMY_H = 224
PROJ_CAP = 64

# --- score values (score always equals the sum over emitted events) ---
SCORE_COIN = 100
SCORE_STOMP = 80
SCORE_BRICK = 50

# --- event kinds; same-frame ties are ordered by this enumeration ---
EV_JUMP_START = 0
EV_LAND = 1
EV_DIR_CHANGE = 2
EV_COIN = 3
EV_STOMP = 4
EV_BRICK = 5
EV_SHOT = 6
EV_DAMAGED = 7
EV_DEATH = 8
EV_WIN = 9
EV_MILESTONE = 10
N_EVENT_KINDS = 11

MILESTONE_COLS = 16  # a milestone event every 16 columns of new progress

# --- outcome codes ---
OUT_RUNNING = 0
OUT_WIN = 1
OUT_DEATH = 2
OUT_TIMEOUT = 3

# --- agent/world state vector slots (int64) ---
SX = 0
SY = 1  # feet y; y grows downward, row 0 is the top of the level
SVX = 2
SVY = 3
SSIZE = 4  # 0 small, 1 tall
SGROUND = 5
SJUMPH = 6
SSHOOTCD = 7
SALIVE = 8
SFRAME = 9
SSCORE = 10
SMAXX = 11
SFACING = 12  # +-1, last non-zero horizontal input
SPREVFIRE = 13
SMILESTONE = 14  # index of the last milestone emitted
SINVULN = 15
SOUTCOME = 16
NSTATE = 17

# --- enemy array columns ---
EX = 0
EY = 1
EDIR = 2
EALIVE = 3

# --- projectile array columns ---
PX = 0
PY = 1
PVX = 2
PALIVE = 3

# --- program opcodes (tree genes flattened to preorder arrays) ---
OP_IFELSE = 0
OP_AND = 1
OP_OR = 2
OP_NOT = 3
OP_SUB = 4
OP_IS_COIN_AT = 5
OP_IS_ENEMY_AT = 6
OP_IS_BREAKABLE_AT = 7
OP_SEQ2 = 8
OP_SEQ3 = 9
OP_CONST = 10
OP_LEFT = 11
OP_RIGHT = 12
OP_UP = 13
OP_DOWN = 14
OP_JUMP = 15
OP_SHOOT = 16
OP_RUN = 17
OP_WAIT = 18
OP_IS_TALL = 19
OP_CAN_JUMP = 20
OP_CAN_SHOOT = 21

CONST_MIN = -6
CONST_MAX = 6

# observation window: relative tile offsets dx, dy in [-3, 2]
OBS_LO = -3
OBS_HI = 2


@_jit
def _solid(tiles, tx, ty):
    if tx < 0 or tx >= tiles.shape[1] or ty < 0 or ty >= tiles.shape[0]:
        return False
    t = tiles[ty, tx]
    return t == T_SOLID or t == T_BRICK


@_jit
def _emit(ev, ev_n, kind, frame, payload):
    # capacity is sized generously by callers; a full buffer drops the event
    # rather than corrupting the count
    if ev_n >= ev.shape[0]:
        return ev_n
    ev[ev_n, 0] = kind
    ev[ev_n, 1] = frame
    ev[ev_n, 2] = payload
    return ev_n + 1


@_jit
def agent_tile(state):
    """Tile containing the centre of the agent's bounding box."""
    h = AGENT_H_TALL if state[SSIZE] == 1 else AGENT_H_SMALL
    return state[SX] >> 8, (state[SY] - h // 2) >> 8


@_jit
def fill_observation(tiles, state, enemies, coin_g, enemy_g, break_g):
    """Populate the three 6x6 grids, indexed [dx+3, dy+3]; out-of-level cells stay 0."""
    atx, aty = agent_tile(state)
    w = tiles.shape[1]
    h = tiles.shape[0]
    for dx in range(OBS_LO, OBS_HI + 1):
        for dy in range(OBS_LO, OBS_HI + 1):
            tx = atx + dx
            ty = aty + dy
            coin = 0
            brk = 0
            if 0 <= tx < w and 0 <= ty < h:
                t = tiles[ty, tx]
                if t == T_COIN:
                    coin = 1
                elif t == T_BRICK:
                    brk = 1
            coin_g[dx - OBS_LO, dy - OBS_LO] = coin
            break_g[dx - OBS_LO, dy - OBS_LO] = brk
            enemy_g[dx - OBS_LO, dy - OBS_LO] = 0
    for i in range(enemies.shape[0]):
        if enemies[i, EALIVE] == 0:
            continue
        etx = enemies[i, EX] >> 8
        ety = (enemies[i, EY] - ENEMY_H // 2) >> 8
        dx = etx - atx
        dy = ety - aty
        if OBS_LO <= dx <= OBS_HI and OBS_LO <= dy <= OBS_HI:
            enemy_g[dx - OBS_LO, dy - OBS_LO] = 1


@_jit
def eval_program(op, val, c0, c1, c2, coin_g, enemy_g, break_g,
                 is_tall, can_jump, can_shoot, nstk, sstk, t0stk, t1stk):
    """Interpret a flattened gene tree against one observation.

    Returns the 6-bit control vector accumulated over the tree: action
    terminals contribute their bit, Seq nodes merge children left to right,
    IfElse evaluates its condition and then exactly one branch. Bool nodes
    yield 0/1 and Int nodes a value in [-6, 6]. Iterative with an explicit
    stack (depth cap is 12) so it compiles under numba.
    """
    sp = 0
    nstk[0] = 0
    sstk[0] = 0
    ret = 0
    while sp >= 0:
        n = nstk[sp]
        st = sstk[sp]
        o = op[n]
        if o == OP_CONST:
            ret = val[n]
            sp -= 1
        elif o == OP_LEFT:
            ret = BIT_LEFT
            sp -= 1
        elif o == OP_RIGHT:
            ret = BIT_RIGHT
            sp -= 1
        elif o == OP_UP:
            ret = BIT_UP
            sp -= 1
        elif o == OP_DOWN:
            ret = BIT_DOWN
            sp -= 1
        elif o == OP_JUMP:
            ret = BIT_JUMP
            sp -= 1
        elif o == OP_SHOOT or o == OP_RUN:
            ret = BIT_FIRE
            sp -= 1
        elif o == OP_WAIT:
            ret = 0
            sp -= 1
        elif o == OP_IS_TALL:
            ret = is_tall
            sp -= 1
        elif o == OP_CAN_JUMP:
            ret = can_jump
            sp -= 1
        elif o == OP_CAN_SHOOT:
            ret = can_shoot
            sp -= 1
        elif o == OP_NOT:
            if st == 0:
                sstk[sp] = 1
                sp += 1
                nstk[sp] = c0[n]
                sstk[sp] = 0
            else:
                ret = 1 - ret
                sp -= 1
        elif o == OP_IFELSE:
            if st == 0:
                sstk[sp] = 1
                sp += 1
                nstk[sp] = c0[n]
                sstk[sp] = 0
            elif st == 1:
                sstk[sp] = 2
                branch = c1[n] if ret != 0 else c2[n]
                sp += 1
                nstk[sp] = branch
                sstk[sp] = 0
            else:
                sp -= 1  # ret already holds the branch value
        elif o == OP_SEQ3:
            if st == 0:
                sstk[sp] = 1
                sp += 1
                nstk[sp] = c0[n]
                sstk[sp] = 0
            elif st == 1:
                t0stk[sp] = ret
                sstk[sp] = 2
                sp += 1
                nstk[sp] = c1[n]
                sstk[sp] = 0
            elif st == 2:
                t1stk[sp] = ret
                sstk[sp] = 3
                sp += 1
                nstk[sp] = c2[n]
                sstk[sp] = 0
            else:
                ret = t0stk[sp] | t1stk[sp] | ret
                sp -= 1
        else:
            # remaining ops are binary: And, Or, Sub, sensors, Seq2
            if st == 0:
                sstk[sp] = 1
                sp += 1
                nstk[sp] = c0[n]
                sstk[sp] = 0
            elif st == 1:
                t0stk[sp] = ret
                sstk[sp] = 2
                sp += 1
                nstk[sp] = c1[n]
                sstk[sp] = 0
            else:
                a = t0stk[sp]
                b = ret
                if o == OP_AND:
                    ret = 1 if (a != 0 and b != 0) else 0
                elif o == OP_OR:
                    ret = 1 if (a != 0 or b != 0) else 0
                elif o == OP_SUB:
                    s = a - b
                    if s < CONST_MIN:
                        s = CONST_MIN
                    elif s > CONST_MAX:
                        s = CONST_MAX
                    ret = s
                elif o == OP_SEQ2:
                    ret = a | b
                else:
                    # sensors: a = dx, b = dy; false outside the 6x6 window
                    if OBS_LO <= a <= OBS_HI and OBS_LO <= b <= OBS_HI:
                        if o == OP_IS_COIN_AT:
                            ret = coin_g[a - OBS_LO, b - OBS_LO]
                        elif o == OP_IS_ENEMY_AT:
                            ret = enemy_g[a - OBS_LO, b - OBS_LO]
                        else:
                            ret = break_g[a - OBS_LO, b - OBS_LO]
                    else:
                        ret = 0
                sp -= 1
    return ret & 63


@_jit
def step_frame(tiles, finish_x, state, enemies, projectiles, bits, ev, ev_n):
    """Advance the world exactly one frame; returns the new event count.

    Mutates tiles (coins collected, bricks broken), state, enemies and
    projectiles in place and appends this frame's events to ``ev``. The update
    order is fixed: horizontal control, jump, gravity, axis-separated
    collision, enemy patrol, interactions, projectiles, progress/win
    bookkeeping. Same-frame events are sorted by kind before returning.
    """
    if state[SALIVE] == 0 or state[SOUTCOME] != OUT_RUNNING:
        return ev_n

    w = tiles.shape[1]
    hgt = tiles.shape[0]
    frame = state[SFRAME]
    start_ev = ev_n

    left = bits & 1
    right = (bits >> 1) & 1
    down = (bits >> 3) & 1
    jump = (bits >> 4) & 1
    fire = (bits >> 5) & 1

    x = state[SX]
    y = state[SY]
    vx = state[SVX]
    vy = state[SVY]
    tall = state[SSIZE] == 1
    h = AGENT_H_TALL if tall else AGENT_H_SMALL
    half = AGENT_W // 2
    on_ground = state[SGROUND] == 1
    jh = state[SJUMPH]

    # (1) horizontal control; ducking (down while tall) blocks acceleration
    din = right - left
    if down == 1 and tall:
        din = 0
    if din != 0 and din != state[SFACING]:
        ev_n = _emit(ev, ev_n, EV_DIR_CHANGE, frame, din)
        state[SFACING] = din
    maxspd = MAX_RUN if fire == 1 else MAX_WALK
    if vx > maxspd:
        vx = maxspd
    elif vx < -maxspd:
        vx = -maxspd
    if din != 0:
        vx += din * (RUN_ACCEL if fire == 1 else WALK_ACCEL)
        if vx > maxspd:
            vx = maxspd
        elif vx < -maxspd:
            vx = -maxspd
    elif vx > 0:
        vx -= FRICTION if vx > FRICTION else vx
    elif vx < 0:
        vx += FRICTION if -vx > FRICTION else -vx

    # (2) jump: impulse when grounded, reduced gravity while held after takeoff
    g = GRAVITY
    if jump == 1 and on_ground:
        vy = JUMP_IMPULSE
        on_ground = False
        jh = 1
        g = GRAVITY_HELD
        ev_n = _emit(ev, ev_n, EV_JUMP_START, frame, 0)
    elif jump == 1 and not on_ground and 0 < jh < JUMP_HOLD_MAX and vy < 0:
        jh += 1
        g = GRAVITY_HELD
    else:
        jh = 0

    # (3) gravity with terminal fall speed
    vy += g
    if vy > MAX_FALL:
        vy = MAX_FALL

    # (4) axis-separated collision, horizontal first
    nx = x + vx
    if nx < half:
        nx = half
        vx = 0
    elif nx > w * FP - half:
        nx = w * FP - half
        vx = 0
    ry0 = (y - h) >> 8
    ry1 = (y - 1) >> 8
    if vx > 0:
        lead = (nx + half - 1) >> 8
        for ry in range(ry0, ry1 + 1):
            if _solid(tiles, lead, ry):
                nx = lead * FP - half
                vx = 0
                break
    elif vx < 0:
        lead = (nx - half) >> 8
        for ry in range(ry0, ry1 + 1):
            if _solid(tiles, lead, ry):
                nx = (lead + 1) * FP + half
                vx = 0
                break

    move_vy = vy
    y_pre = y
    ny = y + vy
    c0_ = (nx - half) >> 8
    c1_ = (nx + half - 1) >> 8
    was_ground = state[SGROUND] == 1
    if vy > 0:
        tr = (ny - 1) >> 8
        landed = False
        for c in range(c0_, c1_ + 1):
            if _solid(tiles, c, tr):
                landed = True
                break
        if landed:
            ny = tr * FP
            vy = 0
            jh = 0
            on_ground = True
            if not was_ground:
                ev_n = _emit(ev, ev_n, EV_LAND, frame, 0)
        else:
            on_ground = False
            if ny >= hgt * FP:
                state[SALIVE] = 0
                state[SOUTCOME] = OUT_DEATH
                ev_n = _emit(ev, ev_n, EV_DEATH, frame, 0)
    elif vy < 0:
        tr = (ny - h) >> 8
        bumped = False
        for c in range(c0_, c1_ + 1):
            if _solid(tiles, c, tr):
                bumped = True
                if tiles[tr, c] == T_BRICK and tall:
                    tiles[tr, c] = T_EMPTY
                    state[SSCORE] += SCORE_BRICK
                    ev_n = _emit(ev, ev_n, EV_BRICK, frame, c)
        if bumped:
            ny = (tr + 1) * FP + h
            vy = 0
        on_ground = False
    x = nx
    y = ny

    # (5) enemy patrol: reverse at walls, ledges and level bounds
    for i in range(enemies.shape[0]):
        if enemies[i, EALIVE] == 0:
            continue
        ed = enemies[i, EDIR]
        ex = enemies[i, EX] + ed * ENEMY_SPEED
        ehalf = ENEMY_W // 2
        if ed > 0:
            fcol = (ex + ehalf - 1) >> 8
        else:
            fcol = (ex - ehalf) >> 8
        ey = enemies[i, EY]
        body_row = (ey - 1) >> 8
        below_row = ey >> 8
        if (fcol < 0 or fcol >= w or _solid(tiles, fcol, body_row)
                or not _solid(tiles, fcol, below_row)):
            enemies[i, EDIR] = -ed
        else:
            enemies[i, EX] = ex

    # (6) interactions
    if state[SALIVE] == 1:
        r0 = (y - h) >> 8
        r1 = (y - 1) >> 8
        for r in range(r0, r1 + 1):
            for c in range(c0_, c1_ + 1):
                if 0 <= c < w and 0 <= r < hgt and tiles[r, c] == T_COIN:
                    tiles[r, c] = T_EMPTY
                    state[SSCORE] += SCORE_COIN
                    ev_n = _emit(ev, ev_n, EV_COIN, frame, c)
        for i in range(enemies.shape[0]):
            if enemies[i, EALIVE] == 0 or state[SALIVE] == 0:
                continue
            ex = enemies[i, EX]
            ey = enemies[i, EY]
            ehalf = ENEMY_W // 2
            dxabs = x - ex
            if dxabs < 0:
                dxabs = -dxabs
            overlap = dxabs < half + ehalf and (y - h) < ey and (ey - ENEMY_H) < y
            if not overlap:
                continue
            # stomp: was falling and entered from above the enemy's midpoint
            if move_vy > 0 and y_pre < ey - ENEMY_H // 2:
                enemies[i, EALIVE] = 0
                state[SSCORE] += SCORE_STOMP
                ev_n = _emit(ev, ev_n, EV_STOMP, frame, i)
                vy = STOMP_BOUNCE
                on_ground = False
            elif state[SINVULN] == 0:
                if tall:
                    state[SSIZE] = 0
                    state[SINVULN] = INVULN_FRAMES
                    ev_n = _emit(ev, ev_n, EV_DAMAGED, frame, 0)
                else:
                    state[SALIVE] = 0
                    state[SOUTCOME] = OUT_DEATH
                    ev_n = _emit(ev, ev_n, EV_DEATH, frame, 0)

    # (7) projectiles: fire on the rising edge of bit 5, then move everything
    if (state[SALIVE] == 1 and fire == 1 and state[SPREVFIRE] == 0
            and state[SSHOOTCD] == 0):
        for i in range(projectiles.shape[0]):
            if projectiles[i, PALIVE] == 0:
                projectiles[i, PX] = x + state[SFACING] * half
                # fired at walker height so shots can hit ground enemies
                projectiles[i, PY] = y - AGENT_H_SMALL // 2
                projectiles[i, PVX] = state[SFACING] * PROJECTILE_SPEED
                projectiles[i, PALIVE] = 1
                state[SSHOOTCD] = SHOOT_COOLDOWN
                ev_n = _emit(ev, ev_n, EV_SHOT, frame, state[SFACING])
                break
    for i in range(projectiles.shape[0]):
        if projectiles[i, PALIVE] == 0:
            continue
        px = projectiles[i, PX] + projectiles[i, PVX]
        py = projectiles[i, PY]
        projectiles[i, PX] = px
        if px < 0 or px >= w * FP or _solid(tiles, px >> 8, py >> 8):
            projectiles[i, PALIVE] = 0
            continue
        for j in range(enemies.shape[0]):
            if enemies[j, EALIVE] == 0:
                continue
            dxabs = px - enemies[j, EX]
            if dxabs < 0:
                dxabs = -dxabs
            ey = enemies[j, EY]
            if dxabs < ENEMY_W // 2 and (ey - ENEMY_H) <= py < ey:
                enemies[j, EALIVE] = 0
                projectiles[i, PALIVE] = 0
                break

    # (8) bookkeeping: milestones, progress, win, cooldowns, frame count
    if state[SALIVE] == 1:
        tx = x >> 8
        m = tx // MILESTONE_COLS
        while m > state[SMILESTONE]:
            state[SMILESTONE] += 1
            ev_n = _emit(ev, ev_n, EV_MILESTONE, frame,
                         state[SMILESTONE] * MILESTONE_COLS)
        if x > state[SMAXX]:
            state[SMAXX] = x
        if tx >= finish_x:
            state[SOUTCOME] = OUT_WIN
            ev_n = _emit(ev, ev_n, EV_WIN, frame, 0)
    if state[SSHOOTCD] > 0:
        state[SSHOOTCD] -= 1
    if state[SINVULN] > 0:
        state[SINVULN] -= 1
    state[SPREVFIRE] = fire
    state[SX] = x
    state[SY] = y
    state[SVX] = vx
    state[SVY] = vy
    state[SGROUND] = 1 if on_ground else 0
    state[SJUMPH] = jh
    state[SFRAME] = frame + 1

    # stable sort of this frame's events by kind
    i = start_ev + 1
    top = ev_n if ev_n < ev.shape[0] else ev.shape[0]
    while i < top:
        j = i
        while j > start_ev and ev[j - 1, 0] > ev[j, 0]:
            for k in range(3):
                tmp = ev[j - 1, k]
                ev[j - 1, k] = ev[j, k]
                ev[j, k] = tmp
            j -= 1
        i += 1
    return ev_n


@_jit
def run_episode_program(tiles, finish_x, state, enemies, projectiles, budget,
                        op, val, c0, c1, c2, inputs_out, ev):
    """Run a whole episode driven by a flattened gene tree; returns event count."""
    coin_g = np.zeros((6, 6), np.uint8)
    enemy_g = np.zeros((6, 6), np.uint8)
    break_g = np.zeros((6, 6), np.uint8)
    nstk = np.empty(64, np.int64)
    sstk = np.empty(64, np.int64)
    t0stk = np.empty(64, np.int64)
    t1stk = np.empty(64, np.int64)
    ev_n = 0
    while state[SFRAME] < budget and state[SOUTCOME] == OUT_RUNNING:
        fill_observation(tiles, state, enemies, coin_g, enemy_g, break_g)
        is_tall = 1 if state[SSIZE] == 1 else 0
        can_jump = 1 if (state[SGROUND] == 1 and state[SALIVE] == 1) else 0
        can_shoot = 1 if state[SSHOOTCD] == 0 else 0
        bits = eval_program(op, val, c0, c1, c2, coin_g, enemy_g, break_g,
                            is_tall, can_jump, can_shoot,
                            nstk, sstk, t0stk, t1stk)
        inputs_out[state[SFRAME]] = bits
        ev_n = step_frame(tiles, finish_x, state, enemies, projectiles,
                          bits, ev, ev_n)
    if state[SOUTCOME] == OUT_RUNNING:
        state[SOUTCOME] = OUT_TIMEOUT
    return ev_n


@_jit
def run_episode_inputs(tiles, finish_x, state, enemies, projectiles, budget,
                       inputs, ev):
    """Replay a recorded input sequence; stops at the end of inputs, terminal
    state, or the frame budget, whichever comes first."""
    nframes = inputs.shape[0]
    if nframes > budget:
        nframes = budget
    ev_n = 0
    while state[SFRAME] < nframes and state[SOUTCOME] == OUT_RUNNING:
        bits = inputs[state[SFRAME]]
        ev_n = step_frame(tiles, finish_x, state, enemies, projectiles,
                          bits, ev, ev_n)
    if state[SOUTCOME] == OUT_RUNNING:
        state[SOUTCOME] = OUT_TIMEOUT
    return ev_n


@_jit
def edit_distance(a, b, kind_cost):
    """Minimal total edit cost between two symbol code sequences.

    Insertions and deletions cost 1; substituting unequal symbols costs
    ``kind_cost[kind_a, kind_b]`` where the kind is ``code >> 16``. Equal
    codes substitute for free. Classic two-row dynamic program; all costs are
    multiples of 0.5 so float64 arithmetic is exact.
    """
    la = a.shape[0]
    lb = b.shape[0]
    prev = np.empty(lb + 1, np.float64)
    cur = np.empty(lb + 1, np.float64)
    for j in range(lb + 1):
        prev[j] = j
    for i in range(1, la + 1):
        cur[0] = i
        ca = a[i - 1]
        ka = ca >> 16
        for j in range(1, lb + 1):
            cb = b[j - 1]
            if ca == cb:
                sub = prev[j - 1]
            else:
                sub = prev[j - 1] + kind_cost[ka, cb >> 16]
            d = prev[j] + 1.0
            if d < sub:
                sub = d
            d = cur[j - 1] + 1.0
            if d < sub:
                sub = d
            cur[j] = sub
        for j in range(lb + 1):
            prev[j] = cur[j]
    return prev[lb]


def warmup():
    """Force compilation of the episode kernels (no-op on the python backend)."""
    tiles = np.zeros((15, 8), np.uint8)
    tiles[13:, :] = T_SOLID
    state = np.zeros(NSTATE, np.int64)
    state[SX] = 1 * FP + FP // 2
    state[SY] = 13 * FP
    state[SSIZE] = 1
    state[SGROUND] = 1
    state[SALIVE] = 1
    state[SFACING] = 1
    enemies = np.zeros((1, 4), np.int64)
    enemies[0, EX] = 5 * FP + FP // 2
    enemies[0, EY] = 13 * FP
    enemies[0, EDIR] = -1
    enemies[0, EALIVE] = 1
    projectiles = np.zeros((PROJ_CAP, 4), np.int64)
    ev = np.zeros((256, 3), np.int64)
    prog_op = np.array([OP_SEQ2, OP_RIGHT, OP_JUMP], np.int64)
    prog_val = np.zeros(3, np.int64)
    prog_c0 = np.array([1, -1, -1], np.int64)
    prog_c1 = np.array([2, -1, -1], np.int64)
    prog_c2 = np.array([-1, -1, -1], np.int64)
    inputs = np.zeros(16, np.int64)
    run_episode_program(tiles.copy(), 7, state.copy(), enemies.copy(),
                        projectiles.copy(), 16, prog_op, prog_val,
                        prog_c0, prog_c1, prog_c2, inputs, ev)
    state2 = np.zeros(NSTATE, np.int64)
    state2[SX] = 1 * FP + FP // 2
    state2[SY] = 13 * FP
    state2[SSIZE] = 1
    state2[SGROUND] = 1
    state2[SALIVE] = 1
    state2[SFACING] = 1
    run_episode_inputs(tiles.copy(), 7, state2, enemies.copy(),
                       projectiles.copy(), 16, inputs, ev)
    kc = np.ones((N_EVENT_KINDS, N_EVENT_KINDS), np.float64)
    edit_distance(np.array([1 << 16, 2 << 16], np.int64),
                  np.array([2 << 16], np.int64), kc)
