"""Lockstep session server: the browser client plays or watches over WebSocket.

Protocol ``pgp/1``, JSON text messages. A session is one connection running
hello -> start -> (input/state)* -> finished. The world advances exactly one
frame per accepted input (the client paces the simulation), so a play
session's recorded inputs replay bit-identically later. Sessions share no
mutable state; traces are persisted under content-addressed ids.
"""

import json
from pathlib import Path

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.responses import JSONResponse, PlainTextResponse

import numpy as np

from . import kernels as K
from .genes import Chromosome, Node
from .levels import TILE_LEGEND, GLYPHS, generate_level
from .sim import (DEFAULT_FRAME_BUDGET, EVENT_NAMES, OUTCOME_NAMES,
                  EpisodeResult, WorldState, observe, step)
from .traces import now_timestamp, save_trace, trace_from_episode
from .treeio import parse, serialize, to_dot

PROTOCOL_VERSION = "pgp/1"
VIEWPORT_COLS = 24


class SessionError(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code
        self.message = message


def _agent_path(agents_dir: Path, agent_id: str) -> Path:
    if not agent_id or any(ch in agent_id for ch in "/\\."):
        raise SessionError("unknown_agent", f"unknown agent id {agent_id!r}")
    path = agents_dir / f"{agent_id}.agent"
    if not path.is_file():
        raise SessionError("unknown_agent", f"unknown agent id {agent_id!r}")
    return path


def _node_json(node: Node):
    label = str(node.value) if node.sig.name == "Const" else node.sig.name
    return {"label": label, "children": [_node_json(c) for c in node.children]}


def _viewport(world: WorldState):
    level = world.level
    atx = world.agent.x >> 8
    x0 = max(0, min(atx - VIEWPORT_COLS // 2, level.width - VIEWPORT_COLS))
    rows = []
    for y in range(level.height):
        rows.append("".join(GLYPHS[int(world._tiles[y, x])]
                            for x in range(x0, x0 + VIEWPORT_COLS)))
    return {"x0": x0, "width": VIEWPORT_COLS, "rows": rows}


def _state_message(world: WorldState, budget: int):
    return {
        "type": "state",
        "frame": world.frame,
        "agent": {"x": world.agent.x, "y": world.agent.y,
                  "size": "tall" if world.agent.size else "small",
                  "onGround": world.agent.on_ground,
                  "alive": world.agent.alive},
        "enemies": [{"x": e.x, "y": e.y, "dir": e.direction}
                    for e in world.enemies if e.alive],
        "projectiles": [{"x": p.x, "y": p.y} for p in world.projectiles],
        "score": world.score,
        "framesLeft": budget - world.frame,
        "events": [{"k": EVENT_NAMES[e.kind], "f": e.frame, "p": e.payload}
                   for e in world.events],
        "viewport": _viewport(world),
    }


class Session:
    """State machine for one connection; transport-agnostic and synchronous."""

    def __init__(self, traces_dir: Path, agents_dir: Path,
                 budget: int = DEFAULT_FRAME_BUDGET):
        self.traces_dir = traces_dir
        self.agents_dir = agents_dir
        self.budget = budget
        self.stage = "hello"
        self.mode = None
        self.world = None
        self.level = None
        self.chromosome = None
        self.inputs = []
        self.events = []

    def handle(self, text: str) -> list:
        """Process one client message, return the replies to send."""
        try:
            msg = json.loads(text)
            if not isinstance(msg, dict) or "type" not in msg:
                raise ValueError("message must be an object with a 'type'")
        except ValueError as exc:
            raise SessionError("bad_message", str(exc)) from None
        kind = msg["type"]
        if kind == "hello":
            return self._on_hello(msg)
        if kind == "start":
            return self._on_start(msg)
        if kind == "input":
            return self._on_input(msg)
        if kind == "end":
            return self._on_end()
        raise SessionError("bad_message", f"unknown message type {kind!r}")

    def _on_hello(self, msg):
        if self.stage != "hello":
            raise SessionError("bad_message", "hello already exchanged")
        version = msg.get("protocolVersion")
        if version != PROTOCOL_VERSION:
            raise SessionError(
                "protocol_version",
                f"server speaks {PROTOCOL_VERSION}, client sent {version!r}")
        self.stage = "ready"
        return [{"type": "welcome", "protocolVersion": PROTOCOL_VERSION,
                 "tileLegend": TILE_LEGEND}]

    def _on_start(self, msg):
        if self.stage != "ready":
            raise SessionError("bad_message",
                               f"start not allowed in stage {self.stage}")
        mode = msg.get("mode")
        if mode not in ("play", "watch"):
            raise SessionError("bad_message", f"unknown mode {mode!r}")
        try:
            seed = int(msg["levelSeed"])
            difficulty = int(msg["difficulty"])
            width = int(msg.get("width", 256))
        except (KeyError, TypeError, ValueError):
            raise SessionError("bad_message",
                               "start requires integer levelSeed/difficulty") from None
        if mode == "watch":
            path = _agent_path(self.agents_dir, str(msg.get("agentId", "")))
            self.chromosome = parse(path.read_text(encoding="utf-8"))
        self.level = generate_level(seed, difficulty, width)
        self.world = WorldState.initial(self.level)
        self.mode = mode
        self.stage = "running"
        self.inputs = []
        self.events = []
        return []

    def _on_input(self, msg):
        if self.stage != "running":
            raise SessionError("not_started", "no episode in progress")
        try:
            frame = int(msg["frame"])
            bits = int(msg["bits"])
        except (KeyError, TypeError, ValueError):
            raise SessionError("bad_message",
                               "input requires integer frame/bits") from None
        if frame != self.world.frame:
            raise SessionError(
                "frame_order",
                f"expected frame {self.world.frame}, got {frame}")
        if not 0 <= bits <= 63:
            raise SessionError("bad_input", f"bits {bits} outside 0..63")
        if self.mode == "watch":
            bits = evaluate_control(self.chromosome, self.world)
        else:
            self.inputs.append(bits)
        self.world = step(self.world, bits)
        self.events.extend(self.world.events)
        replies = [_state_message(self.world, self.budget)]
        if (self.world.outcome != K.OUT_RUNNING
                or self.world.frame >= self.budget):
            replies.append(self._finish())
        return replies

    def _on_end(self):
        if self.stage != "running":
            raise SessionError("not_started", "no episode in progress")
        return [self._finish()]

    def _finish(self):
        outcome_code = self.world.outcome
        outcome = OUTCOME_NAMES.get(outcome_code, "Timeout")
        trace_id = None
        if self.mode == "play":
            episode = EpisodeResult(
                outcome=outcome, score=self.world.score,
                frames_used=self.world.frame, max_x=self.world.max_x,
                inputs=np.array(self.inputs, np.int64), events=tuple(self.events))
            trace = trace_from_episode(episode, self.level, self.budget,
                                       source="human",
                                       created_at=now_timestamp())
            path = self.traces_dir / f"{trace.trace_id}.trace.json"
            save_trace(trace, path)
            trace_id = trace.trace_id
        self.stage = "finished"
        return {"type": "finished", "outcome": outcome, "traceId": trace_id}


def evaluate_control(chromosome: Chromosome, world: WorldState) -> int:
    return chromosome(observe(world))


def create_app(traces_dir: Path, agents_dir: Path,
               frontend_dir: Path = None,
               budget: int = DEFAULT_FRAME_BUDGET) -> FastAPI:
    traces_dir = Path(traces_dir)
    agents_dir = Path(agents_dir)
    traces_dir.mkdir(parents=True, exist_ok=True)
    agents_dir.mkdir(parents=True, exist_ok=True)
    app = FastAPI(title="platgp session server")

    @app.get("/api/agents")
    def list_agents():
        return sorted(p.stem for p in agents_dir.glob("*.agent"))

    @app.get("/api/agents/{agent_id}/dot")
    def agent_dot(agent_id: str):
        try:
            path = _agent_path(agents_dir, agent_id)
        except SessionError as exc:
            return JSONResponse({"error": exc.code}, status_code=404)
        chromosome = parse(path.read_text(encoding="utf-8"))
        return PlainTextResponse(to_dot(chromosome))

    @app.get("/api/agents/{agent_id}/tree")
    def agent_tree(agent_id: str):
        try:
            path = _agent_path(agents_dir, agent_id)
        except SessionError as exc:
            return JSONResponse({"error": exc.code}, status_code=404)
        chromosome = parse(path.read_text(encoding="utf-8"))
        return {"id": agent_id, "nodeCount": chromosome.node_count,
                "source": serialize(chromosome), "root": _node_json(chromosome.root)}

    @app.get("/api/traces")
    def list_traces():
        return sorted(p.name[:-len(".trace.json")]
                      for p in traces_dir.glob("*.trace.json"))

    @app.websocket("/session")
    async def session_socket(ws: WebSocket):
        await ws.accept()
        session = Session(traces_dir, agents_dir, budget=budget)
        try:
            while session.stage != "finished":
                text = await ws.receive_text()
                try:
                    replies = session.handle(text)
                except SessionError as exc:
                    await ws.send_text(json.dumps(
                        {"type": "error", "code": exc.code,
                         "message": exc.message}))
                    break
                for reply in replies:
                    await ws.send_text(json.dumps(reply))
            await ws.close()
        except WebSocketDisconnect:
            pass

    if frontend_dir and Path(frontend_dir).is_dir():
        from fastapi.staticfiles import StaticFiles
        app.mount("/", StaticFiles(directory=str(frontend_dir), html=True),
                  name="frontend")
    return app
