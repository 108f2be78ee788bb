"""Recorded play traces: JSON persistence, replay validation, event symbols.

A trace stores the per-frame input encodings plus the derived events and
final totals. Inputs are authoritative: loading a trace re-runs them through
the simulator and rejects the file if the stored events, score, outcome or
progress disagree (traces are self-validating). Trace ids are content
addresses over the header and inputs so identical recordings dedupe.
"""

import hashlib
import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .levels import Level, generate_level
from .sim import (EVENT_KINDS, EVENT_NAMES, Event, EpisodeResult,
                  replay_inputs)

FORMAT_VERSION = 1

# fixed timestamp used for deterministically produced traces (agent replays)
EPOCH_TIMESTAMP = "1970-01-01T00:00:00Z"


class TraceError(ValueError):
    """Trace file malformed or inconsistent with its own replay."""


@dataclass(frozen=True)
class TraceHeader:
    format_version: int
    level_seed: int
    difficulty: int
    frame_budget: int
    source: str  # "human" | "agent"
    created_at: str
    width: int = 256

    def level(self) -> Level:
        return generate_level(self.level_seed, self.difficulty, self.width)


@dataclass
class PlayTrace:
    header: TraceHeader
    inputs: np.ndarray
    events: tuple[Event, ...]
    final_score: int
    outcome: str
    max_x: int
    _symbols: np.ndarray = field(default=None, repr=False, compare=False)

    @property
    def trace_id(self) -> str:
        """Content address: hash of the header (minus timestamp) and inputs."""
        h = self.header
        key = json.dumps({
            "formatVersion": h.format_version, "levelSeed": h.level_seed,
            "difficulty": h.difficulty, "frameBudget": h.frame_budget,
            "source": h.source, "width": h.width,
            "inputs": [int(b) for b in self.inputs],
        }, separators=(",", ":"), sort_keys=True)
        return hashlib.sha256(key.encode()).hexdigest()[:16]

    def symbols(self) -> np.ndarray:
        """Event symbol codes for the dissimilarity metric (cached)."""
        if self._symbols is None:
            self._symbols = np.array([e.symbol() for e in self.events], np.int64)
        return self._symbols


def now_timestamp() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def trace_from_episode(episode: EpisodeResult, level: Level, budget: int,
                       source: str, created_at: str = EPOCH_TIMESTAMP,
                       ) -> PlayTrace:
    header = TraceHeader(format_version=FORMAT_VERSION, level_seed=level.seed,
                         difficulty=level.difficulty, frame_budget=budget,
                         source=source, created_at=created_at,
                         width=level.width)
    return PlayTrace(header=header, inputs=episode.inputs,
                     events=episode.events, final_score=episode.score,
                     outcome=episode.outcome, max_x=episode.max_x)


def trace_to_json(trace: PlayTrace) -> str:
    h = trace.header
    doc = {
        "header": {
            "formatVersion": h.format_version,
            "levelSeed": h.level_seed,
            "difficulty": h.difficulty,
            "frameBudget": h.frame_budget,
            "source": h.source,
            "createdAt": h.created_at,
            "width": h.width,
        },
        "inputs": [int(b) for b in trace.inputs],
        "events": [{"k": EVENT_NAMES[e.kind], "f": e.frame, "p": e.payload}
                   for e in trace.events],
        "finalScore": trace.final_score,
        "outcome": trace.outcome,
        "maxX": trace.max_x,
    }
    return json.dumps(doc, indent=1) + "\n"


def trace_from_json(text: str, validate: bool = True) -> PlayTrace:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TraceError(f"not valid JSON: {exc}") from None
    try:
        h = doc["header"]
        header = TraceHeader(
            format_version=int(h["formatVersion"]),
            level_seed=int(h["levelSeed"]), difficulty=int(h["difficulty"]),
            frame_budget=int(h["frameBudget"]), source=str(h["source"]),
            created_at=str(h.get("createdAt", EPOCH_TIMESTAMP)),
            width=int(h.get("width", 256)))
        inputs = np.array([int(b) for b in doc["inputs"]], np.int64)
        events = tuple(Event(kind=EVENT_KINDS[e["k"]], frame=int(e["f"]),
                             payload=int(e["p"])) for e in doc["events"])
        trace = PlayTrace(header=header, inputs=inputs, events=events,
                          final_score=int(doc["finalScore"]),
                          outcome=str(doc["outcome"]), max_x=int(doc["maxX"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise TraceError(f"malformed trace document: {exc!r}") from None
    if header.format_version != FORMAT_VERSION:
        raise TraceError(f"unsupported trace format {header.format_version}")
    if inputs.size and (inputs.min() < 0 or inputs.max() > 63):
        raise TraceError("inputs contain encodings outside 0..63")
    if validate:
        validate_trace(trace)
    return trace


def save_trace(trace: PlayTrace, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(trace_to_json(trace), encoding="utf-8")
    return path


def load_trace(path, validate: bool = True) -> PlayTrace:
    return trace_from_json(Path(path).read_text(encoding="utf-8"),
                           validate=validate)


def replay_trace(trace: PlayTrace) -> EpisodeResult:
    """Re-run the trace inputs on its own level."""
    return replay_inputs(trace.header.level(), trace.inputs,
                         budget=trace.header.frame_budget)


def validate_trace(trace: PlayTrace) -> EpisodeResult:
    """Replay and require bit-exact agreement with the stored fields.

    Raises TraceError naming the first divergent frame when the stored event
    stream disagrees with the replay.
    """
    result = replay_trace(trace)
    if result.events != trace.events:
        for got, want in zip(result.events, trace.events):
            if got != want:
                raise TraceError(
                    f"replay diverges at frame {min(got.frame, want.frame)}: "
                    f"replayed {got.name}, stored {want.name}")
        shorter = min(len(result.events), len(trace.events))
        extra = (result.events[shorter:] or trace.events[shorter:])[0]
        raise TraceError(
            f"replay diverges at frame {extra.frame}: event streams have "
            f"different lengths ({len(result.events)} replayed, "
            f"{len(trace.events)} stored)")
    if result.score != trace.final_score:
        raise TraceError(f"replayed score {result.score} != stored "
                         f"{trace.final_score}")
    if result.outcome != trace.outcome:
        raise TraceError(f"replayed outcome {result.outcome} != stored "
                         f"{trace.outcome}")
    if result.max_x != trace.max_x:
        raise TraceError(f"replayed maxX {result.max_x} != stored {trace.max_x}")
    return result


def extract_events(trace: PlayTrace) -> np.ndarray:
    """Validated event symbol sequence of a trace (replays the inputs)."""
    validate_trace(trace)
    return trace.symbols()
