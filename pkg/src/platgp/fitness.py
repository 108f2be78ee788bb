"""Fitness functions: imitation of recorded play, and plain objective play.

Both return a FitnessReport whose aggregate is a weighted sum of bounded
terms, so values live in [0, 1], are nonnegative, and can feed the roulette
wheel directly.
"""

from dataclasses import dataclass

import numpy as np

from .levels import Level
from .metric import DEFAULT_PARAMS, DissimilarityParams, trace_dissimilarity
from .sim import EpisodeResult
from .traces import PlayTrace, extract_events

TRACE_WEIGHTS = (0.6, 0.3, 0.1)  # nearness to a human trace, progress, win
OBJECTIVE_WEIGHTS = (0.5, 0.3, 0.15, 0.05)  # progress, win, score, speed


@dataclass(frozen=True)
class FitnessReport:
    trace_term: float
    progress_term: float
    win_term: float
    score_term: float
    time_term: float
    aggregate: float


def _clip01(x: float) -> float:
    return 0.0 if x < 0.0 else (1.0 if x > 1.0 else x)


def episode_symbols(episode: EpisodeResult) -> np.ndarray:
    return np.array([e.symbol() for e in episode.events], np.int64)


def reference_symbols(humans) -> list[np.ndarray]:
    """Normalize a list of human references to event-symbol arrays.

    PlayTrace entries are validated (replayed) once; arrays pass through.
    """
    if not humans:
        raise ValueError("at least one human trace is required in trace mode")
    out = []
    for h in humans:
        if isinstance(h, PlayTrace):
            out.append(extract_events(h))
        else:
            out.append(np.asarray(h, np.int64))
    return out


def fitness_trace(episode: EpisodeResult, humans, weights=TRACE_WEIGHTS, *,
                  level: Level, params: DissimilarityParams = DEFAULT_PARAMS,
                  ) -> FitnessReport:
    """Imitation fitness: how close the episode plays to the nearest human.

    aggregate = w1*(1 - d*) + w2*progress + w3*win, where d* is the smallest
    dissimilarity to any reference trace. The progress and win terms keep the
    degenerate do-nothing optimum out of the fitness plateau.
    """
    refs = reference_symbols(humans)
    mine = episode_symbols(episode)
    d_star = min(trace_dissimilarity(mine, ref, params) for ref in refs)
    w1, w2, w3 = weights
    trace_term = _clip01(1.0 - d_star)
    progress = _clip01(episode.max_x / level.length_units)
    win = 1.0 if episode.won else 0.0
    aggregate = w1 * trace_term + w2 * progress + w3 * win
    return FitnessReport(trace_term=trace_term, progress_term=progress,
                         win_term=win, score_term=0.0, time_term=0.0,
                         aggregate=aggregate)


def fitness_objective(episode: EpisodeResult, weights=OBJECTIVE_WEIGHTS, *,
                      level: Level, budget: int) -> FitnessReport:
    """Plain solving fitness: progress, winning, score, and time to spare."""
    w1, w2, w3, w4 = weights
    progress = _clip01(episode.max_x / level.length_units)
    win = 1.0 if episode.won else 0.0
    max_score = level.max_score()
    score = _clip01(episode.score / max_score) if max_score > 0 else 0.0
    time_left = _clip01(1.0 - episode.frames_used / budget)
    aggregate = w1 * progress + w2 * win + w3 * score + w4 * time_left
    return FitnessReport(trace_term=0.0, progress_term=progress, win_term=win,
                         score_term=score, time_term=time_left,
                         aggregate=aggregate)
