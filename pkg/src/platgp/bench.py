"""Benchmark the hot kernels on the numba backend vs the python fallback.

The backend is fixed per process at import time, so the comparison runs the
same workload in a subprocess with ``PLATGP_BACKEND=python``. Usage:
``platgp bench`` or ``python -m platgp.bench``.
"""

import json
import os
import subprocess
import sys
import time

import numpy as np

from . import kernels as K
from .genes import Chromosome, GeneType
from .gp_ops import GROW, random_tree
from .levels import generate_level
from .metric import trace_dissimilarity
from .sim import replay_inputs, run_episode


def _workload(episodes: int, budget: int) -> dict:
    """Time agent episodes, input replays and the metric; returns ms totals."""
    level = generate_level(3, 1)
    rng = np.random.default_rng(11)
    agents = [Chromosome(random_tree(rng, GROW, 7, GeneType.ACT))
              for _ in range(episodes)]
    K.warmup()

    t0 = time.perf_counter()
    results = [run_episode(level, a, budget=budget) for a in agents]
    episode_ms = (time.perf_counter() - t0) * 1000

    frames = sum(r.frames_used for r in results)
    inputs = [r.inputs for r in results]
    t0 = time.perf_counter()
    for seq in inputs:
        replay_inputs(level, seq, budget=budget)
    replay_ms = (time.perf_counter() - t0) * 1000

    symbols = [np.array([e.symbol() for e in r.events], np.int64)[:512]
               for r in results]
    t0 = time.perf_counter()
    n_pairs = 0
    for i in range(len(symbols)):
        for j in range(i + 1, len(symbols)):
            trace_dissimilarity(symbols[i], symbols[j])
            n_pairs += 1
    metric_ms = (time.perf_counter() - t0) * 1000

    return {"backend": K.BACKEND, "episodes": episodes, "frames": frames,
            "episode_ms": episode_ms, "replay_ms": replay_ms,
            "metric_pairs": n_pairs, "metric_ms": metric_ms}


def _format(r: dict) -> str:
    fps = r["frames"] / (r["episode_ms"] / 1000) if r["episode_ms"] else 0
    return (f"{r['backend']:>7}: {r['episodes']} episodes ({r['frames']} frames) "
            f"{r['episode_ms']:9.1f} ms ({fps:,.0f} frames/s) | "
            f"replay {r['replay_ms']:9.1f} ms | "
            f"{r['metric_pairs']} metric pairs {r['metric_ms']:8.1f} ms")


def run_bench(episodes: int = 30, budget: int = 2000, compare: bool = True,
              echo=print) -> dict:
    mine = _workload(episodes, budget)
    echo(_format(mine))
    if compare and K.BACKEND != "python":
        env = dict(os.environ, PLATGP_BACKEND="python")
        proc = subprocess.run(
            [sys.executable, "-m", "platgp.bench", "--json",
             "--episodes", str(episodes), "--budget", str(budget)],
            capture_output=True, text=True, env=env, check=True)
        other = json.loads(proc.stdout)
        echo(_format(other))
        if mine["episode_ms"] > 0:
            echo(f"speedup: episodes x{other['episode_ms'] / mine['episode_ms']:.1f}, "
                 f"replay x{other['replay_ms'] / mine['replay_ms']:.1f}, "
                 f"metric x{other['metric_ms'] / mine['metric_ms']:.1f}")
    return mine


def main(argv=None):
    import argparse

    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--episodes", type=int, default=30)
    ap.add_argument("--budget", type=int, default=2000)
    ap.add_argument("--json", action="store_true",
                    help="print one JSON result line (used by the comparison)")
    ap.add_argument("--no-compare", action="store_true")
    args = ap.parse_args(argv)
    if args.json:
        print(json.dumps(_workload(args.episodes, args.budget)))
    else:
        run_bench(args.episodes, args.budget, compare=not args.no_compare)


if __name__ == "__main__":
    main()
