"""Command-line entry points for the whole pipeline.

Exit codes: 0 ok, 2 validation error (bad input, bad config, parse errors),
3 runtime error.
"""

import json
from pathlib import Path

import click

from .evolve import ConfigError, evolve, load_config, write_stats_csv
from .levels import LevelError, generate_level, parse_level, serialize_level, validate_level
from .metric import trace_dissimilarity
from .sim import run_episode
from .traces import (TraceError, load_trace, save_trace, trace_from_episode)
from .treeio import AgentParseError, parse, serialize, to_dot, to_pseudocode


class ValidationFailure(click.ClickException):
    exit_code = 2


class RuntimeFailure(click.ClickException):
    exit_code = 3


@click.group()
def main():
    """Evolve, run and inspect decision-tree platformer agents."""


@main.command("gen-level")
@click.option("--seed", type=int, required=True)
@click.option("--difficulty", type=int, required=True)
@click.option("--width", type=int, default=256, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@click.option("--validate", "check", is_flag=True,
              help="Re-run the reachability check on the written file.")
def cmd_gen_level(seed, difficulty, width, out, check):
    """Generate a level deterministically and write it as LVL1 text."""
    try:
        level = generate_level(seed, difficulty, width)
    except (ValueError, LevelError) as exc:
        raise ValidationFailure(str(exc))
    text = serialize_level(level)
    try:
        Path(out).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise RuntimeFailure(f"cannot write {out}: {exc}")
    if check:
        validate_level(parse_level(Path(out).read_text(encoding="utf-8")))
        click.echo(f"{out} (validated: finish reachable)")
    else:
        click.echo(out)


@main.command("evolve")
@click.option("--config", "config_path", type=click.Path(exists=True,
              dir_okay=False), required=True)
@click.option("--out-dir", type=click.Path(file_okay=False), default="runs",
              show_default=True)
@click.option("--workers", type=int, default=None,
              help="Evaluation threads (default: up to 8).")
@click.option("--quiet", is_flag=True)
def cmd_evolve(config_path, out_dir, workers, quiet):
    """Run an evolution described by a TOML config; writes a run directory."""
    try:
        config = load_config(config_path)
    except (ConfigError, OSError) as exc:
        raise ValidationFailure(str(exc))
    run_id = f"{Path(config_path).stem}-seed{config.master_seed}"
    run_dir = Path(out_dir) / run_id
    run_dir.mkdir(parents=True, exist_ok=True)
    (run_dir / "config.toml").write_text(
        Path(config_path).read_text(encoding="utf-8"), encoding="utf-8")
    stats_seen = []

    def sink(stats, best):
        stats_seen.append(stats)
        if not quiet:
            click.echo(f"gen {stats.generation:4d}  best {stats.best_fitness:.4f}"
                       f"  mean {stats.mean_fitness:.4f}"
                       f"  nodes {stats.best_node_count}")
        if stats.generation % config.checkpoint_interval == 0:
            path = run_dir / f"best_gen{stats.generation}.agent"
            path.write_text(serialize(best) + "\n", encoding="utf-8")

    try:
        result = evolve(config, progress_sink=sink, workers=workers)
    except TraceError as exc:
        raise ValidationFailure(f"trace file rejected: {exc}")
    except ConfigError as exc:
        raise ValidationFailure(str(exc))
    finally:
        if stats_seen:
            write_stats_csv(run_dir / "stats.csv", stats_seen)
    (run_dir / "best.agent").write_text(serialize(result.best) + "\n",
                                        encoding="utf-8")
    (run_dir / "best.dot").write_text(to_dot(result.best), encoding="utf-8")
    (run_dir / "best.pseudo").write_text(to_pseudocode(result.best),
                                         encoding="utf-8")
    artifacts = sorted(p.name for p in run_dir.iterdir()
                       if p.name != "manifest.json")
    (run_dir / "manifest.json").write_text(json.dumps({
        "runId": run_id,
        "config": "config.toml",
        "bestFitness": result.best_fitness,
        "generations": len(stats_seen),
        "artifacts": artifacts,
    }, indent=1) + "\n", encoding="utf-8")
    click.echo(f"{run_dir}  best fitness {result.best_fitness:.4f}")


@main.command("replay")
@click.option("--agent", "agent_path", type=click.Path(exists=True,
              dir_okay=False), required=True)
@click.option("--seed", type=int, required=True)
@click.option("--difficulty", type=int, required=True)
@click.option("--width", type=int, default=256, show_default=True)
@click.option("--budget", type=int, default=2000, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
def cmd_replay(agent_path, seed, difficulty, width, budget, out):
    """Run an agent headless on a generated level and record the trace."""
    chromosome = _load_agent(agent_path)
    try:
        level = generate_level(seed, difficulty, width)
    except (ValueError, LevelError) as exc:
        raise ValidationFailure(str(exc))
    episode = run_episode(level, chromosome, budget=budget)
    trace = trace_from_episode(episode, level, budget, source="agent")
    save_trace(trace, out)
    click.echo(f"{episode.outcome} score={episode.score} "
               f"frames={episode.frames_used} maxX={episode.max_x} "
               f"trace={trace.trace_id}")


@main.command("rate")
@click.argument("trace_a", type=click.Path(exists=True, dir_okay=False))
@click.argument("trace_b", type=click.Path(exists=True, dir_okay=False))
@click.option("--force", is_flag=True,
              help="Proceed even if the traces are from different levels.")
def cmd_rate(trace_a, trace_b, force):
    """Print the dissimilarity between two recorded traces (0 = identical)."""
    try:
        a = load_trace(trace_a)
        b = load_trace(trace_b)
    except TraceError as exc:
        raise ValidationFailure(str(exc))
    ha, hb = a.header, b.header
    if (ha.level_seed, ha.difficulty, ha.width) != (hb.level_seed,
                                                    hb.difficulty, hb.width):
        if not force:
            raise ValidationFailure(
                "traces are from different levels; pass --force to compare anyway")
        click.echo("warning: comparing traces from different levels", err=True)
    d = trace_dissimilarity(a.symbols(), b.symbols())
    click.echo(f"{d:.4f}")


@main.command("export")
@click.option("--agent", "agent_path", type=click.Path(exists=True,
              dir_okay=False), required=True)
@click.option("--format", "fmt", type=click.Choice(["dot", "pseudo"]),
              required=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Defaults to the agent path with a new suffix.")
def cmd_export(agent_path, fmt, out):
    """Write an agent's decision tree as DOT or readable pseudocode."""
    chromosome = _load_agent(agent_path)
    text = to_dot(chromosome) if fmt == "dot" else to_pseudocode(chromosome)
    if out is None:
        out = str(Path(agent_path).with_suffix(f".{fmt}"))
    Path(out).write_text(text, encoding="utf-8")
    click.echo(out)


@main.command("serve")
@click.option("--port", type=int, default=8040, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--traces-dir", type=click.Path(file_okay=False),
              default="traces", show_default=True)
@click.option("--agents-dir", type=click.Path(file_okay=False),
              default="agents", show_default=True)
@click.option("--frontend-dir", type=click.Path(file_okay=False),
              default="frontend", show_default=True,
              help="Static web client root (mounted at / when it exists).")
def cmd_serve(port, host, traces_dir, agents_dir, frontend_dir):
    """Serve the lockstep play/watch session protocol (and the web client)."""
    import uvicorn

    from .server import create_app

    app = create_app(Path(traces_dir), Path(agents_dir),
                     frontend_dir=Path(frontend_dir))
    uvicorn.run(app, host=host, port=port, log_level="info")


@main.command("bench")
@click.option("--episodes", type=int, default=30, show_default=True)
@click.option("--budget", type=int, default=2000, show_default=True)
@click.option("--compare/--no-compare", default=True, show_default=True,
              help="Also time the pure-python backend in a subprocess.")
def cmd_bench(episodes, budget, compare):
    """Benchmark the hot kernels on the active backend (optionally both)."""
    from .bench import run_bench
    run_bench(episodes=episodes, budget=budget, compare=compare, echo=click.echo)


def _load_agent(path):
    try:
        return parse(Path(path).read_text(encoding="utf-8"))
    except AgentParseError as exc:
        raise ValidationFailure(f"{path}: {exc}")


if __name__ == "__main__":
    main()
