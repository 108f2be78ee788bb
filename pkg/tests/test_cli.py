"""End-to-end CLI behavior and exit codes."""

from pathlib import Path

import pytest
from click.testing import CliRunner

from platgp.cli import main
from platgp.levels import parse_level, validate_level
from platgp.traces import load_trace


@pytest.fixture
def runner():
    return CliRunner()


def invoke(runner, *args):
    return runner.invoke(main, [str(a) for a in args], catch_exceptions=False)


class TestGenLevel:
    def test_writes_expected_header(self, runner, tmp_path):
        out = tmp_path / "one.lvl"
        r = invoke(runner, "gen-level", "--seed", 1, "--difficulty", 0,
                   "--out", out)
        assert r.exit_code == 0
        assert out.read_text().splitlines()[0] == "LVL1 256 15 1 0"

    def test_identical_bytes_on_rerun(self, runner, tmp_path):
        a, b = tmp_path / "a.lvl", tmp_path / "b.lvl"
        invoke(runner, "gen-level", "--seed", 5, "--difficulty", 2, "--out", a)
        invoke(runner, "gen-level", "--seed", 5, "--difficulty", 2, "--out", b)
        assert a.read_bytes() == b.read_bytes()

    def test_validate_flag_checks_reachability(self, runner, tmp_path):
        out = tmp_path / "d3.lvl"
        r = invoke(runner, "gen-level", "--seed", 42, "--difficulty", 3,
                   "--out", out, "--validate")
        assert r.exit_code == 0
        assert "validated" in r.output
        validate_level(parse_level(out.read_text()))

    def test_bad_difficulty_is_validation_error(self, runner, tmp_path):
        r = runner.invoke(main, ["gen-level", "--seed", "1", "--difficulty",
                                 "-2", "--out", str(tmp_path / "x.lvl")])
        assert r.exit_code == 2


class TestReplayRateExport:
    @pytest.fixture
    def wait_agent(self, tmp_path):
        p = tmp_path / "wait.agent"
        p.write_text("(Wait)\n")
        return p

    @pytest.fixture
    def runner_agent(self, tmp_path):
        p = tmp_path / "runner.agent"
        p.write_text("(Seq3 (Right) (Run) (Jump))\n")
        return p

    def test_wait_agent_times_out(self, runner, wait_agent, tmp_path):
        out = tmp_path / "wait.trace.json"
        r = invoke(runner, "replay", "--agent", wait_agent, "--seed", 1,
                   "--difficulty", 0, "--out", out, "--budget", 300)
        assert r.exit_code == 0
        assert "Timeout" in r.output
        assert load_trace(out).outcome == "Timeout"

    def test_replay_twice_identical_bytes(self, runner, runner_agent, tmp_path):
        a, b = tmp_path / "a.trace.json", tmp_path / "b.trace.json"
        for out in (a, b):
            invoke(runner, "replay", "--agent", runner_agent, "--seed", 2,
                   "--difficulty", 1, "--out", out)
        assert a.read_bytes() == b.read_bytes()

    def test_scripted_winner_on_difficulty_0(self, runner, runner_agent,
                                             tmp_path):
        out = tmp_path / "win.trace.json"
        r = invoke(runner, "replay", "--agent", runner_agent, "--seed", 3,
                   "--difficulty", 0, "--out", out)
        assert "Win" in r.output

    def test_rate_identical_traces_is_zero(self, runner, runner_agent,
                                           tmp_path):
        out = tmp_path / "t.trace.json"
        invoke(runner, "replay", "--agent", runner_agent, "--seed", 2,
               "--difficulty", 1, "--out", out)
        r = invoke(runner, "rate", out, out)
        assert r.exit_code == 0
        assert r.output.strip() == "0.0000"

    def test_rate_vs_idle_trace_is_one(self, runner, runner_agent, wait_agent,
                                       tmp_path):
        a = tmp_path / "a.trace.json"
        b = tmp_path / "b.trace.json"
        invoke(runner, "replay", "--agent", runner_agent, "--seed", 2,
               "--difficulty", 1, "--out", a)
        invoke(runner, "replay", "--agent", wait_agent, "--seed", 2,
               "--difficulty", 1, "--out", b)
        r = invoke(runner, "rate", a, b)
        assert r.output.strip() == "1.0000"

    def test_rate_level_mismatch_needs_force(self, runner, runner_agent,
                                             tmp_path):
        a = tmp_path / "a.trace.json"
        b = tmp_path / "b.trace.json"
        invoke(runner, "replay", "--agent", runner_agent, "--seed", 2,
               "--difficulty", 1, "--out", a)
        invoke(runner, "replay", "--agent", runner_agent, "--seed", 3,
               "--difficulty", 1, "--out", b)
        r = runner.invoke(main, ["rate", str(a), str(b)])
        assert r.exit_code == 2
        r = invoke(runner, "rate", a, b, "--force")
        assert r.exit_code == 0

    def test_export_dot_and_pseudo(self, runner, runner_agent, tmp_path):
        r = invoke(runner, "export", "--agent", runner_agent, "--format", "dot")
        assert r.exit_code == 0
        dot = Path(r.output.strip()).read_text()
        assert dot.startswith("digraph")
        r = invoke(runner, "export", "--agent", runner_agent,
                   "--format", "pseudo")
        text = Path(r.output.strip()).read_text()
        assert "seq {" in text

    def test_agent_parse_error_is_validation_failure(self, runner, tmp_path):
        bad = tmp_path / "bad.agent"
        bad.write_text("(Seq2 (Right)")
        r = runner.invoke(main, ["export", "--agent", str(bad),
                                 "--format", "dot"])
        assert r.exit_code == 2


class TestEvolveCommand:
    def _write_config(self, path, **kw):
        base = dict(max_generations=2, master_seed=9, population_size=10,
                    difficulty=0, width=64, frame_budget=300)
        base.update(kw)
        lines = []
        for key, value in base.items():
            if isinstance(value, (list, tuple)):
                lines.append(f"{key} = {list(value)}")
            elif isinstance(value, str):
                lines.append(f'{key} = "{value}"')
            else:
                lines.append(f"{key} = {value}")
        lines.append("level_seeds = [1]")
        path.write_text("\n".join(lines) + "\n")
        return path

    def test_run_directory_artifacts(self, runner, tmp_path):
        cfg = self._write_config(tmp_path / "exp.toml")
        r = invoke(runner, "evolve", "--config", cfg, "--out-dir",
                   tmp_path / "runs", "--workers", 2, "--quiet")
        assert r.exit_code == 0
        run_dir = tmp_path / "runs" / "exp-seed9"
        stats = (run_dir / "stats.csv").read_text().splitlines()
        assert stats[0] == "gen,best,mean,best_nodes,mean_nodes,evals,ms"
        assert len(stats) == 1 + 2
        for name in ("best.agent", "best.dot", "best.pseudo", "config.toml",
                     "best_gen0.agent"):
            assert (run_dir / name).exists()

    def test_manifest_references_existing_files(self, runner, tmp_path):
        import json
        cfg = self._write_config(tmp_path / "man.toml")
        invoke(runner, "evolve", "--config", cfg, "--out-dir",
               tmp_path / "runs", "--quiet")
        run_dir = tmp_path / "runs" / "man-seed9"
        manifest = json.loads((run_dir / "manifest.json").read_text())
        assert manifest["runId"] == "man-seed9"
        assert manifest["artifacts"]
        for name in manifest["artifacts"]:
            assert (run_dir / name).exists()
        assert (run_dir / manifest["config"]).exists()

    def test_unwritable_out_is_runtime_error(self, runner, tmp_path):
        r = runner.invoke(main, ["gen-level", "--seed", "1", "--difficulty",
                                 "0", "--out",
                                 str(tmp_path / "no" / "such" / "dir.lvl")])
        assert r.exit_code == 3

    def test_single_generation_single_row(self, runner, tmp_path):
        cfg = self._write_config(tmp_path / "one.toml", max_generations=1)
        invoke(runner, "evolve", "--config", cfg, "--out-dir",
               tmp_path / "runs", "--quiet")
        stats = (tmp_path / "runs" / "one-seed9" / "stats.csv").read_text()
        assert len(stats.splitlines()) == 2

    def test_rerun_identical_stats_modulo_wallclock(self, runner, tmp_path):
        cfg = self._write_config(tmp_path / "rep.toml", max_generations=3)
        rows = []
        for sub in ("r1", "r2"):
            invoke(runner, "evolve", "--config", cfg, "--out-dir",
                   tmp_path / sub, "--quiet")
            text = (tmp_path / sub / "rep-seed9" / "stats.csv").read_text()
            rows.append([ln.rsplit(",", 1)[0]  # drop the ms column
                         for ln in text.splitlines()])
        assert rows[0] == rows[1]

    def test_invalid_rate_rejected(self, runner, tmp_path):
        cfg = self._write_config(tmp_path / "bad.toml", crossover_rate=1.5)
        r = runner.invoke(main, ["evolve", "--config", str(cfg)])
        assert r.exit_code == 2

    def test_trace_mode_requires_traces(self, runner, tmp_path):
        cfg = self._write_config(tmp_path / "t.toml", fitness_mode="trace")
        r = runner.invoke(main, ["evolve", "--config", str(cfg)])
        assert r.exit_code == 2

    def test_trace_mode_end_to_end(self, runner, tmp_path):
        human = tmp_path / "human.trace.json"
        agent = tmp_path / "demo.agent"
        agent.write_text("(Seq3 (Right) (Run) (Jump))\n")
        invoke(runner, "replay", "--agent", agent, "--seed", 1,
               "--difficulty", 1, "--out", human)
        cfg = tmp_path / "trace.toml"
        cfg.write_text(
            "max_generations = 2\nmaster_seed = 4\nlevel_seeds = [1]\n"
            "population_size = 10\ndifficulty = 1\n"
            'fitness_mode = "trace"\n'
            f'trace_files = ["{human}"]\n')
        r = invoke(runner, "evolve", "--config", cfg, "--out-dir",
                   tmp_path / "runs", "--quiet")
        assert r.exit_code == 0
        stats = (tmp_path / "runs" / "trace-seed4" / "stats.csv").read_text()
        assert len(stats.splitlines()) == 3

    def test_trace_level_mismatch_is_validation_error(self, runner, tmp_path):
        human = tmp_path / "h.trace.json"
        agent = tmp_path / "demo.agent"
        agent.write_text("(Right)\n")
        invoke(runner, "replay", "--agent", agent, "--seed", 1,
               "--difficulty", 1, "--out", human)
        cfg = tmp_path / "mm.toml"
        cfg.write_text(
            "max_generations = 1\nmaster_seed = 4\nlevel_seeds = [1, 3]\n"
            "population_size = 10\ndifficulty = 1\n"
            'fitness_mode = "trace"\n'
            f'trace_files = ["{human}"]\n')
        r = runner.invoke(main, ["evolve", "--config", str(cfg),
                                 "--out-dir", str(tmp_path / "runs")])
        assert r.exit_code == 2
        assert "level seeds" in r.output

    def test_corrupt_trace_file_rejected(self, runner, tmp_path):
        human = tmp_path / "bad.trace.json"
        agent = tmp_path / "demo.agent"
        agent.write_text("(Right)\n")
        invoke(runner, "replay", "--agent", agent, "--seed", 1,
               "--difficulty", 0, "--out", human)
        doc = human.read_text().replace('"finalScore": ', '"finalScore": 9')
        human.write_text(doc)
        cfg = tmp_path / "c.toml"
        cfg.write_text(
            "max_generations = 1\nmaster_seed = 4\nlevel_seeds = [1]\n"
            "population_size = 10\ndifficulty = 0\n"
            'fitness_mode = "trace"\n'
            f'trace_files = ["{human}"]\n')
        r = runner.invoke(main, ["evolve", "--config", str(cfg),
                                 "--out-dir", str(tmp_path / "runs")])
        assert r.exit_code == 2


class TestBench:
    def test_bench_smoke(self, runner):
        r = invoke(runner, "bench", "--episodes", 3, "--budget", 200,
                   "--no-compare")
        assert r.exit_code == 0
        assert "episodes" in r.output and "metric" in r.output
