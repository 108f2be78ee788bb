"""Evolution engine: config validation, selection, reproduction, loop."""

import numpy as np
import pytest

from platgp.evolve import (ConfigError, EvolutionConfig, evolve,
                           init_population, next_generation, roulette_select)
from platgp.genes import check_types
from platgp.treeio import serialize


def config(**kw):
    base = dict(max_generations=3, master_seed=11, level_seeds=(1,),
                population_size=20, difficulty=0, width=64, frame_budget=400,
                init_depths=(3, 4, 5, 6, 7))
    base.update(kw)
    return EvolutionConfig(**base)


class TestConfig:
    def test_defaults_valid(self):
        config().validate()

    def test_rate_out_of_range(self):
        with pytest.raises(ConfigError, match="crossover_rate"):
            config(crossover_rate=1.5).validate()

    def test_elite_plus_fresh_below_population(self):
        with pytest.raises(ConfigError, match="below N"):
            config(population_size=10, fresh_rate=0.9, elite_count=1).validate()

    def test_trace_mode_needs_traces(self):
        with pytest.raises(ConfigError, match="trace file"):
            config(fitness_mode="trace").validate()

    def test_load_rejects_unknown_keys(self, tmp_path):
        p = tmp_path / "c.toml"
        p.write_text("max_generations = 1\nmaster_seed = 1\n"
                     "level_seeds = [1]\nturbo = true\n")
        from platgp.evolve import load_config
        with pytest.raises(ConfigError, match="turbo"):
            load_config(p)

    def test_load_valid_toml(self, tmp_path):
        p = tmp_path / "c.toml"
        p.write_text("max_generations = 2\nmaster_seed = 7\n"
                     "level_seeds = [1, 2]\npopulation_size = 10\n"
                     "difficulty = 0\n")
        from platgp.evolve import load_config
        cfg = load_config(p)
        assert cfg.level_seeds == (1, 2)
        assert cfg.population_size == 10


class TestInitPopulation:
    def test_ramp_arithmetic(self, rng):
        cfg = config(population_size=100)
        pop = init_population(cfg, rng)
        assert len(pop) == 100
        by_depth = {}
        for i, ind in enumerate(pop.individuals):
            depth = cfg.init_depths[i % 5]
            by_depth.setdefault(depth, []).append(ind)
        assert {d: len(v) for d, v in by_depth.items()} == {
            3: 20, 4: 20, 5: 20, 6: 20, 7: 20}

    def test_deterministic_from_seed(self):
        cfg = config(population_size=30)
        a = init_population(cfg, np.random.default_rng(cfg.master_seed))
        b = init_population(cfg, np.random.default_rng(cfg.master_seed))
        assert [serialize(x.chromosome) for x in a.individuals] == \
               [serialize(x.chromosome) for x in b.individuals]

    def test_all_well_typed(self, rng):
        pop = init_population(config(population_size=100), rng)
        for ind in pop.individuals:
            check_types(ind.chromosome.root)


class TestRoulette:
    def test_two_equal_weights(self, rng):
        counts = [0, 0]
        for _ in range(20_000):
            counts[roulette_select([2.0, 2.0], rng)] += 1
        assert abs(counts[0] / 20_000 - 0.5) < 0.02

    def test_one_three_split(self, rng):
        counts = [0, 0]
        for _ in range(40_000):
            counts[roulette_select([1.0, 3.0], rng)] += 1
        assert abs(counts[0] / 40_000 - 0.25) < 0.01
        assert abs(counts[1] / 40_000 - 0.75) < 0.01

    def test_proportionality_1234(self, rng):
        weights = [1.0, 2.0, 3.0, 4.0]
        counts = np.zeros(4)
        n = 100_000
        for _ in range(n):
            counts[roulette_select(weights, rng)] += 1
        freqs = counts / n
        assert np.all(np.abs(freqs - np.array([0.1, 0.2, 0.3, 0.4])) < 0.02)

    def test_all_zero_falls_back_to_uniform(self, rng, caplog):
        counts = [0, 0, 0]
        for _ in range(3000):
            counts[roulette_select([0.0, 0.0, 0.0], rng)] += 1
        assert min(counts) > 0

    def test_negative_weight_rejected(self, rng):
        with pytest.raises(ValueError):
            roulette_select([1.0, -0.1], rng)


class TestNextGeneration:
    def _evaluated_pop(self, rng, n=100):
        cfg = config(population_size=n)
        pop = init_population(cfg, rng)
        for i, ind in enumerate(pop.individuals):
            ind.fitness = float(i % 7) / 7 + 0.01
        return cfg, pop

    def test_slot_arithmetic(self, rng):
        cfg, pop = self._evaluated_pop(rng)
        nxt = next_generation(pop, cfg, rng)
        assert len(nxt) == 100
        assert nxt.generation == pop.generation + 1
        # 1 elite + 20 fresh + 79 offspring by construction
        assert cfg.elite_count == 1 and cfg.fresh_count() == 20

    def test_elite_copied_unchanged(self, rng):
        cfg, pop = self._evaluated_pop(rng)
        best = sorted(pop.individuals,
                      key=lambda i: (-i.fitness, i.chromosome.node_count,
                                     i.chromosome.id))[0]
        nxt = next_generation(pop, cfg, rng)
        assert serialize(nxt.individuals[0].chromosome) == \
               serialize(best.chromosome)

    def test_fitness_required(self, rng):
        cfg = config(population_size=10)
        pop = init_population(cfg, rng)
        with pytest.raises(ValueError, match="fitness"):
            next_generation(pop, cfg, rng)

    def test_zero_crossover_rate_gives_clones(self, rng):
        cfg, pop = self._evaluated_pop(rng, n=30)
        cfg = config(population_size=30, crossover_rate=0.0, mutation_rate=0.0)
        originals = {serialize(i.chromosome) for i in pop.individuals}
        nxt = next_generation(pop, cfg, rng)
        clones = nxt.individuals[1 + cfg.fresh_count():]
        assert all(serialize(c.chromosome) in originals for c in clones)

    def test_reproduction_deterministic(self):
        cfg = config(population_size=40)
        outs = []
        for _ in range(2):
            rng = np.random.default_rng(99)
            pop = init_population(cfg, rng)
            for i, ind in enumerate(pop.individuals):
                ind.fitness = (i * 37 % 11) / 11 + 0.1
            nxt = next_generation(pop, cfg, rng)
            outs.append([serialize(i.chromosome) for i in nxt.individuals])
        assert outs[0] == outs[1]


class TestEvolveLoop:
    def test_single_generation_accounting(self):
        cfg = config(max_generations=1, population_size=10,
                     level_seeds=(1, 2))
        result = evolve(cfg, workers=1)
        assert len(result.stats_history) == 1
        assert result.stats_history[0].evaluations == 10 * 2

    def test_budget_accounting_over_generations(self):
        cfg = config(max_generations=4, population_size=8, level_seeds=(1,))
        result = evolve(cfg, workers=1)
        total = sum(s.evaluations for s in result.stats_history)
        assert total == 4 * 8 * 1

    def test_elitism_monotonic_best(self):
        cfg = config(max_generations=12, population_size=24, master_seed=5)
        result = evolve(cfg, workers=2)
        best = [s.best_fitness for s in result.stats_history]
        assert all(b2 >= b1 - 1e-12 for b1, b2 in zip(best, best[1:]))

    def test_thread_count_does_not_change_results(self):
        cfg = config(max_generations=5, population_size=16, master_seed=21)
        a = evolve(cfg, workers=1)
        b = evolve(cfg, workers=8)
        sa = [(s.generation, s.best_fitness, s.mean_fitness, s.best_node_count,
               s.mean_node_count, s.evaluations) for s in a.stats_history]
        sb = [(s.generation, s.best_fitness, s.mean_fitness, s.best_node_count,
               s.mean_node_count, s.evaluations) for s in b.stats_history]
        assert sa == sb
        assert serialize(a.best) == serialize(b.best)

    def test_early_stop_at_threshold(self):
        cfg = config(max_generations=50, population_size=30, master_seed=3,
                     stop_fitness=0.8)
        result = evolve(cfg, workers=2)
        assert len(result.stats_history) < 50
        assert result.best_fitness >= 0.8

    def test_progress_sink_called_per_generation(self):
        seen = []
        cfg = config(max_generations=3, population_size=8)
        evolve(cfg, progress_sink=lambda s, best: seen.append(s.generation),
               workers=1)
        assert seen == [0, 1, 2]


class TestTraceModeWiring:
    def _human(self, seed, difficulty=1, width=256):
        import numpy as np
        from platgp.levels import generate_level
        from platgp.sim import replay_inputs
        from platgp.traces import trace_from_episode
        level = generate_level(seed, difficulty, width)
        episode = replay_inputs(level, np.full(800, 50, np.int64), budget=2000)
        return trace_from_episode(episode, level, 2000, source="human")

    def test_traces_matched_to_their_level(self):
        from platgp.evolve import trace_fitness_fn
        cfg = config(level_seeds=(1, 2), difficulty=1, width=256)
        fn = trace_fitness_fn(cfg, [self._human(1), self._human(2)])
        from platgp.levels import generate_level
        from platgp.treeio import parse
        chrom = parse("(Seq3 (Right) (Run) (Jump))")
        for seed in (1, 2):
            value, episode = fn(chrom, generate_level(seed, 1))
            assert 0.0 <= value <= 1.0

    def test_wrong_difficulty_rejected(self):
        from platgp.evolve import trace_fitness_fn
        cfg = config(level_seeds=(1,), difficulty=2, width=256)
        with pytest.raises(ConfigError, match="difficulty"):
            trace_fitness_fn(cfg, [self._human(1, difficulty=1)])

    def test_uncovered_level_seed_rejected(self):
        from platgp.evolve import trace_fitness_fn
        cfg = config(level_seeds=(1, 2), difficulty=1, width=256)
        with pytest.raises(ConfigError, match=r"seeds \[2\]"):
            trace_fitness_fn(cfg, [self._human(1)])
