"""Population management and the generational loop.

Reproduction (selection, crossover, mutation, fresh blood) is strictly
sequential and draws from one master-seeded generator, while fitness
evaluation is deterministic and RNG-free, so a run's outputs are a pure
function of its config regardless of how many evaluation threads are used.
"""

import csv
import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .fitness import (OBJECTIVE_WEIGHTS, TRACE_WEIGHTS, fitness_objective,
                      fitness_trace, reference_symbols)
from .genes import Chromosome, GeneType
from .gp_ops import FULL, GROW, crossover, mutate, random_tree
from .levels import generate_level
from .sim import DEFAULT_FRAME_BUDGET, run_episode

log = logging.getLogger(__name__)


class ConfigError(ValueError):
    """Evolution configuration failed validation."""


@dataclass(frozen=True)
class EvolutionConfig:
    max_generations: int
    master_seed: int
    level_seeds: tuple
    population_size: int = 100
    crossover_rate: float = 0.6
    fresh_rate: float = 0.2
    mutation_rate: float = 0.01
    elite_count: int = 1
    init_depths: tuple = (3, 4, 5, 6, 7)
    fitness_mode: str = "objective"
    difficulty: int = 1
    width: int = 256
    frame_budget: int = DEFAULT_FRAME_BUDGET
    stop_fitness: float = None
    checkpoint_interval: int = 25
    trace_files: tuple = ()
    objective_weights: tuple = OBJECTIVE_WEIGHTS
    trace_weights: tuple = TRACE_WEIGHTS

    def fresh_count(self) -> int:
        return int(round(self.fresh_rate * self.population_size))

    def validate(self) -> "EvolutionConfig":
        if self.population_size < 2:
            raise ConfigError("population_size must be >= 2")
        for name in ("crossover_rate", "fresh_rate", "mutation_rate"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"{name} must be in [0, 1], got {v}")
        if self.elite_count < 0:
            raise ConfigError("elite_count must be >= 0")
        if self.elite_count + self.fresh_count() >= self.population_size:
            raise ConfigError(
                "elite_count + round(fresh_rate * N) must stay below N")
        if self.max_generations < 1:
            raise ConfigError("max_generations must be >= 1")
        if not self.level_seeds:
            raise ConfigError("level_seeds must not be empty")
        if not self.init_depths or any(not 1 <= d <= 12 for d in self.init_depths):
            raise ConfigError("init_depths must be within 1..12")
        if self.fitness_mode not in ("objective", "trace"):
            raise ConfigError(f"unknown fitness_mode {self.fitness_mode!r}")
        if self.fitness_mode == "trace" and not self.trace_files:
            raise ConfigError("trace mode requires at least one trace file")
        if self.difficulty < 0:
            raise ConfigError("difficulty must be >= 0")
        if self.frame_budget < 1:
            raise ConfigError("frame_budget must be >= 1")
        if self.checkpoint_interval < 1:
            raise ConfigError("checkpoint_interval must be >= 1")
        return self


def load_config(path) -> EvolutionConfig:
    """Read a TOML config file; unknown keys are rejected."""
    try:
        import tomllib
    except ImportError:  # python < 3.11
        import tomli as tomllib
    raw = Path(path).read_bytes()
    try:
        doc = tomllib.loads(raw.decode("utf-8"))
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config is not valid TOML: {exc}") from None
    fields = {f.name for f in EvolutionConfig.__dataclass_fields__.values()}
    unknown = set(doc) - fields
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    for key in ("level_seeds", "init_depths", "trace_files", "objective_weights",
                "trace_weights"):
        if key in doc:
            doc[key] = tuple(doc[key])
    try:
        config = EvolutionConfig(**doc)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    return config.validate()


@dataclass
class Individual:
    chromosome: Chromosome
    fitness: float = None
    summary: dict = None


@dataclass
class Population:
    individuals: list
    generation: int

    def __len__(self):
        return len(self.individuals)


@dataclass(frozen=True)
class GenerationStats:
    generation: int
    best_fitness: float
    mean_fitness: float
    best_node_count: int
    mean_node_count: float
    evaluations: int
    wall_clock_ms: float


@dataclass
class EvolveResult:
    best: Chromosome
    best_fitness: float
    stats_history: list
    population: Population


def init_population(config: EvolutionConfig, rng) -> Population:
    """Ramped half-and-half: depths cycle over init_depths, alternating grow
    and full in blocks, so N=100 over depths 3..7 gives 10 grow + 10 full
    trees per depth."""
    depths = config.init_depths
    individuals = []
    for i in range(config.population_size):
        depth = depths[i % len(depths)]
        method = GROW if (i // len(depths)) % 2 == 0 else FULL
        root = random_tree(rng, method, depth, GeneType.ACT)
        individuals.append(Individual(chromosome=Chromosome(root)))
    return Population(individuals=individuals, generation=0)


def roulette_select(weights, rng) -> int:
    """Fitness-proportional index selection.

    Returns i with probability weights[i] / sum(weights). All-zero weights
    fall back to a uniform draw (logged); negative weights are rejected.
    """
    w = np.asarray(weights, np.float64)
    if w.size == 0:
        raise ValueError("cannot select from an empty weight list")
    if (w < 0).any():
        raise ValueError("roulette weights must be nonnegative")
    total = float(w.sum())
    if total <= 0.0:
        log.warning("all-zero roulette weights; falling back to uniform")
        return int(rng.integers(w.size))
    cum = np.cumsum(w)
    u = rng.random() * total
    return int(np.searchsorted(cum, u, side="right"))


def _elite_order(ind: Individual):
    return (-ind.fitness, ind.chromosome.node_count, ind.chromosome.id)


def next_generation(pop: Population, config: EvolutionConfig, rng) -> Population:
    """Assemble the next population: elites, fresh chromosomes, offspring.

    Slots are filled in a fixed order so the RNG stream is reproducible:
    (a) elite_count fittest copied unchanged (ties broken by node count, then
    id), (b) round(fresh_rate*N) fresh grow trees, (c) the rest by crossover
    of two roulette parents with probability crossover_rate, else a copy of
    one roulette parent. Every (b)/(c) chromosome is then single-point
    mutated with probability mutation_rate.
    """
    if any(ind.fitness is None for ind in pop.individuals):
        raise ValueError("all fitness values must be assigned before reproduction")
    n = config.population_size
    weights = [ind.fitness for ind in pop.individuals]
    elites = sorted(pop.individuals, key=_elite_order)[:config.elite_count]
    out = [Individual(chromosome=e.chromosome) for e in elites]

    def maybe_mutate(chrom):
        if rng.random() < config.mutation_rate:
            return mutate(chrom, rng)
        return chrom

    depths = config.init_depths
    for _ in range(config.fresh_count()):
        depth = depths[int(rng.integers(len(depths)))]
        chrom = Chromosome(random_tree(rng, GROW, depth, GeneType.ACT))
        out.append(Individual(chromosome=maybe_mutate(chrom)))
    while len(out) < n:
        if rng.random() < config.crossover_rate:
            pa = pop.individuals[roulette_select(weights, rng)].chromosome
            pb = pop.individuals[roulette_select(weights, rng)].chromosome
            child = crossover(pa, pb, rng)
        else:
            child = pop.individuals[roulette_select(weights, rng)].chromosome
        out.append(Individual(chromosome=maybe_mutate(child)))
    return Population(individuals=out, generation=pop.generation + 1)


def objective_fitness_fn(config: EvolutionConfig):
    def fn(chromosome, level):
        episode = run_episode(level, chromosome, budget=config.frame_budget)
        report = fitness_objective(episode, config.objective_weights,
                                   level=level, budget=config.frame_budget)
        return report.aggregate, episode
    return fn


def trace_fitness_fn(config: EvolutionConfig, humans):
    """Imitation fitness against reference traces.

    PlayTrace references are matched to their own level (header checked
    against the config; every configured level seed needs at least one);
    raw symbol sequences apply to every level.
    """
    from .traces import PlayTrace

    by_seed = {}
    shared = []
    for human in humans:
        if isinstance(human, PlayTrace):
            h = human.header
            if (h.difficulty, h.width) != (config.difficulty, config.width):
                raise ConfigError(
                    f"trace {human.trace_id} is from difficulty {h.difficulty}"
                    f"/width {h.width}, config wants {config.difficulty}"
                    f"/{config.width}")
            if h.level_seed not in config.level_seeds:
                raise ConfigError(
                    f"trace {human.trace_id} is from level seed {h.level_seed},"
                    f" not one of {list(config.level_seeds)}")
            by_seed.setdefault(h.level_seed, []).extend(
                reference_symbols([human]))
        else:
            shared.extend(reference_symbols([human]))
    if by_seed:
        uncovered = [s for s in config.level_seeds
                     if s not in by_seed and not shared]
        if uncovered:
            raise ConfigError(f"no reference trace for level seeds {uncovered}")

    def fn(chromosome, level):
        refs = by_seed.get(level.seed, []) + shared
        episode = run_episode(level, chromosome, budget=config.frame_budget)
        report = fitness_trace(episode, refs, config.trace_weights, level=level)
        return report.aggregate, episode
    return fn


def _evaluate(pop: Population, levels, fitness_fn, workers: int):
    def one(ind: Individual):
        total = 0.0
        wins = 0
        best_x = 0
        score = 0
        for level in levels:
            value, episode = fitness_fn(ind.chromosome, level)
            total += value
            wins += episode.won
            best_x = max(best_x, episode.max_x)
            score += episode.score
        ind.fitness = total / len(levels)
        ind.summary = {"wins": wins, "best_x": best_x, "score": score}

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(one, pop.individuals))
    else:
        for ind in pop.individuals:
            one(ind)


def evolve(config: EvolutionConfig, fitness_fn=None, progress_sink=None,
           workers: int = None) -> EvolveResult:
    """Run the generational loop and return the best chromosome found.

    ``fitness_fn(chromosome, level) -> (value, episode)`` defaults to the
    config's fitness mode. Every individual is evaluated on all level seeds
    and fitnesses are averaged. ``progress_sink(stats, best_chromosome)`` is
    called once per generation from the driving thread.
    """
    config.validate()
    if fitness_fn is None:
        if config.fitness_mode == "trace":
            from .traces import load_trace
            humans = [load_trace(p) for p in config.trace_files]
            fitness_fn = trace_fitness_fn(config, humans)
        else:
            fitness_fn = objective_fitness_fn(config)
    if workers is None:
        workers = min(8, os.cpu_count() or 1)
    levels = [generate_level(seed, config.difficulty, config.width)
              for seed in config.level_seeds]
    rng = np.random.default_rng(config.master_seed)
    pop = init_population(config, rng)
    stats_history = []
    best_ind = None
    for _ in range(config.max_generations):
        t0 = time.perf_counter()
        _evaluate(pop, levels, fitness_fn, workers)
        ms = (time.perf_counter() - t0) * 1000.0
        ranked = sorted(pop.individuals, key=_elite_order)
        gen_best = ranked[0]
        if best_ind is None or gen_best.fitness > best_ind.fitness:
            best_ind = Individual(chromosome=gen_best.chromosome,
                                  fitness=gen_best.fitness,
                                  summary=gen_best.summary)
        stats = GenerationStats(
            generation=pop.generation,
            best_fitness=gen_best.fitness,
            mean_fitness=float(np.mean([i.fitness for i in pop.individuals])),
            best_node_count=gen_best.chromosome.node_count,
            mean_node_count=float(np.mean(
                [i.chromosome.node_count for i in pop.individuals])),
            evaluations=len(pop.individuals) * len(levels),
            wall_clock_ms=ms)
        stats_history.append(stats)
        if progress_sink is not None:
            progress_sink(stats, gen_best.chromosome)
        if (config.stop_fitness is not None
                and gen_best.fitness >= config.stop_fitness):
            break
        if pop.generation + 1 >= config.max_generations:
            break
        pop = next_generation(pop, config, rng)
    return EvolveResult(best=best_ind.chromosome, best_fitness=best_ind.fitness,
                        stats_history=stats_history, population=pop)


STATS_HEADER = ("gen", "best", "mean", "best_nodes", "mean_nodes", "evals", "ms")


def write_stats_csv(path, stats_history) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(STATS_HEADER)
        for s in stats_history:
            writer.writerow([s.generation, f"{s.best_fitness:.6f}",
                             f"{s.mean_fitness:.6f}", s.best_node_count,
                             f"{s.mean_node_count:.2f}", s.evaluations,
                             f"{s.wall_clock_ms:.1f}"])
