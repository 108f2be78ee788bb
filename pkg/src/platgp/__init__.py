"""platgp: a deterministic 2D platformer plus genetic programming of
decision-tree agents, driven by recorded play traces."""

from .control import ControlVector
from .evolve import (EvolutionConfig, EvolveResult, GenerationStats,
                     Population, evolve, init_population, load_config,
                     next_generation, roulette_select)
from .fitness import FitnessReport, fitness_objective, fitness_trace
from .genes import (GENE_TABLE, Chromosome, GeneType, GeneTypeError, Node,
                    evaluate, gene)
from .gp_ops import crossover, mutate, random_chromosome, random_tree
from .kernels import BACKEND
from .levels import (Level, LevelError, generate_level, parse_level,
                     serialize_level, validate_level)
from .metric import DissimilarityParams, trace_dissimilarity
from .sim import (DEFAULT_FRAME_BUDGET, EpisodeResult, Event, Observation,
                  WorldState, observe, replay_inputs, run_episode, step)
from .traces import (PlayTrace, TraceError, extract_events, load_trace,
                     replay_trace, save_trace, trace_from_episode,
                     validate_trace)
from .treeio import parse, serialize, to_dot, to_pseudocode

__version__ = "0.1.0"
