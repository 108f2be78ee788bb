"""Play-trace dissimilarity: normalized edit distance over event symbols.

Stands in for the external play-trace metric this pipeline was designed
around; the interface (a pure function of two event sequences returning a
value in [0, 1]) is the module boundary, so a different metric can drop in
without touching fitness or evolution.
"""

from dataclasses import dataclass, field

import numpy as np

from . import kernels as K
from .sim import EVENT_KINDS

MAX_SYMBOLS = 512  # sequences are truncated to this many symbols

# substituting a jump start for a landing (or vice versa) is half a miss
DEFAULT_PAIR_COSTS = {("JumpStart", "Land"): 0.5}


def _kind_of(name_or_code):
    if isinstance(name_or_code, str):
        return EVENT_KINDS[name_or_code]
    return int(name_or_code)


@dataclass(frozen=True)
class DissimilarityParams:
    """Costs for the edit distance. Substitution of unequal symbols costs 1
    by default, overridable per unordered kind pair; insert/delete cost 1."""

    pair_costs: dict = field(default_factory=lambda: dict(DEFAULT_PAIR_COSTS))
    indel_cost: float = 1.0
    max_len: int = MAX_SYMBOLS

    def kind_cost_matrix(self) -> np.ndarray:
        m = np.ones((K.N_EVENT_KINDS, K.N_EVENT_KINDS), np.float64)
        for (a, b), cost in self.pair_costs.items():
            if not 0.0 <= cost <= 1.0:
                raise ValueError(f"substitution cost {cost} outside [0, 1]")
            ka, kb = _kind_of(a), _kind_of(b)
            m[ka, kb] = cost
            m[kb, ka] = cost
        return m


DEFAULT_PARAMS = DissimilarityParams()
_DEFAULT_MATRIX = DEFAULT_PARAMS.kind_cost_matrix()


def trace_dissimilarity(a, b, params: DissimilarityParams = DEFAULT_PARAMS,
                        ) -> float:
    """Normalized edit distance between two symbol sequences, in [0, 1].

    Minimal total cost of insertions, deletions and substitutions divided by
    max(len(a), len(b)); two empty sequences have distance 0. Substitution
    cost never exceeds the indel cost, so the bound 1 is tight.
    """
    a = np.asarray(a, np.int64)[:params.max_len]
    b = np.asarray(b, np.int64)[:params.max_len]
    if a.size == 0 and b.size == 0:
        return 0.0
    if params is DEFAULT_PARAMS:
        matrix = _DEFAULT_MATRIX
    else:
        matrix = params.kind_cost_matrix()
    cost = K.edit_distance(a, b, matrix)
    return float(cost) / max(a.size, b.size)
