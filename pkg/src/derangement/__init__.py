"""Minimum-cost derangements by negative cycle cancellation.

A derangement of a symmetric cost matrix is improved by composing it with
negative cycles found in its derived matrix, whose entry ``(i, j)`` is the
cost change of sending ``i`` to ``D(j)`` instead of ``D(i)``. The result is
a lower bound on the cheapest tour when it is optimal; brute-force oracles
certify that at small sizes.
"""

__version__ = "0.1.0"

from .costs import (
    FORBIDDEN,
    CostMatrix,
    DerivedMatrix,
    cycle_weight,
    derived_matrix,
    edge_set,
    emit_matrix,
    load_matrix,
    permutation_cost,
)
from .engine import (
    NegativeCycle,
    SearchConfig,
    SearchPath,
    admissible_extension,
    extract_cycle,
    find_negative_cycle,
    forced_search,
)
from .estimator import DerangementImprover
from .loop import ImproveConfig, ImprovementTrace, apply_cycle, improve
from .oracle import exhaustive_negative_cycle, min_derangement, min_tour
from .permutation import (
    CycleForm,
    Permutation,
    compose,
    cycle_decomposition,
    from_cycles,
    from_mapping,
    inverse,
    is_derangement,
    row_form,
)

__all__ = [
    "FORBIDDEN",
    "CostMatrix",
    "CycleForm",
    "DerangementImprover",
    "DerivedMatrix",
    "ImproveConfig",
    "ImprovementTrace",
    "NegativeCycle",
    "Permutation",
    "SearchConfig",
    "SearchPath",
    "admissible_extension",
    "apply_cycle",
    "compose",
    "cycle_decomposition",
    "cycle_weight",
    "derived_matrix",
    "edge_set",
    "emit_matrix",
    "exhaustive_negative_cycle",
    "extract_cycle",
    "find_negative_cycle",
    "forced_search",
    "from_cycles",
    "from_mapping",
    "improve",
    "inverse",
    "is_derangement",
    "load_matrix",
    "min_derangement",
    "min_tour",
    "permutation_cost",
    "row_form",
]
