"""Brute-force ground truth for small instances.

Nothing here is clever on purpose: permutations and cycles are enumerated
outright so that the results can be trusted independently of the engine.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .costs import FORBIDDEN, CostMatrix, DerivedMatrix, permutation_cost
from .engine import CLOSED_AT_SOURCE, NegativeCycle, admissible_rotation
from .exceptions import InvariantViolation, OracleLimitExceeded, RangeError
from .permutation import (
    ASSIGNMENT,
    MODES,
    TWO_FACTOR,
    CycleForm,
    Permutation,
    canonical_cycle,
    compose,
    from_cycles,
    is_derangement,
)

DEFAULT_LIMIT = 9


@dataclass(frozen=True)
class OracleResult:
    optimum_value: int | None
    witness: Permutation | None
    instances_examined: int


@lru_cache(maxsize=16)
def _all_permutations(n: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(n))), dtype=np.int8).reshape(-1, n)


def _check_limit(n: int, limit: int) -> None:
    if n > limit:
        raise OracleLimitExceeded(f"n={n} exceeds the oracle limit {limit}")


def min_derangement(m: CostMatrix, mode: str = ASSIGNMENT, limit: int = DEFAULT_LIMIT) -> OracleResult:
    """Minimum cost over every permutation that is a derangement for ``mode``.

    Ties go to the lexicographically smallest image tuple.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    n = m.n
    _check_limit(n, limit)
    perms = _all_permutations(n)
    idx = np.arange(n)
    valid = (perms != idx).all(axis=1)
    if mode == TWO_FACTOR:
        valid &= (np.take_along_axis(perms, perms.astype(np.intp), axis=1) != idx).all(axis=1)
    candidates = perms[valid]
    if len(candidates) == 0:
        return OracleResult(None, None, len(perms))
    costs = m.values[idx, candidates].sum(axis=1)
    # itertools order is lexicographic, so argmin picks the smallest tuple
    k = int(np.argmin(costs))
    witness = Permutation(tuple(int(v) + 1 for v in candidates[k]))
    best = int(costs[k])
    if permutation_cost(m, witness) != best or not is_derangement(witness, mode):
        raise InvariantViolation("oracle witness does not reproduce its value")
    return OracleResult(best, witness, len(perms))


def min_tour(m: CostMatrix, limit: int = DEFAULT_LIMIT) -> OracleResult:
    """Cheapest Hamiltonian cycle; the witness is the tour as a permutation."""
    n = m.n
    if n < 3:
        raise RangeError("a tour needs at least 3 points")
    _check_limit(n, limit)
    c = m.values
    best = None
    best_tour = None
    examined = 0
    for rest in itertools.permutations(range(1, n)):
        if rest[0] > rest[-1]:
            continue  # reversed duplicate
        examined += 1
        tour = (0,) + rest
        total = int(sum(c[tour[k], tour[k + 1]] for k in range(n - 1)) + c[tour[-1], 0])
        if best is None or total < best:
            best, best_tour = total, tour
    images = [0] * n
    for a, b in zip(best_tour, best_tour[1:] + best_tour[:1]):
        images[a] = b + 1
    witness = Permutation(tuple(images))
    if permutation_cost(m, witness) != best:
        raise InvariantViolation("tour witness does not reproduce its value")
    return OracleResult(best, witness, examined)


def simple_cycles(dm: DerivedMatrix):
    """Every simple cycle over non-forbidden arcs, with its weight.

    Cycles are produced once each, starting at their smallest vertex.
    """
    n = dm.n
    rows = dm.rows
    succ = [[j for j in range(1, n + 1) if rows[i][j] is not FORBIDDEN] if i else [] for i in range(n + 1)]
    for s in range(1, n + 1):
        path = [s]
        on_path = [False] * (n + 1)
        on_path[s] = True
        stack = [(iter(succ[s]), 0)]
        while stack:
            it, value = stack[-1]
            c = path[-1]
            for a in it:
                if a == s and len(path) >= 2:
                    yield tuple(path), value + rows[c][a]
                elif a > s and not on_path[a]:
                    path.append(a)
                    on_path[a] = True
                    stack.append((iter(succ[a]), value + rows[c][a]))
                    break
            else:
                stack.pop()
                on_path[path.pop()] = False


def exhaustive_negative_cycle(
    dm: DerivedMatrix,
    mode: str = ASSIGNMENT,
    admissible_only: bool = True,
    limit: int = DEFAULT_LIMIT,
) -> NegativeCycle | None:
    """Minimum-weight negative cycle over all simple cycles.

    With ``admissible_only`` a cycle counts only if some rotation of it passes
    the engine's admissibility predicate and composing it keeps a derangement
    valid for ``mode``. Without it every simple cycle counts, which is the
    classical optimality test for the assignment relaxation.
    """
    _check_limit(dm.n, limit)
    best = None
    examined = 0
    for cycle, weight in simple_cycles(dm):
        examined += 1
        if weight >= 0:
            continue
        if best is not None and (weight, cycle) >= (best[1], best[0]):
            continue
        order = cycle
        if admissible_only:
            order = admissible_rotation(dm, cycle)
            if order is None:
                continue
        result = compose(dm.base, from_cycles(CycleForm((cycle,), dm.n)))
        if not is_derangement(result, mode):
            continue
        best = (cycle, weight, order)
    if best is None:
        return None
    cycle, weight, order = best
    return NegativeCycle(
        cycle=CycleForm((canonical_cycle(cycle),), dm.n),
        weight=weight,
        columns_used=0,
        provenance=CLOSED_AT_SOURCE,
        order=order,
        source=order[0],
        path=order + order[:1],
    )
