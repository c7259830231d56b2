"""Cycle-cancelling outer loop: compose negative cycles into the derangement
until the search comes back empty."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .costs import CostMatrix, cycle_weight, derived_matrix, is_edge_distinct, permutation_cost
from .engine import (
    BEST,
    POLICIES,
    IterationRecord,
    NegativeCycle,
    NegativeCycleSearch,
    SearchConfig,
)
from .exceptions import (
    CreatesFixedPoint,
    CreatesTwoCycle,
    InvalidStart,
    InvariantViolation,
    SizeMismatch,
)
from .permutation import (
    ASSIGNMENT,
    MODES,
    TWO_FACTOR,
    CycleForm,
    Permutation,
    canonical_n_cycle,
    compose,
    from_cycles,
    is_derangement,
)

logger = logging.getLogger(__name__)

ENGINE_FIXED_POINT = "engine-fixed-point"
ORACLE_CERTIFIED = "oracle-certified-optimal"
ORACLE_REFUTED = "oracle-refuted"
ITERATION_CAP = "iteration-cap"
STATUSES = (ENGINE_FIXED_POINT, ORACLE_CERTIFIED, ORACLE_REFUTED, ITERATION_CAP)


@dataclass(frozen=True)
class ImproveConfig:
    mode: str = ASSIGNMENT
    policy: str = BEST
    labels: int = 4
    max_iter: int = 1000
    retry_limit: int = 16
    prune_nonnegative: bool = True
    negative_entries_only: bool = False
    oracle_check: bool = False
    oracle_limit: int = 9

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.policy not in POLICIES:
            raise ValueError(f"policy must be one of {POLICIES}, got {self.policy!r}")
        for name in ("labels", "max_iter", "retry_limit", "oracle_limit"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")

    def search_config(self) -> SearchConfig:
        return SearchConfig(
            policy=self.policy,
            labels=self.labels,
            prune_nonnegative=self.prune_nonnegative,
            negative_entries_only=self.negative_entries_only,
        )


@dataclass(frozen=True)
class Step:
    index: int
    derangement: Permutation
    cost: int
    cycle: CycleForm | None = None
    weight: int | None = None
    columns: int = 0
    rejected: int = 0
    search_log: tuple[IterationRecord, ...] = ()


@dataclass
class ImprovementTrace:
    steps: list[Step] = field(default_factory=list)
    status: str = ENGINE_FIXED_POINT
    mode: str = ASSIGNMENT
    oracle_optimum: int | None = None

    @property
    def final(self) -> Permutation:
        return self.steps[-1].derangement

    @property
    def final_cost(self) -> int:
        return self.steps[-1].cost

    @property
    def n_improvements(self) -> int:
        return sum(1 for s in self.steps if s.cycle is not None)


def check_start(d: Permutation, mode: str) -> None:
    if not is_derangement(d, ASSIGNMENT):
        raise InvalidStart(f"{d} has a fixed point")
    if mode == TWO_FACTOR and not is_edge_distinct(d):
        raise InvalidStart(f"{d} contains a 2-cycle; two-factor mode needs cycles of length >= 3")


def apply_cycle(d: Permutation, c: CycleForm, mode: str = ASSIGNMENT) -> Permutation:
    """Return ``d∘c``; it must still be a derangement valid for ``mode``."""
    result = compose(d, from_cycles(c))
    for x in range(1, result.n + 1):
        if result(x) == x:
            raise CreatesFixedPoint(f"{c} fixes point {x}")
    if mode == TWO_FACTOR and not is_derangement(result, TWO_FACTOR):
        raise CreatesTwoCycle(f"{c} creates a 2-cycle")
    return result


def improve(
    m: CostMatrix,
    d0: Permutation | None = None,
    config: ImproveConfig = ImproveConfig(),
) -> ImprovementTrace:
    d = d0 if d0 is not None else canonical_n_cycle(m.n)
    if d.n != m.n:
        raise SizeMismatch(f"matrix has {m.n} points, derangement {d.n}")
    check_start(d, config.mode)
    search_config = config.search_config()
    trace = ImprovementTrace(mode=config.mode)
    cost = permutation_cost(m, d)
    status = ITERATION_CAP
    for index in range(config.max_iter):
        dm = derived_matrix(m, d)
        search = NegativeCycleSearch(dm, search_config)
        chosen: NegativeCycle | None = None
        successor = None
        rejected = 0
        for cand in search:
            try:
                successor = apply_cycle(d, cand.cycle, config.mode)
            except (CreatesFixedPoint, CreatesTwoCycle) as exc:
                logger.debug("step %d: rejected %s (%s)", index, cand.cycle, exc)
                rejected += 1
                if rejected >= config.retry_limit:
                    break
                continue
            chosen = cand
            break
        if chosen is None:
            trace.steps.append(
                Step(index, d, cost, rejected=rejected, columns=search.counter.columns,
                     search_log=tuple(search.log))
            )
            status = ENGINE_FIXED_POINT
            break
        new_cost = permutation_cost(m, successor)
        weight = cycle_weight(dm, chosen.cycle)
        if weight != chosen.weight or new_cost - cost != weight or weight >= 0:
            raise InvariantViolation(
                f"step {index}: cost {cost} -> {new_cost} but cycle weight {chosen.weight}"
            )
        if config.mode == TWO_FACTOR and not is_edge_distinct(successor):
            raise InvariantViolation(f"step {index}: {successor} is not edge-distinct")
        trace.steps.append(
            Step(index, d, cost, chosen.cycle, weight, chosen.columns_used, rejected,
                 tuple(search.log))
        )
        d, cost = successor, new_cost
    else:
        trace.steps.append(Step(config.max_iter, d, cost))
    trace.status = status

    if config.oracle_check and m.n <= config.oracle_limit:
        from .oracle import min_derangement

        best = min_derangement(m, config.mode, limit=config.oracle_limit).optimum_value
        trace.oracle_optimum = best
        if trace.final_cost < best:
            raise InvariantViolation(f"final cost {trace.final_cost} beats the oracle {best}")
        trace.status = ORACLE_CERTIFIED if trace.final_cost == best else ORACLE_REFUTED
    return trace
