import numpy as np
import pytest

from conftest import random_derangement, random_matrix
from derangement.costs import CostMatrix, derived_matrix, is_edge_distinct, permutation_cost
from derangement.engine import FIRST
from derangement.exceptions import CreatesFixedPoint, CreatesTwoCycle, InvalidStart
from derangement.loop import (
    ENGINE_FIXED_POINT,
    ITERATION_CAP,
    ORACLE_CERTIFIED,
    ImproveConfig,
    apply_cycle,
    improve,
)
from derangement.oracle import min_derangement
from derangement.permutation import (
    TWO_FACTOR,
    CycleForm,
    compose,
    from_cycles,
    from_mapping,
    is_derangement,
    parse_cycles,
)


def test_apply_cycle_examples():
    d = from_mapping([2, 1, 4, 3])
    assert apply_cycle(d, parse_cycles("(1 3 2 4)", 4)).images == (4, 3, 1, 2)
    assert apply_cycle(d, CycleForm((), 4)) == d
    with pytest.raises(CreatesFixedPoint):
        apply_cycle(from_mapping([2, 3, 1]), parse_cycles("(1 2)", 3))


def test_apply_cycle_two_factor_rejects_two_cycles():
    d = from_mapping([2, 3, 4, 5, 6, 1])
    # (1 3): 1 -> D(3) = 4 while 4 still maps to 5, 3 -> D(1) = 2 and 2 -> 3
    c = parse_cycles("(1 3)", 6)
    assert apply_cycle(d, c).images == (4, 3, 2, 5, 6, 1)
    with pytest.raises(CreatesTwoCycle):
        apply_cycle(d, c, TWO_FACTOR)


def test_improve_w4(w4):
    trace = improve(w4, from_mapping([2, 1, 4, 3]))
    assert trace.n_improvements == 1
    assert str(trace.steps[0].cycle) == "(1 3 2 4)" and trace.steps[0].weight == -36
    assert trace.final.images == (4, 3, 1, 2) and trace.final_cost == 4
    assert trace.status == ENGINE_FIXED_POINT
    checked = improve(w4, from_mapping([2, 1, 4, 3]), ImproveConfig(oracle_check=True))
    assert checked.status == ORACLE_CERTIFIED and checked.oracle_optimum == 4


def test_improve_t3(t3):
    trace = improve(t3, None, ImproveConfig(oracle_check=True))
    assert trace.n_improvements == 0 and trace.final_cost == 11
    assert trace.status == ORACLE_CERTIFIED


def test_all_equal_costs_never_move():
    m = CostMatrix(np.full((6, 6), 3))
    for d0 in (None, from_mapping([2, 1, 4, 3, 6, 5])):
        trace = improve(m, d0)
        assert trace.n_improvements == 0 and trace.status == ENGINE_FIXED_POINT


def test_invalid_start(w4):
    with pytest.raises(InvalidStart):
        improve(w4, from_mapping([1, 2, 4, 3]))
    with pytest.raises(InvalidStart):
        improve(w4, from_mapping([2, 1, 4, 3]), ImproveConfig(mode=TWO_FACTOR))
    with pytest.raises(InvalidStart):
        improve(CostMatrix(np.zeros((1, 1), dtype=int)))


def test_iteration_cap(w4):
    trace = improve(w4, from_mapping([2, 1, 4, 3]), ImproveConfig(policy=FIRST, max_iter=1))
    assert trace.status == ITERATION_CAP
    assert trace.n_improvements == 1 and trace.final_cost == 22


def test_config_validation():
    with pytest.raises(ValueError):
        ImproveConfig(mode="cover")
    with pytest.raises(ValueError):
        ImproveConfig(policy="greedy")
    with pytest.raises(ValueError):
        ImproveConfig(labels=0)


@pytest.mark.parametrize("mode", ["assignment", TWO_FACTOR])
@pytest.mark.parametrize("policy", ["first", "best"])
def test_trace_invariants(mode, policy):
    rng = np.random.default_rng(17)
    for seed in range(40):
        n = 4 + seed % 6
        m = random_matrix(n, seed)
        d0 = random_derangement(n, rng, two_factor=mode == TWO_FACTOR)
        trace = improve(m, d0, ImproveConfig(mode=mode, policy=policy))
        costs = [s.cost for s in trace.steps]
        assert all(a > b for a, b in zip(costs, costs[1:]))
        for before, after in zip(trace.steps, trace.steps[1:]):
            assert after.derangement == compose(before.derangement, from_cycles(before.cycle))
            assert after.cost - before.cost == before.weight
            assert permutation_cost(m, after.derangement) == after.cost
        for step in trace.steps:
            assert is_derangement(step.derangement, mode)
            if mode == TWO_FACTOR:
                assert is_edge_distinct(step.derangement)
        assert trace.steps[-1].cycle is None
        assert trace.final_cost >= min_derangement(m, mode).optimum_value


def test_rejected_candidates_are_skipped(monkeypatch, w4):
    # feed the loop a cycle that would fix a point, then the real one
    import derangement.loop as loop_mod

    real = loop_mod.NegativeCycleSearch

    class Wrapped(real):
        def __iter__(self):
            good = list(super().__iter__())
            if good:
                bogus = type(good[0])(
                    cycle=parse_cycles("(1 2)", 4), weight=-1, columns_used=0,
                    provenance="closed-at-source", order=(1, 2), source=1,
                )
                yield bogus
            yield from good

    monkeypatch.setattr(loop_mod, "NegativeCycleSearch", Wrapped)
    trace = improve(w4, from_mapping([2, 1, 4, 3]))
    assert trace.steps[0].rejected == 1
    assert trace.final_cost == 4


def test_engine_gap_is_reported_honestly():
    """With one label per cell the engine may stop short; the oracle says so."""
    statuses = set()
    for seed in range(60):
        m = random_matrix(7, seed)
        trace = improve(m, None, ImproveConfig(labels=1, oracle_check=True))
        statuses.add(trace.status)
        best = min_derangement(m).optimum_value
        assert (trace.status == ORACLE_CERTIFIED) == (trace.final_cost == best)
    assert ORACLE_CERTIFIED in statuses


def test_derived_matrix_has_no_negative_cycle_when_certified():
    from derangement.oracle import exhaustive_negative_cycle

    for seed in range(20):
        m = random_matrix(6, seed)
        trace = improve(m, None, ImproveConfig(oracle_check=True))
        if trace.status == ORACLE_CERTIFIED:
            assert exhaustive_negative_cycle(derived_matrix(m, trace.final), admissible_only=False) is None
