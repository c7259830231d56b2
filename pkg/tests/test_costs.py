import numpy as np
import pytest

from conftest import T3_TEXT, W4_TEXT, direct_cost, random_derangement, random_matrix
from derangement.costs import (
    FORBIDDEN,
    CostMatrix,
    cycle_weight,
    derived_matrix,
    edge_set,
    emit_matrix,
    is_edge_distinct,
    load_matrix,
    permutation_cost,
)
from derangement.exceptions import (
    AsymmetryError,
    FixedPointCost,
    ForbiddenArc,
    ParseError,
    RangeError,
)
from derangement.permutation import CycleForm, from_mapping, identity, parse_cycles, parse_permutation


def test_load_t3(t3):
    assert t3.n == 3
    assert (t3.cost(1, 2), t3.cost(1, 3), t3.cost(2, 3)) == (5, 2, 4)
    assert emit_matrix(t3) == T3_TEXT


def test_load_rejects_asymmetry():
    with pytest.raises(AsymmetryError) as err:
        load_matrix("3\n0 5 2\n6 0 4\n2 4 0")
    assert err.value.pair == (1, 2)


def test_load_degenerate_and_diagonal():
    one = load_matrix("1\n0")
    assert one.n == 1
    # diagonal tokens are accepted but never read
    m = load_matrix("3\n7 5 2\n5 -3 4\n2 4 9")
    assert permutation_cost(m, from_mapping([2, 3, 1])) == 11


@pytest.mark.parametrize(
    "text",
    ["", "x\n0", "2\n0 1\n1", "2\n0 1\n1 0\n5 5", "2 2\n0 1\n1 0", "2\n0 1_0\n1_0 0", "0\n"],
)
def test_load_parse_errors(text):
    with pytest.raises(ParseError):
        load_matrix(text)


def test_load_range_cap():
    big = 2**62
    with pytest.raises(RangeError):
        load_matrix(f"2\n0 {big}\n{big} 0")


def test_permutation_cost_examples(t3, w4):
    assert permutation_cost(t3, parse_permutation("(1 2 3)", 3)) == 11
    assert permutation_cost(w4, from_mapping([2, 1, 4, 3])) == 40
    with pytest.raises(FixedPointCost):
        permutation_cost(t3, identity(3))


def test_edge_set_examples():
    assert edge_set(from_mapping([2, 1, 4, 3])) == {(1, 2): 2, (3, 4): 2}
    assert not is_edge_distinct(from_mapping([2, 1, 4, 3]))
    assert edge_set(from_mapping([2, 3, 1])) == {(1, 2): 1, (2, 3): 1, (1, 3): 1}
    e = edge_set(parse_permutation("(1 4 2 3)", 4))
    assert e == {(1, 4): 1, (2, 4): 1, (2, 3): 1, (1, 3): 1}
    with pytest.raises(FixedPointCost):
        edge_set(identity(2))


def test_derived_t3(t3):
    dm = derived_matrix(t3, parse_permutation("(1 2 3)", 3))
    assert dm[1, 2] == -3 and dm[2, 3] == 1 and dm[3, 1] == 2
    assert dm[1, 3] is FORBIDDEN and dm[2, 1] is FORBIDDEN and dm[3, 2] is FORBIDDEN
    assert all(dm[i, i] is FORBIDDEN for i in range(1, 4))
    assert dm.render() == "x -3 x\nx x 1\n2 x x\n"


def test_derived_w4(w4):
    dm = derived_matrix(w4, from_mapping([2, 1, 4, 3]))
    for i, j in [(1, 3), (3, 2), (2, 4), (4, 1)]:
        assert dm[i, j] == -9


def test_cycle_weight_examples(t3, w4):
    dm3 = derived_matrix(t3, parse_permutation("(1 2 3)", 3))
    assert cycle_weight(dm3, parse_cycles("(1 2 3)", 3)) == 0
    dm4 = derived_matrix(w4, from_mapping([2, 1, 4, 3]))
    assert cycle_weight(dm4, parse_cycles("(1 3 2 4)", 4)) == -36
    with pytest.raises(ForbiddenArc):
        cycle_weight(dm4, parse_cycles("(1 2)", 4))


def test_forbidden_placement():
    rng = np.random.default_rng(3)
    for seed in range(50):
        n = int(rng.integers(2, 10))
        m = random_matrix(n, seed)
        d = random_derangement(n, rng)
        dm = derived_matrix(m, d)
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                assert (dm[i, j] is FORBIDDEN) == (j == i or d(j) == i)
                if dm[i, j] is not FORBIDDEN:
                    assert dm[i, j] == m.cost(i, d(j)) - m.cost(i, d(i))


def test_derived_reads_directed_entries():
    # symmetry is enforced at load time only; force an asymmetric matrix in
    m = CostMatrix(np.zeros((3, 3), dtype=np.int64))
    object.__setattr__(m, "values", np.array([[0, 1, 2], [7, 0, 3], [5, 3, 0]]))
    d = from_mapping([3, 1, 2])
    dm = derived_matrix(m, d)
    assert dm[2, 3] is FORBIDDEN  # d(3) = 2
    # row 2: here = cost(2, d(2)) = cost(2, 1) = 7; arc (2, 1) targets d(1) = 3
    assert dm[2, 1] == 3 - 7
    # row 3: here = cost(3, 2) = 3; arc (3, 2) targets d(2) = 1, read as cost(3, 1) = 5
    assert dm[3, 2] == 5 - 3


def test_telescoping_identity():
    """cost(D∘C) - cost(D) equals the derived cycle weight, on 1000+ triples."""
    rng = np.random.default_rng(20240517)
    checked = 0
    while checked < 1200:
        n = int(rng.integers(2, 13))
        m = random_matrix(n, int(rng.integers(2**32)))
        d = random_derangement(n, rng)
        k = int(rng.integers(2, n + 1))
        cycle = tuple(int(v) + 1 for v in rng.choice(n, size=k, replace=False))
        dm = derived_matrix(m, d)
        try:
            weight = cycle_weight(dm, cycle)
        except ForbiddenArc:
            continue
        # D∘C by hand: x on the cycle goes to D(next(x)), others keep D(x)
        nxt = {a: b for a, b in zip(cycle, cycle[1:] + cycle[:1])}
        images = [d(nxt.get(x, x)) for x in range(1, n + 1)]
        assert all(images[x - 1] != x for x in range(1, n + 1))
        values = m.values.tolist()
        assert direct_cost(values, images) - direct_cost(values, d.images) == weight
        checked += 1


def test_emit_round_trip():
    text = W4_TEXT
    assert emit_matrix(load_matrix(text)) == text


def test_cost_matrix_is_immutable(w4):
    with pytest.raises(ValueError):
        w4.values[0, 1] = 3


def test_cycle_weight_rejects_multi_cycle(w4):
    dm = derived_matrix(w4, from_mapping([2, 1, 4, 3]))
    with pytest.raises(ValueError):
        cycle_weight(dm, CycleForm(((1, 3), (2, 4)), 4))
