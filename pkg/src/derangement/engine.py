"""Negative-cycle search in a derived matrix.

The search is a level-by-level label extension: iteration ``i`` holds, for
every (source, endpoint) cell, up to ``labels`` simple paths with ``i`` arcs.
Each path also tracks the undirected cost-matrix edges its arcs create; an
arc ``(c, a)`` creates the edge ``{c, D(a)}``. An extension is admissible only
if the path keeps exactly one distinct new edge per arc and never recreates
an edge of ``D`` that survives the move (see :func:`admissible_extension`).

A cycle is reported when a path closes back at its source with negative
total value. In non-simple mode a path may also run into one of its own
interior vertices; the loop it closed is cut out and reported on its own if
it is negative and admissible from its entry vertex.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .costs import FORBIDDEN, DerivedMatrix, cycle_weight
from .exceptions import ForbiddenArc, InvariantViolation, MultipleRepeats, NotNonSimple
from .permutation import CycleForm, canonical_cycle

FIRST = "first"
BEST = "best"
POLICIES = (FIRST, BEST)

CLOSED_AT_SOURCE = "closed-at-source"
EXTRACTED = "extracted-from-nonsimple"


@dataclass(frozen=True)
class SearchConfig:
    policy: str = BEST
    labels: int = 4
    prune_nonnegative: bool = True
    # Treat non-negative derived entries as absent (the "restricted to
    # negative entries" reading of the searched matrix).
    negative_entries_only: bool = False
    nonsimple: bool = False
    sources: tuple[int, ...] | None = None
    max_iterations: int | None = None

    def __post_init__(self):
        if self.policy not in POLICIES:
            raise ValueError(f"policy must be one of {POLICIES}, got {self.policy!r}")
        if self.labels < 1:
            raise ValueError("labels must be positive")


@dataclass(frozen=True, slots=True)
class SearchPath:
    source: int
    vertices: tuple[int, ...]
    value: int
    new_edges: tuple[tuple[int, int], ...] = ()
    # Bitsets over vertices, arcs (x*(n+1)+y) and edges (lo*(n+1)+hi).
    vmask: int = 0
    arcmask: int = 0
    edgemask: int = 0

    @property
    def end(self) -> int:
        return self.vertices[-1]

    @property
    def arcs(self) -> int:
        return len(self.vertices) - 1

    @classmethod
    def start(cls, source: int) -> "SearchPath":
        return cls(source, (source,), 0, (), 1 << source, 0, 0)

    @classmethod
    def from_vertices(cls, dm: DerivedMatrix, vertices: Sequence[int]) -> "SearchPath":
        """Build a path arc by arc without checking admissibility."""
        q = cls.start(vertices[0])
        for a in vertices[1:]:
            q = _extend(q, dm, a)
        return q


@dataclass
class ColumnCounter:
    columns: int = 0

    def add(self, k: int = 1) -> None:
        if k < 0:
            raise InvariantViolation("column counter must not decrease")
        self.columns += k


@dataclass(frozen=True)
class NegativeCycle:
    cycle: CycleForm
    weight: int
    columns_used: int
    provenance: str
    # vertex order as discovered, starting at the vertex the cycle was closed on
    order: tuple[int, ...]
    source: int
    # the full discovering walk, ending with the repeated vertex
    path: tuple[int, ...] = ()
    iteration: int = 0

    @property
    def vertices(self) -> tuple[int, ...]:
        return self.cycle.cycles[0]


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    extensions: int
    labels: int
    columns: int
    cycles: int


@dataclass
class PathMatrix:
    iteration: int
    cells: dict[tuple[int, int], list[SearchPath]]
    found: list[NegativeCycle] = field(default_factory=list)
    attempts: int = 0

    def paths(self) -> Iterator[SearchPath]:
        for key in sorted(self.cells):
            yield from self.cells[key]

    @property
    def size(self) -> int:
        return sum(len(v) for v in self.cells.values())


# -- admissibility ------------------------------------------------------------


def _admissible(dm: DerivedMatrix, q: SearchPath, a: int) -> bool:
    c = q.vertices[-1]
    n1 = dm.n + 1
    vmask = q.vmask
    if (vmask >> a) & 1 and a != q.source:
        return False
    da = dm.image[a]
    # (1) the new edge {c, D(a)} is an edge of D: D(a) must already be rerouted
    if dm.image[da] == c and not (vmask >> da) & 1:
        return False
    # (2) an earlier arc (D(a), D^-1(c)) already created {c, D(a)}
    if (q.arcmask >> (da * n1 + dm.base_inverse[c])) & 1:
        return False
    lo, hi = (c, da) if c < da else (da, c)
    return not (q.edgemask >> (lo * n1 + hi)) & 1


def admissible_extension(q: SearchPath, dm: DerivedMatrix, a: int) -> bool:
    """Whether arc ``(q.end, a)`` may be appended to ``q``.

    ``a == q.source`` is accepted only as the closing arc of a cycle.
    """
    c = q.end
    if a == c or dm.rows[c][a] is FORBIDDEN:
        raise ForbiddenArc(c, a)
    return _admissible(dm, q, a)


def _extend(q: SearchPath, dm: DerivedMatrix, a: int) -> SearchPath:
    c = q.vertices[-1]
    n1 = dm.n + 1
    da = dm.image[a]
    lo, hi = (c, da) if c < da else (da, c)
    return SearchPath(
        q.source,
        q.vertices + (a,),
        q.value + dm.rows[c][a],
        q.new_edges + ((lo, hi),),
        q.vmask | (1 << a),
        q.arcmask | (1 << (c * n1 + a)),
        q.edgemask | (1 << (lo * n1 + hi)),
    )


def cycle_is_admissible(dm: DerivedMatrix, order: Sequence[int]) -> bool:
    """Check a cycle arc by arc, starting the path at ``order[0]``."""
    order = tuple(order)
    if len(order) < 2:
        return False
    q = SearchPath.start(order[0])
    for a in order[1:] + order[:1]:
        if dm.rows[q.end][a] is FORBIDDEN or not _admissible(dm, q, a):
            return False
        q = _extend(q, dm, a)
    return True


def admissible_rotation(dm: DerivedMatrix, cycle: Sequence[int]) -> tuple[int, ...] | None:
    """First rotation of ``cycle`` that passes the predicate, if any."""
    cycle = tuple(cycle)
    for k in range(len(cycle)):
        order = cycle[k:] + cycle[:k]
        if cycle_is_admissible(dm, order):
            return order
    return None


def distinct_edge_count(dm: DerivedMatrix, vertices: Sequence[int]) -> int:
    """Distinct edges ``{x, D(y)}`` over the consecutive arcs of ``vertices``."""
    img = dm.image
    return len({frozenset((x, img[y])) for x, y in zip(vertices, vertices[1:])})


def extract_cycle(path: Sequence[int], n: int | None = None) -> CycleForm:
    """Cut the loop out of a walk whose last vertex repeats an earlier one."""
    path = tuple(path)
    if not path:
        raise NotNonSimple("empty path")
    counts: dict[int, int] = {}
    for v in path:
        counts[v] = counts.get(v, 0) + 1
    repeated = [v for v, k in counts.items() if k > 1]
    if not repeated:
        raise NotNonSimple(f"path {path} has no repeated vertex")
    if len(repeated) > 1 or counts[path[-1]] != 2:
        raise MultipleRepeats(f"path {path} must repeat exactly its last vertex once")
    start = path.index(path[-1])
    loop = path[start:-1]
    if len(loop) < 2:
        raise NotNonSimple(f"path {path} repeats a vertex without enclosing a cycle")
    return CycleForm((canonical_cycle(loop),), n if n is not None else max(path))


# -- search -------------------------------------------------------------------


def initial_matrix(dm: DerivedMatrix, config: SearchConfig) -> PathMatrix:
    sources = config.sources if config.sources is not None else range(1, dm.n + 1)
    return PathMatrix(0, {(s, s): [SearchPath.start(s)] for s in sorted(sources)})


def _make_cycle(dm, q, a, columns, provenance, iteration) -> NegativeCycle | None:
    if provenance == CLOSED_AT_SOURCE:
        order = q.vertices
        weight = q.value + dm.rows[q.end][a]
    else:
        k = q.vertices.index(a)
        order = q.vertices[k:]
        weight = cycle_weight(dm, order)
        if weight >= 0 or not cycle_is_admissible(dm, order):
            return None
    if weight >= 0:
        return None
    return NegativeCycle(
        cycle=CycleForm((canonical_cycle(order),), dm.n),
        weight=weight,
        columns_used=columns,
        provenance=provenance,
        order=order,
        source=q.source,
        path=q.vertices + (a,),
        iteration=iteration,
    )


def extend_iteration(
    pm: PathMatrix,
    dm: DerivedMatrix,
    counter: ColumnCounter,
    config: SearchConfig = SearchConfig(),
    usable: list[list[tuple[int, int]]] | None = None,
) -> PathMatrix:
    """Extend every retained path by one arc.

    Every scanned candidate column costs one unit on ``counter``. Cycles
    closed during the scan are collected on the returned matrix's ``found``
    list in discovery order.
    """
    n = dm.n
    n1 = n + 1
    image = dm.image
    k = config.labels
    nxt: dict[tuple[int, int], list[SearchPath]] = {}
    found: list[NegativeCycle] = []
    attempts = 0
    iteration = pm.iteration + 1
    prune = config.prune_nonnegative
    neg_only = config.negative_entries_only
    nonsimple = config.nonsimple
    if usable is None:
        usable = _usable_arcs(dm, neg_only)
    for q in pm.paths():
        c = q.vertices[-1]
        source = q.source
        scanned = counter.columns
        counter.columns += n - 1
        for a, delta in usable[c]:
            attempts += 1
            if nonsimple and a != source and (q.vmask >> a) & 1:
                cyc = _make_cycle(dm, q, a, scanned + a - (c < a), EXTRACTED, iteration)
                if cyc is not None:
                    found.append(cyc)
                continue
            if a == source:
                if q.value + delta < 0 and _admissible(dm, q, a):
                    closing = _edge_bit(c, image[a], n1)
                    if (q.edgemask | closing).bit_count() != q.arcs + 1:
                        raise InvariantViolation(f"cycle {q.vertices} repeats a new edge")
                    found.append(
                        _make_cycle(dm, q, a, scanned + a - (c < a), CLOSED_AT_SOURCE, iteration)
                    )
                continue
            value = q.value + delta
            if prune and value >= 0:
                continue
            cell = nxt.get((source, a))
            if cell is not None and len(cell) >= k and value > cell[-1].value:
                continue
            if not _admissible(dm, q, a):
                continue
            ext = _extend(q, dm, a)
            if ext.edgemask.bit_count() != ext.arcs:
                raise InvariantViolation(f"path {ext.vertices} repeats a new edge")
            if cell is None:
                nxt[(source, a)] = [ext]
            else:
                _insert(cell, ext, k)
    return PathMatrix(iteration, nxt, found, attempts)


def _usable_arcs(dm: DerivedMatrix, neg_only: bool) -> list[list[tuple[int, int]]]:
    """Per row, the (column, delta) pairs a scan can actually take, ascending."""
    return [
        [
            (a, v)
            for a, v in enumerate(row)
            if a and v is not FORBIDDEN and not (neg_only and v >= 0)
        ]
        for row in dm.rows
    ]


def _edge_bit(x: int, y: int, n1: int) -> int:
    return 1 << (x * n1 + y if x < y else y * n1 + x)


def _label_key(q: SearchPath):
    return (q.value, q.vertices)


def _insert(cell: list[SearchPath], q: SearchPath, k: int) -> None:
    key = _label_key(q)
    pos = len(cell)
    while pos and key < _label_key(cell[pos - 1]):
        pos -= 1
    if pos >= k:
        return
    cell.insert(pos, q)
    del cell[k:]


@dataclass
class SearchResult:
    cycles: list[NegativeCycle]
    log: list[IterationRecord]
    columns: int


class NegativeCycleSearch:
    """Stateful driver over successive iterations; yields cycles in policy order."""

    def __init__(self, dm: DerivedMatrix, config: SearchConfig = SearchConfig()):
        self.dm = dm
        self.config = config
        self.counter = ColumnCounter()
        self.log: list[IterationRecord] = []
        self.matrix = initial_matrix(dm, config)
        self.limit = config.max_iterations or dm.n
        self._usable = _usable_arcs(dm, config.negative_entries_only)

    def step(self) -> list[NegativeCycle]:
        pm = extend_iteration(self.matrix, self.dm, self.counter, self.config, self._usable)
        self.matrix = pm
        self.log.append(
            IterationRecord(
                iteration=pm.iteration,
                extensions=pm.attempts,
                labels=pm.size,
                columns=self.counter.columns,
                cycles=len(pm.found),
            )
        )
        return pm.found

    @property
    def exhausted(self) -> bool:
        return self.matrix.iteration >= self.limit or (
            self.matrix.iteration > 0 and not self.matrix.cells
        )

    def __iter__(self) -> Iterator[NegativeCycle]:
        seen: set[tuple[int, ...]] = set()
        if self.config.policy == FIRST:
            while not self.exhausted:
                # stable sort keeps discovery order within one source
                for cyc in sorted(self.step(), key=lambda c: c.source):
                    if cyc.vertices not in seen:
                        seen.add(cyc.vertices)
                        yield cyc
        else:
            pool: dict[tuple[int, ...], NegativeCycle] = {}
            while not self.exhausted:
                for cyc in self.step():
                    pool.setdefault(cyc.vertices, cyc)
            yield from sorted(pool.values(), key=lambda c: (c.weight, c.vertices))

    def run(self) -> SearchResult:
        cycles = list(self)
        return SearchResult(cycles, list(self.log), self.counter.columns)


def iter_negative_cycles(dm: DerivedMatrix, config: SearchConfig = SearchConfig()):
    return iter(NegativeCycleSearch(dm, config))


def find_negative_cycle(
    dm: DerivedMatrix, config: SearchConfig = SearchConfig()
) -> NegativeCycle | None:
    return next(iter_negative_cycles(dm, config), None)


@dataclass(frozen=True)
class ForcedResult:
    cycle: NegativeCycle | None
    columns: int
    admissible: bool


def forced_search(dm: DerivedMatrix, walk: Sequence[int]) -> ForcedResult:
    """Follow a prescribed walk, counting the columns a scan needs.

    Each step scans its row in ascending column order and stops at the
    prescribed column, so a step costs the number of columns examined up to
    and including the one taken. The walk must end on a repeated vertex; the
    enclosed loop is returned when it is negative and admissible.
    """
    walk = tuple(walk)
    counter = ColumnCounter()
    q = SearchPath.start(walk[0])
    for step, a in enumerate(walk[1:], start=1):
        c = q.end
        counter.add(sum(1 for col in range(1, a + 1) if col != c))
        if dm.rows[c][a] is FORBIDDEN:
            return ForcedResult(None, counter.columns, False)
        last = step == len(walk) - 1
        if (q.vmask >> a) & 1:
            if not last:
                return ForcedResult(None, counter.columns, False)
            provenance = CLOSED_AT_SOURCE if a == q.source else EXTRACTED
            if provenance == CLOSED_AT_SOURCE and not _admissible(dm, q, a):
                return ForcedResult(None, counter.columns, False)
            cyc = _make_cycle(dm, q, a, counter.columns, provenance, step)
            return ForcedResult(cyc, counter.columns, cyc is not None)
        if not _admissible(dm, q, a):
            return ForcedResult(None, counter.columns, False)
        q = _extend(q, dm, a)
    return ForcedResult(None, counter.columns, True)


_ROMAN = [
    (1000, "M"), (900, "CM"), (500, "D"), (400, "CD"), (100, "C"), (90, "XC"),
    (50, "L"), (40, "XL"), (10, "X"), (9, "IX"), (5, "V"), (4, "IV"), (1, "I"),
]


def roman(k: int) -> str:
    if k <= 0:
        raise ValueError("roman numerals start at 1")
    out = []
    for value, glyph in _ROMAN:
        while k >= value:
            out.append(glyph)
            k -= value
    return "".join(out)


def render_log(log: Sequence[IterationRecord]) -> str:
    return "".join(
        f"{roman(r.iteration)}. extensions {r.extensions}, labels {r.labels}, "
        f"columns {r.columns}, cycles {r.cycles}\n"
        for r in log
    )
