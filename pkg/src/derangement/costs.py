"""Cost matrices, permutation cost and the derived (rerouting) matrix."""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .exceptions import (
    AsymmetryError,
    FixedPointCost,
    ForbiddenArc,
    ParseError,
    RangeError,
    SizeMismatch,
)
from .permutation import CycleForm, Permutation

# n * max|cost| must fit a signed 64-bit accumulator with room for one more
# full-length sum (cost differences).
ACCUMULATOR_LIMIT = 2**62
_INT_RE = re.compile(r"-?[0-9]+")


class _Forbidden:
    __slots__ = ()

    def __repr__(self) -> str:
        return "FORBIDDEN"

    def __str__(self) -> str:
        return "x"

    def __reduce__(self):
        return "FORBIDDEN"


FORBIDDEN = _Forbidden()


@dataclass(frozen=True, eq=False)
class CostMatrix:
    """Symmetric integer costs; ``values`` is 0-indexed, accessors are 1-indexed."""

    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=np.int64, copy=True)
        if values.ndim != 2 or values.shape[0] != values.shape[1] or values.shape[0] < 1:
            raise ParseError(f"cost matrix must be square and non-empty, got shape {values.shape}")
        n = values.shape[0]
        off = values[~np.eye(n, dtype=bool)]
        if off.size and int(np.abs(off).max()) * n > ACCUMULATOR_LIMIT:
            raise RangeError("costs too large for exact 64-bit accumulation")
        diff = (values != values.T) & ~np.eye(n, dtype=bool)
        if diff.any():
            i, j = (int(v) for v in np.argwhere(diff)[0])
            raise AsymmetryError(i + 1, j + 1, int(values[i, j]), int(values[j, i]))
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def cost(self, i: int, j: int) -> int:
        return int(self.values[i - 1, j - 1])

    def __eq__(self, other) -> bool:
        return isinstance(other, CostMatrix) and np.array_equal(self.values, other.values)

    def __hash__(self) -> int:
        return hash(self.values.tobytes())

    def padded_rows(self) -> list[list[int]]:
        """Rows as plain ints, padded so that ``rows[i][j]`` is cost(i, j)."""
        rows = [[0] * (self.n + 1)]
        for row in self.values.tolist():
            rows.append([0] + row)
        return rows


def load_matrix(text: str) -> CostMatrix:
    lines = [line.split() for line in text.splitlines() if line.strip()]
    if not lines:
        raise ParseError("empty instance")
    for row in lines:
        for token in row:
            if not _INT_RE.fullmatch(token):
                raise ParseError(f"not an integer: {token!r}")
    if len(lines[0]) != 1:
        raise ParseError("first line must hold only the matrix size")
    n = int(lines[0][0])
    if n < 1:
        raise ParseError(f"matrix size must be positive, got {n}")
    rows = lines[1:]
    if len(rows) != n or any(len(row) != n for row in rows):
        raise ParseError(f"expected {n} rows of {n} integers")
    numbers = [[int(t) for t in row] for row in rows]
    if any(abs(v) * n > ACCUMULATOR_LIMIT for row in numbers for v in row):
        raise RangeError("costs too large for exact 64-bit accumulation")
    return CostMatrix(np.array(numbers, dtype=np.int64))


def emit_matrix(m: CostMatrix) -> str:
    lines = [str(m.n)] + [" ".join(str(v) for v in row) for row in m.values.tolist()]
    return "\n".join(lines) + "\n"


def permutation_cost(m: CostMatrix, p: Permutation) -> int:
    if m.n != p.n:
        raise SizeMismatch(f"matrix has {m.n} points, permutation {p.n}")
    total = 0
    for x, y in enumerate(p.images, start=1):
        if x == y:
            raise FixedPointCost(f"point {x} is fixed; diagonal costs are forbidden")
        total += m.cost(x, y)
    return total


def edge_set(p: Permutation) -> Counter:
    """Undirected edges ``(min, max)`` used by the arcs of ``p``, with multiplicity."""
    edges: Counter = Counter()
    for x, y in enumerate(p.images, start=1):
        if x == y:
            raise FixedPointCost(f"point {x} is fixed")
        edges[(min(x, y), max(x, y))] += 1
    return edges


def is_edge_distinct(p: Permutation) -> bool:
    return all(k == 1 for k in edge_set(p).values())


@dataclass(frozen=True, eq=False)
class DerivedMatrix:
    """Cost deltas of rerouting point i from ``base(i)`` to ``base(j)``.

    ``rows[i][j]`` (1-indexed, row/column 0 unused) is an ``int`` or
    :data:`FORBIDDEN`.
    """

    base: Permutation
    rows: tuple[tuple, ...]
    base_inverse: tuple[int, ...] = field(repr=False)
    # padded images of base: image[x] = base(x), image[0] unused
    image: tuple[int, ...] = field(repr=False, default=())
    n: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "n", self.base.n)
        if not self.image:
            object.__setattr__(self, "image", (0,) + self.base.images)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def to_lists(self) -> list[list]:
        return [list(self.rows[i][1:]) for i in range(1, self.n + 1)]

    def render(self) -> str:
        return "\n".join(" ".join(str(v) for v in row) for row in self.to_lists()) + "\n"


def derived_matrix(m: CostMatrix, d: Permutation) -> DerivedMatrix:
    n = m.n
    if d.n != n:
        raise SizeMismatch(f"matrix has {n} points, derangement {d.n}")
    img = (0,) + d.images
    inv = [0] * (n + 1)
    for x in range(1, n + 1):
        if img[x] == x:
            raise FixedPointCost(f"point {x} is fixed")
        inv[img[x]] = x
    cost = m.padded_rows()
    rows = [(FORBIDDEN,) * (n + 1)]
    for i in range(1, n + 1):
        row = cost[i]
        here = row[img[i]]
        rows.append(
            (FORBIDDEN,)
            + tuple(
                FORBIDDEN if (j == i or img[j] == i) else row[img[j]] - here
                for j in range(1, n + 1)
            )
        )
    return DerivedMatrix(d, tuple(rows), tuple(inv), img)


def cycle_weight(dm: DerivedMatrix, c: CycleForm | tuple[int, ...]) -> int:
    """Sum of deltas around one cycle, closing arc included."""
    if isinstance(c, CycleForm):
        if len(c.cycles) != 1:
            raise ValueError("cycle_weight expects exactly one cycle")
        (cycle,) = c.cycles
    else:
        cycle = tuple(c)
    total = 0
    for a, b in zip(cycle, cycle[1:] + cycle[:1]):
        v = dm.rows[a][b]
        if v is FORBIDDEN:
            raise ForbiddenArc(a, b)
        total += v
    return total
