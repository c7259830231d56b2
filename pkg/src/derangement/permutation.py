"""Permutations on {1..n} with 1-indexed semantics.

A :class:`Permutation` stores its one-line image tuple. Cycle notation is
handled by :class:`CycleForm`; both have exact text renderings::

    >>> p = parse_permutation("(1 4 2 3)", 4)
    >>> format_mapping(p)
    '4 3 1 2'
    >>> format_cycles(cycle_decomposition(inverse(p)))
    '(1 3 2 4)'
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from .exceptions import (
    NotABijection,
    OverlappingCycles,
    ParseError,
    SizeMismatch,
    VertexOutOfRange,
)

ASSIGNMENT = "assignment"
TWO_FACTOR = "two-factor"
MODES = (ASSIGNMENT, TWO_FACTOR)


@dataclass(frozen=True)
class Permutation:
    images: tuple[int, ...]

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, x: int) -> int:
        return self.images[x - 1]

    def __iter__(self):
        return iter(self.images)

    def __str__(self) -> str:
        return format_mapping(self)


@dataclass(frozen=True)
class CycleForm:
    cycles: tuple[tuple[int, ...], ...]
    n: int

    def __str__(self) -> str:
        return format_cycles(self)

    def __len__(self) -> int:
        return len(self.cycles)

    @property
    def support(self) -> frozenset[int]:
        return frozenset(v for c in self.cycles for v in c)


@dataclass(frozen=True)
class RowForm:
    top: tuple[int, ...]
    bottom: tuple[int, ...]

    def render(self) -> str:
        width = max(len(str(v)) for v in self.top + self.bottom) if self.top else 1
        top = " ".join(str(v).rjust(width) for v in self.top)
        bottom = " ".join(str(v).rjust(width) for v in self.bottom)
        return f"{top}\n{bottom}"


def from_mapping(images: Sequence[int]) -> Permutation:
    images = tuple(int(v) for v in images)
    n = len(images)
    if n < 1:
        raise NotABijection("a permutation needs at least one point")
    seen = [False] * (n + 1)
    for v in images:
        if not 1 <= v <= n:
            raise NotABijection(f"image {v} outside 1..{n}")
        if seen[v]:
            raise NotABijection(f"image {v} appears more than once")
        seen[v] = True
    return Permutation(images)


def identity(n: int) -> Permutation:
    return Permutation(tuple(range(1, n + 1)))


def canonical_cycle(cycle: Sequence[int]) -> tuple[int, ...]:
    """Rotate a cycle so that it starts at its smallest vertex."""
    k = cycle.index(min(cycle))
    return tuple(cycle[k:]) + tuple(cycle[:k])


def make_cycle_form(cycles: Iterable[Sequence[int]], n: int) -> CycleForm:
    """Validate and canonicalize a collection of disjoint cycles."""
    seen: set[int] = set()
    out = []
    for cycle in cycles:
        cycle = tuple(int(v) for v in cycle)
        if len(cycle) < 2:
            raise ParseError(f"cycle {cycle} has fewer than two vertices")
        for v in cycle:
            if not 1 <= v <= n:
                raise VertexOutOfRange(f"vertex {v} outside 1..{n}")
            if v in seen:
                raise OverlappingCycles(f"vertex {v} appears in more than one place")
            seen.add(v)
        out.append(canonical_cycle(cycle))
    out.sort(key=lambda c: c[0])
    return CycleForm(tuple(out), n)


def from_cycles(cf: CycleForm) -> Permutation:
    images = list(range(1, cf.n + 1))
    seen: set[int] = set()
    for cycle in cf.cycles:
        for v in cycle:
            if not 1 <= v <= cf.n:
                raise VertexOutOfRange(f"vertex {v} outside 1..{cf.n}")
            if v in seen:
                raise OverlappingCycles(f"vertex {v} appears in more than one place")
            seen.add(v)
        for a, b in zip(cycle, cycle[1:] + cycle[:1]):
            images[a - 1] = b
    return Permutation(tuple(images))


def inverse(p: Permutation) -> Permutation:
    inv = [0] * p.n
    for x, y in enumerate(p.images, start=1):
        inv[y - 1] = x
    return Permutation(tuple(inv))


def compose(p: Permutation, q: Permutation) -> Permutation:
    """Return ``p∘q``, i.e. ``x -> p(q(x))``."""
    if p.n != q.n:
        raise SizeMismatch(f"cannot compose permutations on {p.n} and {q.n} points")
    return Permutation(tuple(p.images[y - 1] for y in q.images))


def cycle_decomposition(p: Permutation) -> CycleForm:
    seen = [False] * (p.n + 1)
    cycles = []
    for start in range(1, p.n + 1):
        if seen[start] or p(start) == start:
            continue
        cycle = []
        x = start
        while not seen[x]:
            seen[x] = True
            cycle.append(x)
            x = p(x)
        cycles.append(tuple(cycle))
    # starting from the smallest unseen vertex already yields canonical order
    return CycleForm(tuple(cycles), p.n)


def is_derangement(p: Permutation, mode: str = ASSIGNMENT) -> bool:
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if any(p(x) == x for x in range(1, p.n + 1)):
        return False
    if mode == TWO_FACTOR:
        return all(p(p(x)) != x for x in range(1, p.n + 1))
    return True


def row_form(p: Permutation) -> RowForm:
    return RowForm(tuple(range(1, p.n + 1)), p.images)


# -- text formats -----------------------------------------------------------

_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def format_mapping(p: Permutation) -> str:
    return " ".join(str(v) for v in p.images)


def format_cycles(cf: CycleForm) -> str:
    return "".join("(" + " ".join(str(v) for v in c) + ")" for c in cf.cycles)


def _parse_int(token: str) -> int:
    if not re.fullmatch(r"-?[0-9]+", token):
        raise ParseError(f"not an integer: {token!r}")
    return int(token)


def parse_mapping(text: str) -> Permutation:
    tokens = text.split()
    if not tokens:
        raise ParseError("empty permutation")
    return from_mapping([_parse_int(t) for t in tokens])


def parse_cycles(text: str, n: int) -> CycleForm:
    """Parse ``"(1 2 3)(4 5)"``; an empty string is the empty product."""
    stripped = text.strip()
    if _CYCLE_RE.sub("", stripped).strip():
        raise ParseError(f"malformed cycle notation: {text!r}")
    cycles = [[_parse_int(t) for t in body.split()] for body in _CYCLE_RE.findall(stripped)]
    return make_cycle_form(cycles, n)


def parse_permutation(text: str, n: int | None = None) -> Permutation:
    """Accept either one-line mapping or cycle notation (leading ``(``)."""
    if text.lstrip().startswith("("):
        if n is None:
            raise ParseError("cycle notation needs the ground-set size")
        return from_cycles(parse_cycles(text, n))
    p = parse_mapping(text)
    if n is not None and p.n != n:
        raise SizeMismatch(f"permutation has {p.n} points, expected {n}")
    return p


def canonical_n_cycle(n: int) -> Permutation:
    """The cycle (1 2 ... n)."""
    return Permutation(tuple(range(2, n + 1)) + (1,)) if n > 1 else identity(n)
