"""Command line: ``derangement {improve,oracle-min,negcycle,derived,verify,gen}``.

Exit status is 0 on success, 1 for bad input or usage, 2 when an internal
invariant fails (including a trace that does not verify).
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .costs import CostMatrix, derived_matrix, emit_matrix, load_matrix, permutation_cost
from .engine import BEST, POLICIES, NegativeCycleSearch, SearchConfig, render_log
from .exceptions import InputError, InvariantViolation, RangeError
from .loop import ImproveConfig, improve
from .oracle import min_derangement, min_tour
from .permutation import (
    ASSIGNMENT,
    MODES,
    canonical_n_cycle,
    cycle_decomposition,
    format_cycles,
    row_form,
)
from .tracefile import dump_trace, load_trace, render_trace, verify_trace
from .validation import check_derangement

logger = logging.getLogger("derangement")

EXIT_OK, EXIT_INPUT, EXIT_INVARIANT = 0, 1, 2
SEED_MAX = 2**64 - 1


def gen_instance(n: int, seed: int, cost_range: tuple[int, int] = (0, 100)) -> CostMatrix:
    """Random symmetric integer instance; the upper triangle is drawn row by row."""
    low, high = cost_range
    if n < 3:
        raise RangeError(f"instances need n >= 3, got {n}")
    if low > high:
        raise RangeError(f"empty cost range [{low}, {high}]")
    if not 0 <= seed <= SEED_MAX:
        raise RangeError("seed must be a 64-bit unsigned integer")
    rng = np.random.default_rng(seed)
    values = np.zeros((n, n), dtype=np.int64)
    iu = np.triu_indices(n, k=1)
    values[iu] = rng.integers(low, high, size=len(iu[0]), endpoint=True)
    values.T[iu] = values[iu]
    return CostMatrix(values)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value <= SEED_MAX:
        raise argparse.ArgumentTypeError("seed must fit an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="derangement", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def instance(p, derangement=True):
        p.add_argument("--matrix", required=True, type=Path, help="instance file")
        if derangement:
            p.add_argument(
                "--derangement",
                help='starting derangement, "2 1 4 3" or "(1 2)(3 4)"; default (1 2 ... n)',
            )
        p.add_argument("--mode", choices=MODES, default=ASSIGNMENT)

    def search(p):
        p.add_argument("--policy", choices=POLICIES, default=BEST)
        p.add_argument("--labels", type=_positive, default=4, help="labels kept per cell")
        p.add_argument(
            "--prune-nonnegative",
            action=argparse.BooleanOptionalAction,
            default=True,
            help="drop partial paths whose value is not negative",
        )
        p.add_argument(
            "--negative-entries-only",
            action="store_true",
            help="search only arcs with a negative derived entry",
        )

    p = sub.add_parser("improve", help="run the cycle-cancelling loop")
    instance(p)
    search(p)
    p.add_argument("--max-iter", type=_positive, default=1000)
    p.add_argument("--retry-limit", type=_positive, default=16)
    p.add_argument("--oracle-check", action="store_true")
    p.add_argument("--oracle-limit", type=_positive, default=9)
    p.add_argument("--trace", type=Path, help="write the machine trace (JSON lines) here")
    p.add_argument("--human-trace", type=Path, help="write the readable trace here")
    p.add_argument("--json", action="store_true", help="print the machine trace to stdout")

    p = sub.add_parser("oracle-min", help="exhaustive minimum derangement and tour")
    instance(p, derangement=False)
    p.add_argument("--oracle-limit", type=_positive, default=9)

    p = sub.add_parser("negcycle", help="one engine search on a derangement")
    instance(p)
    search(p)
    p.add_argument("--nonsimple", action="store_true", help="allow one revisit per path")
    p.add_argument("--source", type=_positive, action="append", help="restrict sources")

    p = sub.add_parser("derived", help="dump the derived matrix")
    instance(p)

    p = sub.add_parser("verify", help="recheck a machine trace against its matrix")
    p.add_argument("--matrix", required=True, type=Path)
    p.add_argument("--trace", required=True, type=Path)

    p = sub.add_parser("gen", help="write a random symmetric instance")
    p.add_argument("--n", required=True, type=int)
    p.add_argument("--seed", required=True, type=_seed)
    p.add_argument("--low", type=int, default=0)
    p.add_argument("--high", type=int, default=100)
    p.add_argument("--output", type=Path, help="file to write; stdout when omitted")
    return parser


def _read(path: Path) -> str:
    try:
        return path.read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _matrix_and_start(args):
    m = load_matrix(_read(args.matrix))
    if args.derangement is None:
        d = check_derangement(canonical_n_cycle(m.n), m.n, args.mode)
    else:
        d = check_derangement(args.derangement, m.n, args.mode)
    return m, d


def _cmd_improve(args, out) -> int:
    m, d0 = _matrix_and_start(args)
    config = ImproveConfig(
        mode=args.mode,
        policy=args.policy,
        labels=args.labels,
        max_iter=args.max_iter,
        retry_limit=args.retry_limit,
        prune_nonnegative=args.prune_nonnegative,
        negative_entries_only=args.negative_entries_only,
        oracle_check=args.oracle_check,
        oracle_limit=args.oracle_limit,
    )
    trace = improve(m, d0, config)
    machine = dump_trace(trace, config, m.n)
    problems = verify_trace(load_trace(machine), m)
    if problems:
        raise InvariantViolation("; ".join(problems))
    if args.trace:
        args.trace.write_text(machine)
    if args.human_trace:
        args.human_trace.write_text(render_trace(trace))
    out.write(machine if args.json else render_trace(trace))
    return EXIT_OK


def _cmd_oracle(args, out) -> int:
    m = load_matrix(_read(args.matrix))
    res = min_derangement(m, args.mode, limit=args.oracle_limit)
    if res.witness is None:
        out.write(f"no {args.mode} derangement exists on {m.n} points\n")
    else:
        out.write(
            f"min {args.mode} derangement {res.optimum_value} "
            f"{format_cycles(cycle_decomposition(res.witness))}\n"
        )
    if m.n >= 3:
        tour = min_tour(m, limit=args.oracle_limit)
        out.write(f"min tour {tour.optimum_value} {format_cycles(cycle_decomposition(tour.witness))}\n")
    return EXIT_OK


def _cmd_negcycle(args, out) -> int:
    m, d = _matrix_and_start(args)
    config = SearchConfig(
        policy=args.policy,
        labels=args.labels,
        prune_nonnegative=args.prune_nonnegative,
        negative_entries_only=args.negative_entries_only,
        nonsimple=args.nonsimple,
        sources=tuple(sorted(set(args.source))) if args.source else None,
    )
    if config.sources and max(config.sources) > m.n:
        raise InputError(f"source outside 1..{m.n}")
    search = NegativeCycleSearch(derived_matrix(m, d), config)
    cycle = next(iter(search), None)
    out.write(f"D cost {permutation_cost(m, d)}\n{row_form(d).render()}\n")
    out.write(render_log(search.log))
    if cycle is None:
        out.write("no admissible negative cycle found\n")
    else:
        out.write(
            f"cycle {format_cycles(cycle.cycle)} weight {cycle.weight} "
            f"columns {cycle.columns_used} {cycle.provenance} "
            f"path {' '.join(map(str, cycle.path))}\n"
        )
    return EXIT_OK


def _cmd_derived(args, out) -> int:
    m, d = _matrix_and_start(args)
    out.write(derived_matrix(m, d).render())
    return EXIT_OK


def _cmd_verify(args, out) -> int:
    m = load_matrix(_read(args.matrix))
    problems = verify_trace(load_trace(_read(args.trace)), m)
    for problem in problems:
        out.write(f"FAIL {problem}\n")
    if problems:
        return EXIT_INVARIANT
    out.write("OK\n")
    return EXIT_OK


def _cmd_gen(args, out) -> int:
    text = emit_matrix(gen_instance(args.n, args.seed, (args.low, args.high)))
    if args.output:
        args.output.write_text(text)
    else:
        out.write(text)
    return EXIT_OK


COMMANDS = {
    "improve": _cmd_improve,
    "oracle-min": _cmd_oracle,
    "negcycle": _cmd_negcycle,
    "derived": _cmd_derived,
    "verify": _cmd_verify,
    "gen": _cmd_gen,
}


def run(argv=None, out=None) -> int:
    out = out if out is not None else sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_INPUT
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return COMMANDS[args.command](args, out)
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())

