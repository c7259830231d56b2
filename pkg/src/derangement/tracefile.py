"""Machine-readable (JSON lines) and human-readable improvement traces.

Machine format, one JSON object per line:

* ``{"record": "header", ...}`` run settings and the matrix size,
* ``{"record": "step", "m": k, "derangement": [...], "cost": c, "cycle": "(..)" | null,
  "weight": w | null, "columns": k, "rejected": r}`` one per derangement ``D_k``,
* ``{"record": "final", "derangement": [...], "cost": c, "status": s, "steps": k}``.

:func:`verify_trace` recomputes every number from the cost matrix.
"""

from __future__ import annotations

import json
from dataclasses import asdict

from .costs import CostMatrix, cycle_weight, derived_matrix, permutation_cost
from .engine import render_log
from .exceptions import InvariantViolation, ParseError
from .loop import STATUSES, ImproveConfig, ImprovementTrace
from .permutation import (
    compose,
    cycle_decomposition,
    format_cycles,
    from_cycles,
    from_mapping,
    is_derangement,
    parse_cycles,
    row_form,
)

FORMAT_VERSION = 1


def _dumps(obj) -> str:
    return json.dumps(obj, separators=(",", ":"))


def trace_records(trace: ImprovementTrace, config: ImproveConfig, n: int) -> list[dict]:
    header = {"record": "header", "version": FORMAT_VERSION, "n": n}
    header.update(asdict(config))
    records = [header]
    for step in trace.steps:
        records.append(
            {
                "record": "step",
                "m": step.index,
                "derangement": list(step.derangement.images),
                "cost": step.cost,
                "cycle": format_cycles(step.cycle) if step.cycle is not None else None,
                "weight": step.weight,
                "columns": step.columns,
                "rejected": step.rejected,
            }
        )
    records.append(
        {
            "record": "final",
            "derangement": list(trace.final.images),
            "cost": trace.final_cost,
            "status": trace.status,
            "steps": trace.n_improvements,
            "oracle_optimum": trace.oracle_optimum,
        }
    )
    return records


def dump_trace(trace: ImprovementTrace, config: ImproveConfig, n: int) -> str:
    return "".join(_dumps(r) + "\n" for r in trace_records(trace, config, n))


def load_trace(text: str) -> list[dict]:
    records = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"trace line {lineno}: {exc}") from None
        if not isinstance(record, dict) or "record" not in record:
            raise ParseError(f"trace line {lineno}: not a trace record")
        records.append(record)
    return records


def render_trace(trace: ImprovementTrace, with_search: bool = True) -> str:
    """Row forms of every ``D_m`` and the cycles composed into them."""
    out = []
    for step in trace.steps:
        d = step.derangement
        out.append(f"D_{step.index}  cost {step.cost}  {format_cycles(cycle_decomposition(d))}")
        out.append(row_form(d).render())
        if with_search and step.search_log:
            out.append(render_log(step.search_log).rstrip("\n"))
        if step.cycle is not None:
            out.append(
                f"C_{step.index + 1} = {format_cycles(step.cycle)}  weight {step.weight}  "
                f"columns {step.columns}"
            )
        out.append("")
    out.append(f"final cost {trace.final_cost}  status {trace.status}")
    return "\n".join(out) + "\n"


def verify_trace(records: list[dict], m: CostMatrix) -> list[str]:
    """Recompute a trace against ``m``; return human-readable problems.

    An empty list means the trace is consistent. Malformed records raise
    :class:`ParseError`.
    """
    problems: list[str] = []
    steps = [r for r in records if r.get("record") == "step"]
    finals = [r for r in records if r.get("record") == "final"]
    headers = [r for r in records if r.get("record") == "header"]
    if len(headers) != 1 or len(finals) != 1 or not steps:
        raise ParseError("trace needs one header, at least one step and one final record")
    header, final = headers[0], finals[0]
    mode = header.get("mode", "assignment")
    if header.get("n") != m.n:
        problems.append(f"trace is for n={header.get('n')}, matrix has n={m.n}")
        return problems
    try:
        previous = None
        for k, rec in enumerate(steps):
            d = from_mapping(rec["derangement"])
            if rec["m"] != k:
                problems.append(f"step {k}: index recorded as {rec['m']}")
            if not is_derangement(d, mode):
                problems.append(f"step {k}: {d} is not a {mode} derangement")
                continue
            cost = permutation_cost(m, d)
            if cost != rec["cost"]:
                problems.append(f"step {k}: recorded cost {rec['cost']}, recomputed {cost}")
            if previous is not None:
                prev_rec, prev_d, prev_cost = previous
                if prev_rec["cycle"] is None:
                    problems.append(f"step {k}: follows a step without a cycle")
                else:
                    cycle = parse_cycles(prev_rec["cycle"], m.n)
                    expected = compose(prev_d, from_cycles(cycle))
                    if expected != d:
                        problems.append(f"step {k}: D_{k} is not D_{k - 1} composed with C_{k}")
                    weight = cycle_weight(derived_matrix(m, prev_d), cycle)
                    if weight != prev_rec["weight"]:
                        problems.append(
                            f"step {k - 1}: recorded weight {prev_rec['weight']}, recomputed {weight}"
                        )
                    if cost - prev_cost != weight:
                        problems.append(f"step {k}: cost change {cost - prev_cost} != weight {weight}")
                    if cost >= prev_cost:
                        problems.append(f"step {k}: cost {cost} does not decrease from {prev_cost}")
            previous = (rec, d, cost)
        last_rec, last_d, last_cost = previous
        if last_rec["cycle"] is not None:
            problems.append("last step records a cycle that was never applied")
        if list(last_d.images) != final["derangement"] or last_cost != final["cost"]:
            problems.append("final record disagrees with the last step")
        if final["status"] not in STATUSES:
            problems.append(f"unknown status {final['status']!r}")
        if final.get("steps") != len(steps) - 1:
            problems.append(f"final record counts {final.get('steps')} steps, trace has {len(steps) - 1}")
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed trace record: {exc}") from None
    return problems


def check_trace(records: list[dict], m: CostMatrix) -> None:
    problems = verify_trace(records, m)
    if problems:
        raise InvariantViolation("; ".join(problems))
