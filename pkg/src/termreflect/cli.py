"""Command-line frontend.

    termreflect mp FILE [--dump STAGE] [--format text|json]
    termreflect prove FILE [--format text|json]

Exit codes: 0 on success (``prove``: VALID), 1 for ``prove`` UNKNOWN,
2 on unreadable input, parse errors or type errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Any, Sequence

from .abstractions import AffineTS, LinearSimulation
from .lia.syntax import ParseError, format_formula
from .mortal import MortalReport, mp
from .program import parse_program
from .qlinalg import QMatrix

STAGES = ("affine", "det", "reflection", "chi")


def _num(q: Fraction) -> int | str:
    q = Fraction(q)
    return q.numerator if q.denominator == 1 else str(q)


def _matrix(m: QMatrix) -> list[list[int | str]]:
    return [[_num(x) for x in row] for row in m.row_list()]


def _system(t: AffineTS) -> dict[str, Any]:
    return {"dim": t.dim, "empty": t.empty, "a": _matrix(t.a), "b": _matrix(t.b),
            "c": [_num(x) for x in t.c]}


def _sim(s: LinearSimulation) -> dict[str, Any]:
    return {"matrix": _matrix(s.matrix), "offset": [_num(x) for x in s.offset]}


def stage_data(report: MortalReport) -> dict[str, Any]:
    """JSON-ready view of the named stages; a stage past a short-circuit is null."""
    st = report.stages
    names = list(report.vars)
    stacked = [n + "'" for n in names] + names
    out: dict[str, Any] = {
        "affine": {**_system(st.affine), "columns": stacked,
                   "formula": format_formula(st.affine.to_formula(names))},
        "det": None, "reflection": None, "chi": None,
    }
    if st.det is not None:
        out["det"] = {"dim": st.det.dim, "columns": names,
                      "basis": [[_num(x) for x in v] for v in st.det.basis]}
    if st.reflection is not None:
        refl, _ = st.reflection
        out["reflection"] = {"system": _system(refl), "simulation": _sim(st.simulation)}
    if st.chi is not None:
        ir = st.integer
        out["chi"] = {"coordinates": list(st.w_names), "dynamics": _matrix(ir.m),
                      "projection": _matrix(ir.p), "guard": format_formula(st.guard),
                      "period": st.chi.period,
                      "formulas": [format_formula(h) for h in st.chi.formulas]}
    return out


def report_json(report: MortalReport) -> dict[str, Any]:
    return {"vars": list(report.vars), "mp": format_formula(report.mp),
            "stages": stage_data(report), "proved_universal": report.proved_universal}


def _render_stage(name: str, data: dict[str, Any] | None) -> str:
    lines = [f"== {name} =="]
    if data is None:
        lines.append("(not computed: the relation is empty)")
        return "\n".join(lines)
    if name == "affine":
        lines.append(data["formula"] if not data["empty"] else "false")
    elif name == "det":
        lines.append(f"columns: {', '.join(data['columns'])}")
        lines += [f"  {row}" for row in data["basis"]] or ["  (zero space)"]
    elif name == "reflection":
        sysd, sim = data["system"], data["simulation"]
        lines.append(f"dim: {sysd['dim']}")
        lines.append(f"a: {sysd['a']}")
        lines.append(f"b: {sysd['b']}")
        lines.append(f"simulation: {sim['matrix']} + {sim['offset']}")
    elif name == "chi":
        lines.append(f"coordinates: {', '.join(data['coordinates'])}")
        lines.append(f"dynamics: {data['dynamics']}")
        lines.append(f"guard: {data['guard']}")
        for k, h in enumerate(data["formulas"]):
            lines.append(f"H[{k}]: {h}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="termreflect",
                                 description="Mortal preconditions for LIA transition formulas.")
    sub = ap.add_subparsers(dest="command", required=True)
    for cmd, text in (("mp", "print the mortal precondition"),
                      ("prove", "print VALID if the loop terminates from every state")):
        p = sub.add_parser(cmd, help=text)
        p.add_argument("file")
        p.add_argument("--dump", action="append", choices=STAGES, default=[],
                       help="print an intermediate stage (repeatable)")
        p.add_argument("--format", choices=("text", "json"), default="text")
    return ap


def run(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    try:
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
    except (OSError, UnicodeDecodeError) as e:
        print(f"termreflect: cannot read {args.file}: {e}", file=err)
        return 2
    try:
        program = parse_program(text)
    except ParseError as e:
        print(f"{args.file}:{e.line}:{e.col}: error: {e.message}", file=err)
        return 2
    except (ValueError, TypeError) as e:
        print(f"{args.file}: error: {e}", file=err)
        return 2

    report = mp(program.transition)
    code = 0 if args.command == "mp" or report.proved_universal else 1
    if args.format == "json":
        json.dump(report_json(report), out, indent=2)
        out.write("\n")
        return code
    stages = stage_data(report)
    for name in dict.fromkeys(args.dump):
        print(_render_stage(name, stages[name]), file=out)
    if args.command == "mp":
        print(format_formula(report.mp), file=out)
    else:
        print("VALID" if report.proved_universal else "UNKNOWN", file=out)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
