"""Command-line front end.

Exit codes are part of the interface so shell scripts can branch on them:
0 solved/feasible, 1 parse or I/O or stage-selection failure, 2 solver could
not produce a consistent optimum, 3 enumeration budget exceeded, 4 the
requested combination is unsupported, 5 a verified witness is not feasible.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .bilevel import (
    ALGORITHMS,
    BilevelInstance,
    build_piece_system,
    partition_piece,
    solve,
    solve_iterative,
    x_star,
)
from .encode import build_step_system
from .errors import (
    BudgetExceededError,
    SolverInconsistencyError,
    UnsupportedInstanceError,
)
from .figure import figure_svg
from .instances import (
    load_instance,
    parse_cli_vector,
    scalar_to_json,
    vector_to_json,
)
from .lpfile import export_bigm_milp
from .polytope import contains, greatest_point, minimal_points, phi_and_argmin
from .semiring import format_scalar, format_vector, tdot

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INCONSISTENT = 2
EXIT_BUDGET = 3
EXIT_UNSUPPORTED = 4
EXIT_INFEASIBLE_WITNESS = 5


def _err(msg: str) -> None:
    print(msg, file=sys.stderr)


def _load(path: str) -> BilevelInstance | None:
    try:
        return load_instance(path)
    except json.JSONDecodeError as e:
        _err(f"{path}: parse error at line {e.lineno}, column {e.colno}: {e.msg}")
    except OSError as e:
        _err(f"cannot read {path}: {e.strerror or e}")
    except ValueError as e:
        _err(f"{path}: {e}")
    return None


def _plain_vector(v) -> str:
    """Comma-separated coordinates, directly reusable as --x/--y input."""
    return ", ".join(format_scalar(c) for c in v)


def cmd_solve(args) -> int:
    inst = _load(args.instance)
    if inst is None:
        return EXIT_USAGE
    kwargs = {"algorithm": args.algorithm}
    if args.budget is not None:
        kwargs["budget"] = args.budget
    try:
        sol = solve(inst, **kwargs)
    except UnsupportedInstanceError as e:
        _err(f"unsupported: {e}")
        return EXIT_UNSUPPORTED
    except BudgetExceededError as e:
        _err(f"budget exceeded: {e}")
        return EXIT_BUDGET
    except SolverInconsistencyError as e:
        _err(f"no consistent optimum: {e}")
        return EXIT_INCONSISTENT
    if args.output == "json":
        doc = {
            "variant": inst.variant,
            "value": scalar_to_json(sol.value),
            "x": vector_to_json(sol.x),
            "y": vector_to_json(sol.y),
            "method": sol.method,
            "certificate": sol.certificate,
        }
        print(json.dumps(doc, indent=2))
    else:
        print(f"value = {format_scalar(sol.value)}")
        print(f"x = {_plain_vector(sol.x)}")
        print(f"y = {_plain_vector(sol.y)}")
        print(f"method = {sol.method}")
        print("certificate:")
        print(json.dumps(sol.certificate, indent=2))
    return EXIT_OK


def cmd_verify(args) -> int:
    inst = _load(args.instance)
    if inst is None:
        return EXIT_USAGE
    try:
        x = parse_cli_vector(args.x, inst.dim, "--x")
        y = parse_cli_vector(args.y, inst.dim, "--y")
    except ValueError as e:
        _err(str(e))
        return EXIT_USAGE
    in_x, _ = contains(inst.tp1, x)
    in_y, _ = contains(inst.tp2, y)
    print(f"x in upper polytope: {'yes' if in_x else 'no'}")
    print(f"y in lower polytope: {'yes' if in_y else 'no'}")
    if inst.lower == "min":
        target, _ = phi_and_argmin(inst.tp2, x)
        print(f"lower-level minimum at x: {format_scalar(target)}")
    else:
        target = tdot(x, greatest_point(inst.tp2))
        print(f"lower-level maximum at x: {format_scalar(target)}")
    achieved = tdot(x, y)
    print(f"achieved at witness: {format_scalar(achieved)}")
    optimal = achieved == target
    print(f"lower-level optimal: {'yes' if optimal else 'no'}")
    feasible = in_x and in_y and optimal
    print(f"verdict: {'feasible' if feasible else 'not feasible'}")
    return EXIT_OK if feasible else EXIT_INFEASIBLE_WITNESS


def _parse_piece_tokens(tokens: list[str], dim: int) -> list[int] | None:
    text = ",".join(tokens).replace("{", "").replace("}", "")
    parts = [p for p in (s.strip() for s in text.split(",")) if p]
    if not parts:
        return None
    out = []
    for p in parts:
        if not p.isdigit():
            return None
        k = int(p)
        if not 1 <= k <= dim or k in out:
            return None
        out.append(k)
    return sorted(out)


def _iteration_cuts(inst: BilevelInstance, budget):
    """Re-derive the cut vectors produced by the iterative run."""
    kwargs = {} if budget is None else {"budget": budget}
    sol = solve_iterative(inst, **kwargs)
    cuts = []
    for text in sol.certificate["cuts"]:
        cuts.append(parse_cli_vector(text.strip("()"), inst.dim, "cut"))
    return cuts


def cmd_export(args) -> int:
    inst = _load(args.instance)
    if inst is None:
        return EXIT_USAGE
    tokens = args.stage
    stage_slug = "-".join(tokens).replace("{", "").replace("}", "").replace(",", "-")
    try:
        if tokens == ["relaxed"]:
            system = build_step_system(
                inst.tp1, inst.tp2, inst.a, inst.b, [], inst.upper
            )
        elif tokens[0] == "cut" and len(tokens) == 2 and tokens[1].isdigit():
            k = int(tokens[1])
            if inst.lower != "min":
                _err("cut stages exist only for variants with a minimizing lower level")
                return EXIT_USAGE
            cuts = _iteration_cuts(inst, args.budget)
            if not 1 <= k <= len(cuts):
                _err(f"stage cut {k} does not exist: the run produced {len(cuts)} cut(s)")
                return EXIT_USAGE
            system = build_step_system(
                inst.tp1, inst.tp2, inst.a, inst.b, cuts[:k], inst.upper
            )
        elif tokens[0] == "piece" and len(tokens) >= 2:
            if inst.lower != "max":
                _err("piece stages exist only for variants with a maximizing lower level")
                return EXIT_USAGE
            I = _parse_piece_tokens(tokens[1:], inst.dim)
            if I is None:
                _err(f"cannot parse piece index set from {' '.join(tokens[1:])!r}")
                return EXIT_USAGE
            J = [j for j in range(1, inst.dim + 1) if j not in I]
            piece = partition_piece(inst, I, J)
            system = build_piece_system(inst, piece)
        else:
            _err(f"unknown stage {' '.join(tokens)!r}; use relaxed, cut K, or piece I")
            return EXIT_USAGE
    except UnsupportedInstanceError as e:
        _err(f"unsupported: {e}")
        return EXIT_UNSUPPORTED
    except BudgetExceededError as e:
        _err(f"budget exceeded: {e}")
        return EXIT_BUDGET
    except SolverInconsistencyError as e:
        _err(f"no consistent optimum: {e}")
        return EXIT_INCONSISTENT
    out = args.out or f"{Path(args.instance).stem}-{stage_slug}.lp"
    try:
        m_used = export_bigm_milp(system, out)
    except OSError as e:
        _err(f"cannot write {out}: {e.strerror or e}")
        return EXIT_USAGE
    print(f"wrote {out}")
    print(f"M = {m_used}")
    return EXIT_OK


def _partition_lines(inst: BilevelInstance) -> list[str]:
    from itertools import combinations

    ymax = greatest_point(inst.tp2)
    xs = x_star(ymax)
    lines = [f"ymax = {format_vector(ymax)}", f"x* = {format_vector(xs)}"]
    n = inst.dim
    for size in range(1, n + 1):
        for I in combinations(range(1, n + 1), size):
            J = [j for j in range(1, n + 1) if j not in I]
            piece = partition_piece(inst, list(I), J)
            star = [c.value for c in piece.xstar]
            if len(I) == 1:
                i = I[0]
                y_side = f"y_{i} = {piece.total - star[i - 1]}"
            else:
                inner = ", ".join(f"y_{i} + {star[i - 1]}" for i in I)
                y_side = f"max({inner}) = {piece.total}"
            x_rows = []
            for i in I:
                for j in J:
                    shift = star[j - 1] - star[i - 1]
                    sign = "-" if shift < 0 else "+"
                    x_rows.append(f"x_{j} <= x_{i} {sign} {abs(shift)}")
            x_rows += [
                f"x_{i} - {star[i - 1]} = x_{k} - {star[k - 1]}"
                for i, k in zip(I, I[1:])
            ]
            label = "{" + ",".join(str(i) for i in I) + "}"
            desc = f"y-side: {y_side}"
            if x_rows:
                desc += " ; x-side: " + " ; ".join(x_rows)
            lines.append(f"I={label}: {desc}")
    return lines


def cmd_inspect(args) -> int:
    inst = _load(args.instance)
    if inst is None:
        return EXIT_USAGE
    tokens = args.what
    what = tokens[0]
    try:
        if what == "minpoints":
            which = tokens[1] if len(tokens) > 1 else "tp2"
            if which not in ("tp1", "tp2") or len(tokens) > 2:
                _err(f"minpoints takes tp1 or tp2, got {' '.join(tokens[1:])!r}")
                return EXIT_USAGE
            P = inst.tp1 if which == "tp1" else inst.tp2
            pts = minimal_points(P)
            print("{" + ", ".join(format_vector(p) for p in pts) + "}")
        elif tokens == ["ymax"]:
            print(format_vector(greatest_point(inst.tp2)))
        elif tokens == ["xstar"]:
            print(format_vector(x_star(greatest_point(inst.tp2))))
        elif tokens == ["partitions"]:
            for line in _partition_lines(inst):
                print(line)
        elif tokens == ["figure"]:
            svg = figure_svg(inst)
            if args.out:
                try:
                    Path(args.out).write_text(svg + "\n", encoding="utf-8")
                except OSError as e:
                    _err(f"cannot write {args.out}: {e.strerror or e}")
                    return EXIT_USAGE
                print(f"wrote {args.out}")
            else:
                print(svg)
        else:
            _err(
                f"unknown artifact {' '.join(tokens)!r}; "
                "use minpoints [tp1|tp2], ymax, xstar, partitions, or figure"
            )
            return EXIT_USAGE
    except UnsupportedInstanceError as e:
        _err(f"unsupported: {e}")
        return EXIT_UNSUPPORTED
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    """Argparse with usage failures on exit code 1; 2 means infeasible here."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def entrypoint(argv=None) -> int:
    parser = _Parser(
        prog="tropbilevel",
        description="Solvers for bilevel optimization over tropical polytopes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("solve", help="solve an instance and print the witness")
    ps.add_argument("instance", help="instance JSON file")
    ps.add_argument("--algorithm", choices=ALGORITHMS, default="auto")
    ps.add_argument("--output", choices=("text", "json"), default="text")
    ps.add_argument("--budget", type=int, default=None, help="enumeration budget")
    ps.set_defaults(func=cmd_solve)

    pv = sub.add_parser("verify", help="check a witness pair for feasibility")
    pv.add_argument("instance")
    pv.add_argument(
        "--x", required=True, help="comma-separated coordinates; write --x=-3,-1 for negatives"
    )
    pv.add_argument(
        "--y", required=True, help="comma-separated coordinates; write --y=-3,-1 for negatives"
    )
    pv.set_defaults(func=cmd_verify)

    pe = sub.add_parser("export", help="write a big-M MILP file for a subproblem")
    pe.add_argument("instance")
    pe.add_argument(
        "--stage",
        nargs="+",
        required=True,
        metavar="TOKEN",
        help="relaxed | cut K | piece I (e.g. piece {1,2})",
    )
    pe.add_argument("--out", default=None, help="output path (default: derived)")
    pe.add_argument("--budget", type=int, default=None)
    pe.set_defaults(func=cmd_export)

    pi = sub.add_parser("inspect", help="print derived artifacts of an instance")
    pi.add_argument("instance")
    pi.add_argument(
        "--what",
        nargs="+",
        required=True,
        metavar="TOKEN",
        help="minpoints [tp1|tp2] | ymax | xstar | partitions | figure",
    )
    pi.add_argument("--out", default=None, help="figure output path (default: stdout)")
    pi.set_defaults(func=cmd_inspect)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(entrypoint())
