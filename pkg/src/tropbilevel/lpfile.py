"""Big-M MILP export in CPLEX LP format, plus a reader and round-trip solver.

Each selector becomes a family of binary variables with one sum-to-one row;
each guarded constraint is relaxed with a big-M term that switches it off
unless its binary is chosen.  M defaults to the conservative datum-range
formula (max datum - min datum + 1) * (2n + 2) but is raised to a rigorous
per-row bound (the largest violation any box-feasible point can produce)
whenever that is larger, so indicator semantics are exact, not hoped for.
Both numbers are recorded in the header comments.

The reader parses the same dialect back, and the round-trip solver enumerates
the sum-to-one binary groups, fixing each choice and solving the continuous
remainder exactly.  Used to check export consistency against the native path.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, floor, gcd

from .diffsolve import IntDiffGraph
from .enumeration import _split_group
from .linear import LinConstraint, LinTerm, SelectorSystem, eq, leq
from .simplex import solve_lp_exact

OBJ_VAR = "obj_w"


def _fresh_name(base: str, taken) -> str:
    name = base
    while name in taken:
        name = "_" + name
    return name


def _term_range(term: LinTerm, boxes) -> tuple[Fraction, Fraction]:
    lo = hi = term.const
    for v, a in term.coeffs.items():
        blo, bhi = boxes[v]
        if a > 0:
            lo += a * blo
            hi += a * bhi
        else:
            lo += a * bhi
            hi += a * blo
    return lo, hi


def _bigm_rows(system: SelectorSystem, obj_var: str):
    """All rows of the MILP: (term, rel, rhs_const, binary or None).

    A row (t, "<=", r, b) means t + M*b <= r + M when b is set, else t <= r.
    Also returns the widened integer boxes (obj_var included) and the binary
    name per (selector, index).
    """
    taken = set(system.variables())
    bname = {}
    for sel in system.selectors:
        for idx in sel.domain:
            bname[(sel.name, idx)] = _fresh_name(f"b_{sel.name}_{idx}", taken)

    boxes = {}
    for v, (lo, hi) in system.bounds.items():
        boxes[v] = (Fraction(floor(lo)), Fraction(ceil(hi)))

    obj = system.objective
    rows: list[tuple[LinTerm, str, Fraction, str | None]] = []

    def plain(c: LinConstraint, b: str | None):
        coeffs, const = c.normalized()
        t = LinTerm(coeffs)
        if c.rel == "<=":
            rows.append((t, "<=", -const, b))
        else:
            if b is None:
                rows.append((t, "=", -const, None))
            else:
                rows.append((t, "<=", -const, b))
                rows.append((t.scaled(-1), "<=", const, b))

    for c in system.constraints:
        plain(c, None)
    for (sel, idx), group in system.guarded.items():
        for c in group:
            plain(c, bname[(sel, idx)])

    # Objective variable: either pinned to the plain term or guarded per branch.
    if obj.term is not None:
        tlo, thi = _term_range(obj.term, boxes)
        boxes[obj_var] = (Fraction(floor(tlo)) - 1, Fraction(ceil(thi)) + 1)
        plain(eq(LinTerm.var(obj_var), obj.term), None)
    else:
        lo = hi = None
        for t in obj.guarded.values():
            tlo, thi = _term_range(t, boxes)
            lo = tlo if lo is None else min(lo, tlo)
            hi = thi if hi is None else max(hi, thi)
        boxes[obj_var] = (Fraction(floor(lo)) - 1, Fraction(ceil(hi)) + 1)
        for idx, t in obj.guarded.items():
            b = bname[(obj.selector, idx)]
            if obj.direction == "max":
                plain(leq(LinTerm.var(obj_var), t), b)
            else:
                plain(leq(t, LinTerm.var(obj_var)), b)
    return rows, boxes, bname


def _format_int_term(coeffs: dict[str, int]) -> str:
    parts = []
    for v in sorted(coeffs):
        a = coeffs[v]
        if a == 0:
            continue
        mag = abs(a)
        piece = v if mag == 1 else f"{mag} {v}"
        if not parts:
            parts.append(piece if a > 0 else f"- {piece}")
        else:
            parts.append(f"+ {piece}" if a > 0 else f"- {piece}")
    return " ".join(parts) if parts else "0 " + next(iter(sorted(coeffs)), "x")


def export_bigm_milp(system: SelectorSystem, path) -> int:
    """Write the big-M MILP for the system; returns the M used."""
    if system.objective is None:
        raise ValueError("system has no objective")
    rows, boxes, bname = _bigm_rows(system, OBJ_VAR)

    spec_m = (system.datum_hi - system.datum_lo + 1) * (2 * system.dim + 2)
    row_m = Fraction(1)
    for t, rel, rhs, b in rows:
        if b is None:
            continue
        _, slack_hi = _term_range(LinTerm(dict(t.coeffs), -rhs), boxes)
        row_m = max(row_m, slack_hi)
    m_used = max(ceil(spec_m), ceil(row_m))

    lines = []
    lines.append("\\ big-M mixed integer export")
    lines.append(f"\\ M = {m_used}")
    lines.append(
        f"\\ datum-range formula: (max datum - min datum + 1) * (2n + 2) = {spec_m}"
    )
    lines.append(
        f"\\ rigorous per-row bound (max violation over the boxes): {row_m}"
    )
    lines.append("\\ M is the larger of the two, rounded up; boxes are widened")
    lines.append("\\ to integers so every number in this file is an integer.")
    lines.append("\\ one binary per selector value; one sum-to-one row per selector")
    lines.append("Maximize" if system.objective.direction == "max" else "Minimize")
    lines.append(f" obj: {OBJ_VAR}")
    lines.append("Subject To")

    cnum = 0
    for t, rel, rhs, b in rows:
        cnum += 1
        coeffs = dict(t.coeffs)
        const = Fraction(rhs)
        if b is not None:
            coeffs[b] = Fraction(m_used)
            const += m_used
        denom = const.denominator
        for a in coeffs.values():
            denom = denom * a.denominator // gcd(denom, a.denominator)
        icoeffs = {v: int(a * denom) for v, a in coeffs.items()}
        iconst = int(const * denom)
        lines.append(f" c{cnum}: {_format_int_term(icoeffs)} {rel} {iconst}")
    for sel in system.selectors:
        cnum += 1
        srow = {bname[(sel.name, idx)]: 1 for idx in sel.domain}
        lines.append(f" c{cnum}: {_format_int_term(srow)} = 1")

    lines.append("Bounds")
    for v in sorted(boxes):
        lo, hi = boxes[v]
        lines.append(f" {int(lo)} <= {v} <= {int(hi)}")
    if bname:
        lines.append("Binary")
        for sel in system.selectors:
            for idx in sel.domain:
                lines.append(f" {bname[(sel.name, idx)]}")
    lines.append("End")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    return m_used


@dataclass
class ParsedLP:
    direction: str
    objective: LinTerm
    constraints: list[LinConstraint] = field(default_factory=list)
    bounds: dict[str, tuple[Fraction, Fraction]] = field(default_factory=dict)
    binaries: list[str] = field(default_factory=list)


_TOKEN = re.compile(r"\s*(<=|>=|=|[+-]|\d+|[A-Za-z_][A-Za-z0-9_.]*)")


def _tokenize(text: str, where: str) -> list[str]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            if text[pos:].strip():
                raise ValueError(f"bad token in {where}: {text[pos:]!r}")
            break
        tokens.append(m.group(1))
        pos = m.end()
    return tokens


def _parse_expr(tokens: list[str], where: str) -> LinTerm:
    coeffs: dict[str, Fraction] = {}
    const = Fraction(0)
    sign = 1
    pending: Fraction | None = None
    for tok in tokens:
        if tok == "+":
            if pending is not None:
                const += sign * pending
                pending = None
            sign = 1
        elif tok == "-":
            if pending is not None:
                const += sign * pending
                pending = None
            sign = -1
        elif tok[0].isdigit():
            if pending is not None:
                const += sign * pending
            pending = Fraction(tok)
        else:
            coef = Fraction(1) if pending is None else pending
            coeffs[tok] = coeffs.get(tok, Fraction(0)) + sign * coef
            pending = None
            sign = 1
    if pending is not None:
        const += sign * pending
    return LinTerm(coeffs, const)


def parse_lp_file(path) -> ParsedLP:
    with open(path) as fh:
        raw = fh.read()
    lines = []
    for line in raw.splitlines():
        line = line.split("\\", 1)[0].strip()
        if line:
            lines.append(line)

    section = None
    direction = None
    obj_tokens: list[str] = []
    parsed = None
    cons: list[LinConstraint] = []
    bounds: dict[str, tuple[Fraction, Fraction]] = {}
    binaries: list[str] = []

    def close_objective():
        nonlocal parsed
        if direction is None:
            raise ValueError("missing objective section")
        parsed = _parse_expr(obj_tokens, "objective")

    for line in lines:
        low = line.lower()
        if low in ("minimize", "maximize"):
            section = "objective"
            direction = "min" if low == "minimize" else "max"
            continue
        if low in ("subject to", "st", "s.t."):
            close_objective()
            section = "constraints"
            continue
        if low == "bounds":
            section = "bounds"
            continue
        if low in ("binary", "binaries", "general"):
            section = "binary"
            continue
        if low == "end":
            break
        if section == "objective":
            body = line.split(":", 1)[1] if ":" in line else line
            obj_tokens.extend(_tokenize(body, "objective"))
        elif section == "constraints":
            body = line.split(":", 1)[1] if ":" in line else line
            tokens = _tokenize(body, f"constraint {line!r}")
            rels = [i for i, t in enumerate(tokens) if t in ("<=", ">=", "=")]
            if len(rels) != 1:
                raise ValueError(f"expected one relation in {line!r}")
            i = rels[0]
            lhs = _parse_expr(tokens[:i], line)
            rhs = _parse_expr(tokens[i + 1 :], line)
            rel = tokens[i]
            if rel == ">=":
                cons.append(leq(rhs, lhs))
            elif rel == "<=":
                cons.append(leq(lhs, rhs))
            else:
                cons.append(eq(lhs, rhs))
        elif section == "bounds":
            tokens = _tokenize(line, f"bound {line!r}")
            # Only the two-sided form "lo <= var <= hi" is emitted or accepted.
            rels = [i for i, t in enumerate(tokens) if t == "<="]
            if len(rels) != 2:
                raise ValueError(f"unsupported bound line {line!r}")
            lo = _parse_expr(tokens[: rels[0]], line).const
            var_t = _parse_expr(tokens[rels[0] + 1 : rels[1]], line)
            hi = _parse_expr(tokens[rels[1] + 1 :], line).const
            if len(var_t.coeffs) != 1 or var_t.const != 0:
                raise ValueError(f"unsupported bound line {line!r}")
            (var, coef) = next(iter(var_t.coeffs.items()))
            if coef != 1:
                raise ValueError(f"unsupported bound line {line!r}")
            bounds[var] = (lo, hi)
        elif section == "binary":
            for tok in line.split():
                binaries.append(tok)
        else:
            raise ValueError(f"line outside any section: {line!r}")
    if parsed is None:
        close_objective()
    return ParsedLP(direction, parsed, cons, bounds, binaries)


def _substitute(c: LinConstraint, fixed: dict[str, Fraction]) -> LinConstraint:
    coeffs, const = c.normalized()
    out: dict[str, Fraction] = {}
    for v, a in coeffs.items():
        if v in fixed:
            const += a * fixed[v]
        else:
            out[v] = a
    return LinConstraint(LinTerm(out, const), c.rel, LinTerm.constant(0))


def solve_parsed_milp(model: ParsedLP):
    """Solve a parsed export by enumerating its sum-to-one binary groups.

    Returns (status, value, assignment).  Every binary must appear in exactly
    one sum-to-one row; choices are enumerated, the remainder is solved as an
    exact LP, and leaves whose difference-shaped rows are already inconsistent
    are skipped without a simplex call.
    """
    binset = set(model.binaries)
    groups: list[list[str]] = []
    grouped: set[str] = set()
    plain_rows: list[LinConstraint] = []
    for c in model.constraints:
        coeffs, const = c.normalized()
        if const == 1 and all(a == -1 for a in coeffs.values()):
            coeffs = {v: -a for v, a in coeffs.items()}
            const = Fraction(-1)
        names = list(coeffs)
        if (
            c.rel == "="
            and const == -1
            and names
            and all(v in binset and coeffs[v] == 1 for v in names)
        ):
            members = [v for v in model.binaries if v in coeffs]
            if grouped & set(members):
                raise ValueError("binary appears in two selection rows")
            groups.append(members)
            grouped |= set(members)
        else:
            plain_rows.append(c)
    leftover = [b for b in model.binaries if b not in grouped]
    if leftover:
        raise ValueError(f"binaries outside any selection row: {leftover}")

    cont_bounds = {v: b for v, b in model.bounds.items() if v not in binset}
    names = sorted(
        set(cont_bounds)
        | {v for c in plain_rows for v in c.variables() if v not in binset}
        | set(model.objective.variables())
    )

    best = None

    def consider(fixed: dict[str, Fraction]):
        nonlocal best
        subbed = [_substitute(c, fixed) for c in plain_rows]
        grp = _split_group(subbed)
        if grp.dead:
            return
        g = IntDiffGraph(names)
        denom = 1
        for _, _, cc in grp.triples:
            denom = denom * cc.denominator // gcd(denom, cc.denominator)
        for v, (lo, hi) in cont_bounds.items():
            denom = denom * lo.denominator // gcd(denom, lo.denominator)
            denom = denom * hi.denominator // gcd(denom, hi.denominator)
        for v, u, cc in grp.triples:
            g.push_edge(g.index[u], g.index[v], int(cc * denom))
        for v, (lo, hi) in cont_bounds.items():
            g.push_edge(0, g.index[v], int(hi * denom))
            g.push_edge(g.index[v], 0, int(-lo * denom))
        if not g.feasible():
            return
        res = solve_lp_exact(
            subbed, (model.direction, model.objective), bounds=cont_bounds
        )
        if res.status != "optimal":
            return
        vec = tuple(res.assignment.get(v, Fraction(0)) for v in names)
        cand = (res.value, vec, res.assignment, dict(fixed))
        if best is None:
            best = cand
        else:
            if res.value != best[0]:
                take = res.value < best[0] if model.direction == "min" else res.value > best[0]
            else:
                take = vec < best[1]
            if take:
                best = cand

    def walk(k: int, fixed: dict[str, Fraction]):
        if k == len(groups):
            consider(fixed)
            return
        for pick in groups[k]:
            for b in groups[k]:
                fixed[b] = Fraction(1) if b == pick else Fraction(0)
            walk(k + 1, fixed)
        for b in groups[k]:
            del fixed[b]

    walk(0, {})
    if best is None:
        return "infeasible", None, None
    value, _, assignment, binvals = best
    full = dict(assignment)
    full.update(binvals)
    return "optimal", value, full
