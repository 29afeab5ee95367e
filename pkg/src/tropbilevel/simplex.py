"""Exact two-phase simplex over rationals with Bland's anti-cycling rule.

Small dense-tableau implementation used for enumeration leaves that are not
pure difference systems and for re-solving exported mixed systems with fixed
binaries.  Every number is a Fraction; pivots use the least-index rule in both
the entering and leaving choices, so the solver terminates and is
deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .linear import LinConstraint, LinTerm

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    value: Fraction | None = None
    assignment: dict[str, Fraction] | None = None


def _pivot(rows, cost, basis, r, c):
    prow = rows[r]
    piv = prow[c]
    inv = ONE / piv
    rows[r] = [x * inv for x in prow]
    prow = rows[r]
    for i, row in enumerate(rows):
        if i != r and row[c] != 0:
            f = row[c]
            rows[i] = [a - f * b for a, b in zip(row, prow)]
    if cost[c] != 0:
        f = cost[c]
        for j in range(len(cost)):
            cost[j] -= f * prow[j]
    basis[r] = c


def _simplex_min(rows, cost, basis):
    """Minimize cost over the tableau in place; returns 'optimal' or 'unbounded'."""
    ncols = len(cost) - 1
    while True:
        enter = -1
        for j in range(ncols):
            if cost[j] < 0:
                enter = j
                break
        if enter < 0:
            return "optimal"
        leave = -1
        best = None
        for i, row in enumerate(rows):
            a = row[enter]
            if a > 0:
                ratio = row[-1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best = ratio
                    leave = i
        if leave < 0:
            return "unbounded"
        _pivot(rows, cost, basis, leave, enter)


def solve_lp_exact(
    constraints: list[LinConstraint],
    objective: tuple[str, LinTerm],
    bounds: dict[str, tuple[Fraction, Fraction]] | None = None,
) -> LPResult:
    """Solve min/max of an affine term subject to <= and = constraints.

    A variable with box bounds is shifted by its lower bound, so it occupies a
    single nonnegative column and only the upper bound needs a row.  Variables
    without bounds are split into nonnegative pairs, so unbounded problems are
    reported rather than mis-solved.  Phase 1 starts from slack columns where
    a row permits it and adds artificial columns only for the rest.
    """
    direction, obj_term = objective
    if direction not in ("min", "max"):
        raise ValueError(f"bad direction {direction!r}")

    boxed = dict(bounds) if bounds else {}
    names: set[str] = set(obj_term.variables()) | set(boxed)
    for c in constraints:
        names |= c.variables()
    varnames = sorted(names)
    # Column layout: one shifted column per boxed variable, a nonnegative
    # pair v = v+ - v- per free variable.
    col_of: dict[str, int] = {}
    shift: dict[str, Fraction] = {}
    nstruct = 0
    for v in varnames:
        col_of[v] = nstruct
        if v in boxed:
            shift[v] = boxed[v][0]
            nstruct += 1
        else:
            nstruct += 2

    raw = []
    for c in constraints:
        coeffs, const = c.normalized()  # coeffs.x + const (rel) 0
        row = [ZERO] * nstruct
        for v, a in coeffs.items():
            row[col_of[v]] += a
            if v in shift:
                const += a * shift[v]
            else:
                row[col_of[v] + 1] -= a
        raw.append((row, -const, c.rel))
    for v in sorted(boxed):
        row = [ZERO] * nstruct
        row[col_of[v]] = ONE
        lo, hi = boxed[v]
        raw.append((row, hi - lo, "<="))

    nslack = sum(1 for _, _, rel in raw if rel == "<=")
    ncols = nstruct + nslack
    rows = []
    slack_col = []  # usable basis column per row, or -1
    si = 0
    for row, rhs, rel in raw:
        full = row + [ZERO] * nslack + [rhs]
        col = -1
        if rel == "<=":
            full[nstruct + si] = ONE
            col = nstruct + si
            si += 1
        if rhs < 0:
            full = [-x for x in full]
            col = -1  # negated slack coefficient cannot start basic
        rows.append(full)
        slack_col.append(col)

    m = len(rows)
    # Phase 1: slack basis where possible, artificial columns for the rest.
    art_rows = [i for i in range(m) if slack_col[i] < 0]
    nart = len(art_rows)
    nall = ncols + nart
    basis = []
    for i, row in enumerate(rows):
        rhs = row.pop()
        row.extend(ONE if (k < nart and art_rows[k] == i) else ZERO for k in range(nart))
        row.append(rhs)
        basis.append(slack_col[i] if slack_col[i] >= 0 else ncols + art_rows.index(i))
    if nart:
        cost1 = [ZERO] * (nall + 1)
        for j in range(ncols, nall):
            cost1[j] = ONE
        # Price out the rows that start basic in an artificial.
        for i in art_rows:
            row = rows[i]
            for j in range(nall + 1):
                cost1[j] -= row[j]
        status = _simplex_min(rows, cost1, basis)
        assert status == "optimal", "phase 1 cannot be unbounded"
        if -cost1[-1] != 0:
            return LPResult("infeasible")
    else:
        cost1 = [ZERO] * (nall + 1)
    # Drive surviving artificials out of the basis where possible.
    for i in range(m):
        if basis[i] >= ncols:
            pivot_col = -1
            for j in range(ncols):
                if rows[i][j] != 0:
                    pivot_col = j
                    break
            if pivot_col >= 0:
                _pivot(rows, cost1, basis, i, pivot_col)
    # Rows still basic in an artificial are redundant zero rows; drop them,
    # then drop the artificial columns altogether.
    keep = [i for i in range(m) if basis[i] < ncols]
    rows = [rows[i][:ncols] + [rows[i][-1]] for i in keep]
    basis = [basis[i] for i in keep]

    # Phase 2 cost row from the real objective.
    sign = ONE if direction == "min" else -ONE
    cost2 = [ZERO] * (ncols + 1)
    for v, a in obj_term.coeffs.items():
        cost2[col_of[v]] += sign * a
        if v not in shift:
            cost2[col_of[v] + 1] -= sign * a
    # Price out the current basis.
    for i, row in enumerate(rows):
        cj = cost2[basis[i]]
        if cj != 0:
            for j in range(ncols + 1):
                cost2[j] -= cj * row[j]

    status = _simplex_min(rows, cost2, basis)
    if status == "unbounded":
        return LPResult("unbounded")
    values = [ZERO] * ncols
    for i, b in enumerate(basis):
        values[b] = rows[i][-1]
    assignment = {
        v: values[col_of[v]] + shift[v]
        if v in shift
        else values[col_of[v]] - values[col_of[v] + 1]
        for v in varnames
    }
    value = obj_term.evaluate(assignment)
    return LPResult("optimal", value, assignment)
