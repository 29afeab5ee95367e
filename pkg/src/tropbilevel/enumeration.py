"""Exhaustive selector enumeration over a SelectorSystem.

Every instantiation of the selectors yields a plain linear system.  The
driver walks the instantiation tree depth first, pushing the difference rows
implied by each chosen guard group onto an incremental constraint graph;
subtrees whose accumulated difference rows are already infeasible are pruned,
which is sound because pruned leaves can only be infeasible.  Leaves that are
pure difference systems are solved by Bellman-Ford on that same graph, other
leaves by the exact simplex.

The result is the best feasible leaf optimum under a total order: objective
value first (per direction), then the lexicographically smallest assignment
vector over sorted variable names.  That order makes the outcome independent
of traversal order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from .diffsolve import INF, ZERO_VAR, IntDiffGraph
from .errors import BudgetExceededError
from .linear import LinConstraint, LinTerm, SelectorSystem
from .simplex import solve_lp_exact

DEFAULT_BUDGET = 10**6


@dataclass
class EnumerationResult:
    status: str  # "optimal" | "infeasible"
    value: Fraction | None = None
    assignment: dict[str, Fraction] | None = None
    selection: dict[str, int] | None = None
    leaves: int = 0
    pruned: int = 0


@dataclass
class _Group:
    """One guard group, pre-split into difference rows and general rows."""

    dead: bool = False
    triples: list[tuple[str, str, Fraction]] = field(default_factory=list)
    general: list[LinConstraint] = field(default_factory=list)
    original: list[LinConstraint] = field(default_factory=list)


def _leq_triples(coeffs: dict[str, Fraction], const: Fraction):
    """Difference rows for coeffs.x + const <= 0, or None if not that shape."""
    items = sorted(coeffs.items())
    if not items:
        return [] if const <= 0 else "dead"
    if len(items) == 1:
        (v, a) = items[0]
        if a > 0:
            return [(v, ZERO_VAR, -const / a)]
        return [(ZERO_VAR, v, const / a)]
    if len(items) == 2 and items[0][1] == -items[1][1]:
        (v1, a1), (v2, a2) = items
        if a1 > 0:
            return [(v1, v2, -const / a1)]
        return [(v2, v1, -const / a2)]
    return None


def _split_group(cons: list[LinConstraint]) -> _Group:
    grp = _Group(original=list(cons))
    for c in cons:
        coeffs, const = c.normalized()
        if c.rel == "<=":
            rows = _leq_triples(coeffs, const)
        else:
            fwd = _leq_triples(coeffs, const)
            if fwd is None:
                rows = None
            else:
                bwd = _leq_triples({v: -a for v, a in coeffs.items()}, -const)
                if fwd == "dead" or bwd == "dead":
                    rows = "dead"
                else:
                    rows = fwd + bwd
        if rows == "dead":
            grp.dead = True
        elif rows is None:
            grp.general.append(c)
        else:
            grp.triples.extend(rows)
    return grp


def _diff_objective_shape(term: LinTerm):
    """(var, coeff) if the term is c*var + k with c = +-1, () if constant."""
    if not term.coeffs:
        return ()
    if len(term.coeffs) == 1:
        (v, c) = next(iter(term.coeffs.items()))
        if c == 1 or c == -1:
            return (v, c)
    return None


def enumerate_solve(system: SelectorSystem, budget: int = DEFAULT_BUDGET) -> EnumerationResult:
    """Best feasible optimum over all selector instantiations.

    Raises BudgetExceededError when the full instantiation count (before any
    pruning) exceeds the budget.
    """
    if system.objective is None:
        raise ValueError("system has no objective")
    count = system.instantiation_count()
    if count > budget:
        raise BudgetExceededError(
            f"instantiation count {count} exceeds budget {budget}"
        )
    direction = system.objective.direction
    varnames = system.variables()
    for v in varnames:
        if v not in system.bounds:
            raise ValueError(f"variable {v} has no box bounds")

    fixed = _split_group(system.constraints)
    if fixed.dead:
        return EnumerationResult("infeasible")
    groups = {key: _split_group(cons) for key, cons in system.guarded.items()}

    box_triples: list[tuple[str, str, Fraction]] = []
    for v in varnames:
        lo, hi = system.bounds[v]
        box_triples.append((v, ZERO_VAR, hi))
        box_triples.append((ZERO_VAR, v, -lo))

    denom = 1
    all_triples = fixed.triples + box_triples
    for grp in groups.values():
        all_triples = all_triples + grp.triples
    for _, _, c in all_triples:
        denom = denom * c.denominator // gcd(denom, c.denominator)
    scale = denom

    g = IntDiffGraph(varnames)

    def push_triples(triples) -> None:
        for v, u, c in triples:
            g.push_edge(g.index[u], g.index[v], int(c * scale))

    push_triples(fixed.triples)
    push_triples(box_triples)
    if not g.feasible():
        return EnumerationResult("infeasible")

    sels = list(system.selectors)
    choice: dict[str, int] = {}
    chosen_groups: list[_Group] = []
    best: tuple[Fraction, tuple, dict, dict] | None = None
    leaves = 0
    pruned = 0

    def leaf_objective() -> LinTerm:
        obj = system.objective
        if obj.term is not None:
            return obj.term
        return obj.guarded[choice[obj.selector]]

    def better(value: Fraction, vec: tuple) -> bool:
        if best is None:
            return True
        bval, bvec = best[0], best[1]
        if value != bval:
            return value < bval if direction == "min" else value > bval
        return vec < bvec

    def solve_leaf() -> None:
        nonlocal best, leaves
        leaves += 1
        term = leaf_objective()
        shape = _diff_objective_shape(term)
        has_general = bool(fixed.general) or any(grp.general for grp in chosen_groups)
        if has_general or shape is None:
            cons = list(fixed.original)
            for grp in chosen_groups:
                cons.extend(grp.original)
            res = solve_lp_exact(cons, (direction, term), bounds=system.bounds)
            if res.status == "infeasible":
                return
            assert res.status == "optimal", "boxed leaves cannot be unbounded"
            value = res.value
            assignment = res.assignment
        else:
            if shape == ():
                value = term.const
                sol = g.least_solution()
                assert sol is not None
            else:
                var, coeff = shape
                t = g.index[var]
                want_max = (direction == "max") == (coeff == 1)
                if want_max:
                    dist = g.dists_from(0)
                    assert dist is not None and dist[t] is not INF
                    opt = dist[t]
                    pin = (t, 0, -opt)
                else:
                    to_zero = g.dists_from(0, reverse=True)
                    assert to_zero is not None and to_zero[t] is not INF
                    opt = -to_zero[t]
                    pin = (0, t, opt)
                value = coeff * Fraction(opt, scale) + term.const
                g.mark()
                g.push_edge(*pin)
                sol = g.least_solution()
                g.pop_to_mark()
                assert sol is not None
            assignment = {
                name: Fraction(sol[g.index[name]], scale) for name in varnames
            }
        vec = tuple(assignment[v] for v in varnames)
        if better(value, vec):
            best = (value, vec, dict(assignment), dict(choice))

    def descend(depth: int) -> None:
        nonlocal pruned
        if depth == len(sels):
            solve_leaf()
            return
        sel = sels[depth]
        for idx in sel.domain:
            grp = groups[(sel.name, idx)]
            if grp.dead:
                continue
            g.mark()
            push_triples(grp.triples)
            if not g.feasible():
                g.pop_to_mark()
                pruned += 1
                continue
            choice[sel.name] = idx
            chosen_groups.append(grp)
            descend(depth + 1)
            chosen_groups.pop()
            del choice[sel.name]
            g.pop_to_mark()

    descend(0)
    if best is None:
        return EnumerationResult("infeasible", leaves=leaves, pruned=pruned)
    value, _, assignment, selection = best
    return EnumerationResult("optimal", value, assignment, selection, leaves, pruned)
