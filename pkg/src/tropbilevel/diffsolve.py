"""Difference-constraint systems solved by Bellman-Ford.

Rows have the form v - u <= c.  A distinguished zero variable anchors the
system; single-variable bounds are rows against it.  Feasibility is the
absence of a negative cycle in the constraint graph, the extreme values of a
variable relative to zero are shortest-path distances, and the
componentwise-least solution (used as the canonical witness) is read off the
distances towards zero.

All public values are exact rationals; internally constants are scaled by
their common denominator so the inner loops run on machine integers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

ZERO_VAR = "__zero__"

INF = None  # unreachable marker in distance arrays


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


@dataclass
class DiffSystem:
    """Rows (v, u, c) meaning v - u <= c, over named variables plus ZERO_VAR."""

    rows: list[tuple[str, str, Fraction]] = field(default_factory=list)

    def add(self, v: str, u: str, c) -> None:
        self.rows.append((v, u, Fraction(c)))

    def add_upper(self, v: str, c) -> None:
        """v <= c."""
        self.add(v, ZERO_VAR, c)

    def add_lower(self, v: str, c) -> None:
        """v >= c."""
        self.add(ZERO_VAR, v, -Fraction(c))

    def variables(self) -> list[str]:
        names = {name for v, u, _ in self.rows for name in (v, u)}
        names.discard(ZERO_VAR)
        return sorted(names)


@dataclass
class DiffResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    value: Fraction | None = None
    assignment: dict[str, Fraction] | None = None


class IntDiffGraph:
    """Integer-weight constraint graph with a fixed node universe.

    Node 0 is the zero variable.  Edges (u, v, w) encode x_v - x_u <= w.
    Supports an edge stack so enumeration can push and pop constraint groups.
    """

    def __init__(self, names: list[str]):
        self.names = [ZERO_VAR] + [n for n in names if n != ZERO_VAR]
        self.index = {n: i for i, n in enumerate(self.names)}
        self.n = len(self.names)
        self.edges: list[tuple[int, int, int]] = []
        self._marks: list[int] = []

    def push_edge(self, u: int, v: int, w: int) -> None:
        self.edges.append((u, v, w))

    def mark(self) -> None:
        self._marks.append(len(self.edges))

    def pop_to_mark(self) -> None:
        del self.edges[self._marks.pop() :]

    def feasible(self) -> bool:
        """True iff the graph has no negative cycle."""
        dist = [0] * self.n
        edges = self.edges
        for _ in range(self.n):
            changed = False
            for u, v, w in edges:
                d = dist[u] + w
                if d < dist[v]:
                    dist[v] = d
                    changed = True
            if not changed:
                return True
        # One more pass: any improvement now proves a negative cycle.
        for u, v, w in edges:
            if dist[u] + w < dist[v]:
                return False
        return True

    def dists_from(self, src: int, reverse: bool = False):
        """Shortest distances from src, or None if a negative cycle interferes.

        Entries are ints or INF for unreachable nodes.  With reverse=True the
        edges are traversed backwards, giving distances *to* src.
        """
        dist = [INF] * self.n
        dist[src] = 0
        edges = self.edges
        for _ in range(self.n):
            changed = False
            for u, v, w in edges:
                if reverse:
                    u, v = v, u
                if dist[u] is INF:
                    continue
                d = dist[u] + w
                if dist[v] is INF or d < dist[v]:
                    dist[v] = d
                    changed = True
            if not changed:
                return dist
        for u, v, w in edges:
            if reverse:
                u, v = v, u
            if dist[u] is not INF and (dist[v] is INF or dist[u] + w < dist[v]):
                return None
        return dist

    def least_solution(self):
        """Componentwise-least solution with zero pinned at 0, or None.

        Variables that cannot reach the zero node have no finite lower bound;
        they are placed by shifted super-source potentials, which keeps the
        assignment feasible.
        """
        to_zero = self.dists_from(0, reverse=True)
        if to_zero is None:
            return None
        x = [0] * self.n
        unreachable = [i for i in range(self.n) if to_zero[i] is INF]
        for i in range(self.n):
            if to_zero[i] is not INF:
                x[i] = -to_zero[i]
        if unreachable:
            # Potentials from an implicit super-source are feasible globally.
            pot = [0] * self.n
            for _ in range(self.n):
                changed = False
                for u, v, w in self.edges:
                    d = pot[u] + w
                    if d < pot[v]:
                        pot[v] = d
                        changed = True
                if not changed:
                    break
            # Nodes that cannot reach zero only appear as left-hand sides of
            # rows x_v - x_u <= w with u reachable, so shifting them down by a
            # common amount keeps every such row satisfied.
            shift = 0
            unreach = set(unreachable)
            for u, v, w in self.edges:
                if v in unreach and u not in unreach:
                    shift = min(shift, w + x[u] - pot[v])
            for i in unreachable:
                x[i] = pot[i] + shift
        base = x[0]
        return [xi - base for xi in x]


def _scale_rows(rows) -> tuple[int, list[tuple[str, str, int]]]:
    denom = 1
    for _, _, c in rows:
        denom = _lcm(denom, Fraction(c).denominator)
    scaled = [(v, u, int(Fraction(c) * denom)) for v, u, c in rows]
    return denom, scaled


def solve_diff_system(system: DiffSystem, objective: tuple[str, str] | None = None) -> DiffResult:
    """Optimize a single variable over a difference system.

    objective is ("min"|"max", var) or None for a bare feasibility check.
    The witness is the componentwise-least solution among the optimal ones.
    """
    names = system.variables()
    denom, scaled = _scale_rows(system.rows)
    g = IntDiffGraph(names)
    for v, u, w in scaled:
        g.push_edge(g.index[u], g.index[v], w)
    if not g.feasible():
        return DiffResult("infeasible")

    def finish(value_int: int | None):
        sol = g.least_solution()
        assert sol is not None
        assignment = {
            name: Fraction(sol[g.index[name]], denom) for name in names
        }
        value = None if value_int is None else Fraction(value_int, denom)
        return DiffResult("optimal", value, assignment)

    if objective is None:
        return finish(None)
    direction, var = objective
    if var not in g.index:
        raise ValueError(f"objective variable {var!r} not in system")
    t = g.index[var]
    if direction == "max":
        dist = g.dists_from(0)
        assert dist is not None
        if dist[t] is INF:
            return DiffResult("unbounded")
        opt = dist[t]
        # Pin the optimum, then take the least solution.
        g.push_edge(t, 0, -opt)
        return finish(opt)
    if direction == "min":
        to_zero = g.dists_from(0, reverse=True)
        assert to_zero is not None
        if to_zero[t] is INF:
            return DiffResult("unbounded")
        opt = -to_zero[t]
        g.push_edge(0, t, opt)
        return finish(opt)
    raise ValueError(f"bad direction {direction!r}")
