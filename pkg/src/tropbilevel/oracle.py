"""Brute-force oracles for desk-scale verification.

Samples hull points by walking a grid in coefficient space, so every sample
is a genuine hull member and comparisons against the exact solvers need no
tolerances.  Only useful for small dimensions; the solvers never call this.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .errors import BudgetExceededError
from .polytope import TropPolytopeV, greatest_point
from .semiring import BOTTOM, TropScalar, TropVector, tcomb, tdot, trop

DEFAULT_SAMPLE_BUDGET = 200_000


@dataclass(frozen=True)
class GridSpec:
    """Coefficient grid: levels 0, -step, -2*step, ... down to depth, plus BOTTOM."""

    step: Fraction
    depth: Fraction
    include_generators: bool = True

    def __post_init__(self):
        object.__setattr__(self, "step", Fraction(self.step))
        object.__setattr__(self, "depth", Fraction(self.depth))
        if self.step <= 0:
            raise ValueError(f"grid step must be positive, got {self.step}")
        if self.depth >= 0:
            raise ValueError(f"grid depth must be negative, got {self.depth}")

    def levels(self) -> list[TropScalar]:
        out = []
        k = 0
        while -k * self.step >= self.depth:
            out.append(trop(-k * self.step))
            k += 1
        out.append(BOTTOM)
        return out


def sample_polytope(
    P: TropPolytopeV, G: GridSpec, budget: int = DEFAULT_SAMPLE_BUDGET
) -> list[TropVector]:
    """All hull points reachable with grid coefficients, deduplicated.

    Coefficient tuples run over levels^m and are kept only when the largest
    coefficient is exactly 0, which is what makes the combination a hull
    member.  Generators come first when the spec asks for them.
    """
    for g in P.generators:
        if not g.is_finite():
            raise ValueError("sample_polytope needs finite generators")
    levels = G.levels()
    m = len(P.generators)
    if len(levels) ** m > budget:
        raise BudgetExceededError(
            f"{len(levels)}^{m} coefficient tuples exceed budget {budget}"
        )
    zero = trop(0)
    seen: dict[TropVector, None] = {}
    if G.include_generators:
        for g in P.generators:
            seen.setdefault(g, None)
    for lam in itertools.product(levels, repeat=m):
        if zero not in lam:
            continue  # max coefficient must be 0
        seen.setdefault(tcomb(P.generators, list(lam)), None)
    return list(seen)


def brute_phi(P: TropPolytopeV, x: TropVector, G: GridSpec) -> TropScalar:
    """Smallest tropical product x^Ts over the sampled points of P."""
    best = None
    for s in sample_polytope(P, G):
        v = tdot(x, s)
        if best is None or v < best:
            best = v
    return best


def brute_bilevel(inst, G: GridSpec, budget: int = DEFAULT_SAMPLE_BUDGET):
    """Exhaustive bilevel scan over sampled pairs; returns (value, x, y).

    A pair is kept when y is lower-level optimal at x over the same sample:
    for a minimizing lower level that means x^Ty matches the sampled minimum,
    for a maximizing one it means x^Ty = x^T(y^max).  The reported value is
    the best upper-level objective over kept pairs, ties broken by the
    witness vectors so reruns are stable.
    """
    xs = sample_polytope(inst.tp1, G, budget)
    ys = sample_polytope(inst.tp2, G, budget)
    if len(xs) * len(ys) > budget:
        raise BudgetExceededError(
            f"{len(xs)}x{len(ys)} sampled pairs exceed budget {budget}"
        )
    ymax = greatest_point(inst.tp2)
    minimize = inst.upper == "min"
    best_key = None
    best_pair = None
    for x in xs:
        if inst.lower == "min":
            target = min(tdot(x, y) for y in ys)
        else:
            target = tdot(x, ymax)
        for y in ys:
            if tdot(x, y) != target:
                continue
            value = tdot(inst.a, x).oplus(tdot(inst.b, y))
            key = (value, x.key(), y.key())
            if best_key is None:
                better = True
            elif minimize:
                better = key < best_key
            else:
                # prefer larger value, then the smaller witness pair
                better = (key[0] > best_key[0]) or (
                    key[0] == best_key[0] and key[1:] < best_key[1:]
                )
            if better:
                best_key = key
                best_pair = (x, y)
    if best_pair is None:
        raise ValueError("no lower-level optimal pair sampled")
    return best_key[0], best_pair[0], best_pair[1]
