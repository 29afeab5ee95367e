"""Tropical polytopes in generator form and two-sided tropical halfspaces.

A generator-form polytope is the tropical convex hull of finitely many
vectors: all combinations oplus_i (lambda_i otimes g_i) whose coefficients
satisfy max_i lambda_i = 0.  Membership is decided by residuation, which
produces the componentwise-greatest admissible coefficient vector.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .semiring import (
    BOTTOM,
    TROP_ZERO,
    TropScalar,
    TropVector,
    dominates,
    tcomb,
    tdot,
    vector_max,
)


@dataclass(frozen=True)
class TropPolytopeV:
    """Tropical polytope given by its generators (duplicates dropped)."""

    generators: tuple[TropVector, ...]

    def __init__(self, generators):
        gens = []
        seen = set()
        for g in generators:
            if not isinstance(g, TropVector):
                g = TropVector(g)
            if g not in seen:
                seen.add(g)
                gens.append(g)
        if not gens:
            raise ValueError("a polytope needs at least one generator")
        dim = gens[0].dim
        if any(g.dim != dim for g in gens):
            raise ValueError("generators have mixed dimensions")
        object.__setattr__(self, "generators", tuple(gens))

    @property
    def dim(self) -> int:
        return self.generators[0].dim

    def __repr__(self) -> str:
        return "TropPolytopeV(%d generators, dim %d)" % (len(self.generators), self.dim)


@dataclass(frozen=True)
class TropHalfspace:
    """Two-sided tropical inequality a^T x oplus alpha <= b^T x oplus beta."""

    a: TropVector
    b: TropVector
    alpha: TropScalar = BOTTOM
    beta: TropScalar = BOTTOM

    def sides(self, x: TropVector) -> tuple[TropScalar, TropScalar]:
        return tdot(self.a, x).oplus(self.alpha), tdot(self.b, x).oplus(self.beta)

    def satisfied_by(self, x: TropVector) -> bool:
        lhs, rhs = self.sides(x)
        return lhs <= rhs


@dataclass(frozen=True)
class TropPolyhedronH:
    """Intersection of two-sided tropical halfspaces (empty list = whole space)."""

    dim: int
    halfspaces: tuple[TropHalfspace, ...] = field(default_factory=tuple)


def residuate(P: TropPolytopeV, x: TropVector) -> list[TropScalar]:
    """Greatest coefficients lambda with lambda_i otimes g_i <= x, capped at 0.

    Conventions per coordinate j: finite-minus-finite is the usual difference;
    a BOTTOM generator entry imposes no constraint; a BOTTOM x_j against a
    finite generator entry forces lambda_i = BOTTOM.
    """
    if x.dim != P.dim:
        raise ValueError(f"dimension mismatch: {x.dim} vs {P.dim}")
    out: list[TropScalar] = []
    for g in P.generators:
        forced_bottom = False
        best: Fraction | None = None
        for xj, gj in zip(x, g):
            if gj.is_bottom:
                continue  # no constraint from this coordinate
            if xj.is_bottom:
                forced_bottom = True
                break
            d = xj.value - gj.value
            if best is None or d < best:
                best = d
        if forced_bottom:
            out.append(BOTTOM)
        elif best is None or best > 0:
            out.append(TROP_ZERO)
        else:
            out.append(TropScalar(best))
    return out


def contains(P: TropPolytopeV, x: TropVector) -> tuple[bool, list[TropScalar] | None]:
    """Exact membership test; returns the witnessing coefficients when inside."""
    lam = residuate(P, x)
    top = BOTTOM
    for c in lam:
        top = top.oplus(c)
    if top != TROP_ZERO:
        return False, None
    if tcomb(list(P.generators), lam) != x:
        return False, None
    return True, lam


def contains_h(H: TropPolyhedronH, x: TropVector) -> bool:
    """Membership in a halfspace intersection; no halfspaces means everything."""
    if x.dim != H.dim:
        raise ValueError(f"dimension mismatch: {x.dim} vs {H.dim}")
    return all(h.satisfied_by(x) for h in H.halfspaces)


def greatest_point(P: TropPolytopeV) -> TropVector:
    """Componentwise max of the generators; the top element of the polytope."""
    return vector_max(list(P.generators))


def minimal_points(P: TropPolytopeV) -> list[TropVector]:
    """Generators not dominated from below by another generator.

    Generators are deduplicated at construction, so domination by a distinct
    generator is strict.  Quadratic scan; generator order is preserved.
    """
    gens = P.generators
    out = []
    for i, g in enumerate(gens):
        if any(j != i and dominates(g, h) for j, h in enumerate(gens)):
            continue
        out.append(g)
    return out


def extreme_generators(P: TropPolytopeV) -> list[TropVector]:
    """Irredundant generator list via greedy removal.

    Scans in order and drops any generator contained in the hull of the
    remaining ones; each removal is re-checked with the full membership test,
    so the result generates the same polytope.
    """
    kept = list(P.generators)
    i = 0
    while i < len(kept):
        rest = kept[:i] + kept[i + 1 :]
        if rest:
            inside, _ = contains(TropPolytopeV(rest), kept[i])
            if inside:
                kept.pop(i)
                continue
        i += 1
    return kept


def phi_and_argmin(P: TropPolytopeV, x: TropVector) -> tuple[TropScalar, TropVector]:
    """Least tropical scalar product of x against P, with its attaining point.

    The minimum of x^T y over y in P is attained at a minimal point, so the
    scan runs over minimal_points only.  Ties pick the lexicographically
    smallest attaining point (BOTTOM sorts first).
    """
    candidates = sorted(minimal_points(P), key=lambda v: v.key())
    best_val: TropScalar | None = None
    best_arg: TropVector | None = None
    for y in candidates:
        v = tdot(x, y)
        if best_val is None or v < best_val:
            best_val, best_arg = v, y
    assert best_val is not None and best_arg is not None
    return best_val, best_arg


def project_below(P: TropPolytopeV, ub: TropVector) -> TropVector | None:
    """Greatest point of P at or below the bound, or None if none exists."""
    lam = residuate(P, ub)
    top = BOTTOM
    for c in lam:
        top = top.oplus(c)
    if top != TROP_ZERO:
        return None
    return tcomb(list(P.generators), lam)
