"""Encoders from tropical constraints to selector systems.

Membership of x in a generator-form polytope becomes: coefficients
lam_i <= 0, one normalization selector forcing some lam_i = 0, domination
rows x_j >= lam_i + g_ij for all i and j, and one selector per coordinate
choosing which generator attains x_j.  Two-sided tropical inequalities
max(lhs terms) <= max(rhs terms) need one selector choosing the attaining
right-hand term; the left side is conjunctive.  Cut constraints x^T y <= x^T z
introduce one bound variable t_z sandwiched by a selector.

Only finite data can be encoded; BOTTOM coordinates are rejected here even
though the tropical layer supports them.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import UnsupportedInstanceError
from .linear import LinConstraint, LinTerm, Objective, SelectorSystem, eq, leq
from .polytope import TropHalfspace, TropPolytopeV
from .semiring import TropScalar, TropVector


def require_finite(v: TropVector, what: str) -> list[Fraction]:
    vals = []
    for entry in v:
        if entry.is_bottom:
            raise UnsupportedInstanceError(
                f"{what} has a BOTTOM coordinate; the linear kernel needs finite data"
            )
        vals.append(entry.value)
    return vals


def note_datum(system: SelectorSystem, value: Fraction) -> None:
    value = Fraction(value)
    if value < system.datum_lo:
        system.datum_lo = value
    if value > system.datum_hi:
        system.datum_hi = value


def coord_name(prefix: str, j: int) -> str:
    return f"{prefix}_{j + 1}"


def lam_name(prefix: str, i: int) -> str:
    return f"{prefix}_lam_{i + 1}"


def encode_membership(system: SelectorSystem, P: TropPolytopeV, prefix: str) -> list[str]:
    """Add the membership fragment for prefix-named coordinates in P.

    Returns the coordinate variable names.  Adds one normalization selector
    (which lam_i is zero) and one attainment selector per coordinate.
    """
    gens = [require_finite(g, "generator") for g in P.generators]
    m = len(gens)
    n = P.dim
    coords = [coord_name(prefix, j) for j in range(n)]
    lams = [lam_name(prefix, i) for i in range(m)]
    for row in gens:
        for v in row:
            note_datum(system, v)
    for i in range(m):
        system.constraints.append(
            leq(LinTerm.var(lams[i]), LinTerm.constant(0), f"{prefix}_lam{i + 1}_nonpos")
        )
        for j in range(n):
            # x_j >= lam_i + g_ij
            system.constraints.append(
                leq(
                    LinTerm.var(lams[i], const=gens[i][j]),
                    LinTerm.var(coords[j]),
                    f"{prefix}_dom_{i + 1}_{j + 1}",
                )
            )
    system.add_selector(
        f"{prefix}_norm",
        range(m),
        {i: [eq(LinTerm.var(lams[i]), LinTerm.constant(0), f"{prefix}_norm_{i + 1}")] for i in range(m)},
    )
    for j in range(n):
        system.add_selector(
            f"{prefix}_co_{j + 1}",
            range(m),
            {
                s: [
                    leq(
                        LinTerm.var(coords[j]),
                        LinTerm.var(lams[s], const=gens[s][j]),
                        f"{prefix}_at_{j + 1}_{s + 1}",
                    )
                ]
                for s in range(m)
            },
        )
    return coords


def encode_cut(
    system: SelectorSystem,
    x_prefix: str,
    y_prefix: str,
    z: TropVector,
    tag: str,
) -> str:
    """Add the cut x^T y <= x^T z via the bound variable named by tag.

    t_tag is forced to equal x^T z (domination rows plus one attainment
    selector) and every x_i + y_i is capped by it.
    """
    zvals = require_finite(z, "cut point")
    n = len(zvals)
    tname = f"{tag}_t"
    for v in zvals:
        note_datum(system, v)
    for j in range(n):
        system.constraints.append(
            leq(
                LinTerm.var(coord_name(x_prefix, j), const=zvals[j]),
                LinTerm.var(tname),
                f"{tag}_dom_{j + 1}",
            )
        )
    system.add_selector(
        f"{tag}_at",
        range(n),
        {
            s: [
                leq(
                    LinTerm.var(tname),
                    LinTerm.var(coord_name(x_prefix, s), const=zvals[s]),
                    f"{tag}_at_{s + 1}",
                )
            ]
            for s in range(n)
        },
    )
    for i in range(n):
        system.constraints.append(
            leq(
                LinTerm.var(coord_name(x_prefix, i)).plus(LinTerm.var(coord_name(y_prefix, i))),
                LinTerm.var(tname),
                f"{tag}_cap_{i + 1}",
            )
        )
    return tname


def encode_tropical_leq(
    system: SelectorSystem,
    lhs_terms: list[LinTerm],
    rhs_terms: list[LinTerm],
    tag: str,
) -> None:
    """Add max(lhs_terms) <= max(rhs_terms) over affine terms.

    Every lhs term must sit below the selector-chosen rhs term; at any point
    the chosen term can be the attaining one, so the disjunction over choices
    is exact.  A single rhs term needs no selector.  An empty rhs with a
    nonempty lhs is an infeasible marker row.
    """
    for t in lhs_terms + rhs_terms:
        note_datum(system, t.const)
    if not rhs_terms:
        if lhs_terms:
            system.constraints.append(
                leq(LinTerm.constant(0), LinTerm.constant(-1), f"{tag}_infeasible")
            )
        return
    if not lhs_terms:
        return
    if len(rhs_terms) == 1:
        for k, l in enumerate(lhs_terms):
            system.constraints.append(leq(l, rhs_terms[0], f"{tag}_{k + 1}"))
        return
    system.add_selector(
        tag,
        range(len(rhs_terms)),
        {
            r: [leq(l, rhs_terms[r], f"{tag}_{k + 1}_{r + 1}") for k, l in enumerate(lhs_terms)]
            for r in range(len(rhs_terms))
        },
    )


def halfspace_terms(
    hs: TropHalfspace, coords: list[str]
) -> tuple[list[LinTerm], list[LinTerm]]:
    """Affine term lists for the two sides of a tropical halfspace."""

    def side(vec: TropVector, const: TropScalar) -> list[LinTerm]:
        terms = []
        for j, c in enumerate(vec):
            if not c.is_bottom:
                terms.append(LinTerm.var(coords[j], const=c.value))
        if not const.is_bottom:
            terms.append(LinTerm.constant(const.value))
        return terms

    return side(hs.a, hs.alpha), side(hs.b, hs.beta)


def encode_halfspace(
    system: SelectorSystem, hs: TropHalfspace, coords: list[str], tag: str
) -> None:
    lhs, rhs = halfspace_terms(hs, coords)
    encode_tropical_leq(system, lhs, rhs, tag)


def encode_epigraph_min(
    system: SelectorSystem, tvar: str, terms: list[LinTerm]
) -> None:
    """Bound tvar above every term and minimize it; empty terms pin tvar to 0."""
    if not terms:
        system.constraints.append(eq(LinTerm.var(tvar), LinTerm.constant(0), "obj_empty"))
    for k, t in enumerate(terms):
        note_datum(system, t.const)
        system.constraints.append(leq(t, LinTerm.var(tvar), f"obj_{k + 1}"))
    system.objective = Objective("min", term=LinTerm.var(tvar))


def objective_terms(
    a: TropVector, coords_x: list[str], b: TropVector, coords_y: list[str]
) -> list[LinTerm]:
    """Finite terms of f(x, y) = a^T x oplus b^T y in a fixed order."""
    terms = []
    for j, c in enumerate(a):
        if not c.is_bottom:
            terms.append(LinTerm.var(coords_x[j], const=c.value))
    for j, c in enumerate(b):
        if not c.is_bottom:
            terms.append(LinTerm.var(coords_y[j], const=c.value))
    return terms


def apply_boxes(system: SelectorSystem, kinds: dict[str, str]) -> None:
    """Assign box bounds to variables by kind: coord, lam, or sum.

    Widths come from the finite datum range, wide enough that no optimum of
    the un-boxed system is cut off: hull coordinates live inside the generator
    range, admissible coefficients within one width of zero, and bound or
    epigraph variables within a two-datum sum.
    """
    lo, hi = system.datum_lo, system.datum_hi
    width = hi - lo + 1
    for var, kind in kinds.items():
        if kind == "coord":
            system.set_box(var, lo - width, hi + width)
        elif kind == "lam":
            system.set_box(var, -3 * width, Fraction(0))
        elif kind == "sum":
            system.set_box(var, 2 * lo - 3 * width, 2 * hi + 3 * width)
        else:
            raise ValueError(f"unknown box kind {kind!r}")


def build_step_system(
    tp1: TropPolytopeV,
    tp2: TropPolytopeV,
    a: TropVector,
    b: TropVector,
    cuts: list[TropVector],
    upper: str,
) -> SelectorSystem:
    """Joint system for one cut-generation step: memberships, cuts, objective.

    upper is "min" or "max".  Minimization uses the epigraph variable obj_t;
    maximization uses a selector choosing the attaining objective term.
    """
    system = SelectorSystem(dim=tp1.dim)
    kinds: dict[str, str] = {}
    coords_x = encode_membership(system, tp1, "x")
    coords_y = encode_membership(system, tp2, "y")
    for j, name in enumerate(coords_x):
        kinds[name] = "coord"
    for name in coords_y:
        kinds[name] = "coord"
    for i in range(len(tp1.generators)):
        kinds[lam_name("x", i)] = "lam"
    for i in range(len(tp2.generators)):
        kinds[lam_name("y", i)] = "lam"
    for k, z in enumerate(cuts):
        tname = encode_cut(system, "x", "y", z, f"cut_{k + 1}")
        kinds[tname] = "sum"
    for vec in (a, b):
        for c in vec:
            if not c.is_bottom:
                note_datum(system, c.value)
    terms = objective_terms(a, coords_x, b, coords_y)
    if upper == "min":
        encode_epigraph_min(system, "obj_t", terms)
        kinds["obj_t"] = "sum"
    elif upper == "max":
        if not terms:
            # Objective identically BOTTOM: any feasible point is optimal.
            system.objective = Objective("max", term=LinTerm.constant(0))
        else:
            system.add_selector("obj_pick", range(len(terms)), {})
            system.objective = Objective(
                "max", selector="obj_pick", guarded={k: t for k, t in enumerate(terms)}
            )
    else:
        raise ValueError(f"bad upper direction {upper!r}")
    apply_boxes(system, kinds)
    return system
