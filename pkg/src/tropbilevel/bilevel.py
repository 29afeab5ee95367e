"""The four bilevel solvers over tropical polytopes.

An instance asks to optimize f(x, y) = a^T x oplus b^T y over x in TP1 and
y in TP2, where y must itself be optimal for the inner product x^T y over
TP2.  The variant tag "<upper>-<lower>" fixes the two directions.  Solvers:

- iterative-cuts (lower min): solve a relaxation, check lower-level
  optimality, and cut with the current argmin point until the check passes.
- minimal-point-enumeration (min-min): scan candidate argmin points.
- partition-decomposition (lower max): split by which coordinates attain
  x^T y^max; each piece decouples into an x-side and a y-side problem.
- greatest-point (max-max): closed form at the componentwise maxima.

Step subproblems compile to selector systems and run through
enumerate_solve; the reductions used by the production steps are
value-equivalent to the literal joint systems, which remain available behind
a validation flag on the iterative solver.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import gcd

from .encode import (
    apply_boxes,
    build_step_system,
    coord_name,
    encode_epigraph_min,
    encode_membership,
    encode_tropical_leq,
    lam_name,
    note_datum,
    require_finite,
)
from .enumeration import enumerate_solve
from .errors import SolverInconsistencyError, UnsupportedInstanceError
from .linear import LinTerm, Objective, SelectorSystem, eq, leq
from .polytope import (
    TropHalfspace,
    TropPolytopeV,
    contains,
    greatest_point,
    minimal_points,
    phi_and_argmin,
    project_below,
)
from .semiring import (
    BOTTOM,
    TropScalar,
    TropVector,
    format_scalar,
    format_vector,
    tdot,
)

VARIANTS = ("min-min", "min-max", "max-min", "max-max")

ALGORITHMS = ("auto", "iterative", "enumerate", "decompose", "closed-form")

# Solvers run their own subproblems with a wider budget than the public
# enumeration default; the worked 2-D systems exceed 10^6 raw instantiations
# while the pruned search stays tiny.
SOLVER_BUDGET = 10**8

_AUTO_ALGORITHM = {
    "min-min": "enumerate",
    "max-min": "iterative",
    "min-max": "decompose",
    "max-max": "closed-form",
}

_COMPATIBLE = {
    "iterative": ("min-min", "max-min"),
    "enumerate": ("min-min",),
    "decompose": ("min-max", "max-max"),
    "closed-form": ("max-max",),
}


@dataclass(frozen=True)
class BilevelInstance:
    """TP1, TP2, objective vectors, and the variant tag."""

    tp1: TropPolytopeV
    tp2: TropPolytopeV
    a: TropVector
    b: TropVector
    variant: str

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        n = self.tp1.dim
        if not (self.tp2.dim == n and self.a.dim == n and self.b.dim == n):
            raise ValueError("instance blocks have mixed dimensions")

    @property
    def dim(self) -> int:
        return self.tp1.dim

    @property
    def upper(self) -> str:
        return self.variant.split("-")[0]

    @property
    def lower(self) -> str:
        return self.variant.split("-")[1]


@dataclass(frozen=True)
class BilevelSolution:
    """Optimal pair with its value, solving method, and certificate.

    The certificate is JSON-ready (strings and lists only): an iteration
    trace with the cut set, the enumerated candidate table, the closed-form
    witness note, or the partition piece table.
    """

    x: TropVector
    y: TropVector
    value: TropScalar
    method: str
    certificate: dict


@dataclass(frozen=True)
class PartitionPiece:
    """One piece of the decomposition by attaining coordinates of x^T y^max.

    Index sets are 1-based to match the printed form.  The halfspace lists
    describe only the piece constraints (closed relaxation); intersect with
    the polytopes for the actual piece sets.
    """

    I: tuple[int, ...]
    J: tuple[int, ...]
    xstar: TropVector
    ymax: TropVector
    total: Fraction
    x_halfspaces: tuple[TropHalfspace, ...]
    y_halfspaces: tuple[TropHalfspace, ...]

    def covers_x(self, x: TropVector) -> bool:
        return all(h.satisfied_by(x) for h in self.x_halfspaces)

    def covers_y(self, y: TropVector) -> bool:
        return all(h.satisfied_by(y) for h in self.y_halfspaces)


def objective_value(inst: BilevelInstance, x: TropVector, y: TropVector) -> TropScalar:
    """f(x, y) = a^T x oplus b^T y."""
    return tdot(inst.a, x).oplus(tdot(inst.b, y))


def check_lower_optimality(inst: BilevelInstance, x: TropVector, y: TropVector) -> bool:
    """Exact lower-level optimality of y at x for the variant's direction."""
    if not contains(inst.tp1, x)[0]:
        raise ValueError("x is not in TP1")
    if not contains(inst.tp2, y)[0]:
        raise ValueError("y is not in TP2")
    if inst.lower == "min":
        phi, _ = phi_and_argmin(inst.tp2, x)
        return tdot(x, y) == phi
    return tdot(x, y) == tdot(x, greatest_point(inst.tp2))


def x_star(ymax: TropVector) -> TropVector:
    """Vector of sums over all but one coordinate of a finite ymax."""
    vals = []
    for k, c in enumerate(ymax):
        if c.is_bottom:
            raise UnsupportedInstanceError(
                f"decomposition needs a finite greatest point; coordinate {k + 1} is -inf"
            )
        vals.append(c.value)
    total = sum(vals, Fraction(0))
    return TropVector([total - v for v in vals])


# ---------------------------------------------------------------------------
# Shared solver plumbing


def _coords_vector(assignment: dict[str, Fraction], prefix: str, n: int) -> TropVector:
    return TropVector([assignment[coord_name(prefix, j)] for j in range(n)])


def _membership_kinds(kinds: dict[str, str], coords: list[str], prefix: str, m: int) -> None:
    for name in coords:
        kinds[name] = "coord"
    for i in range(m):
        kinds[lam_name(prefix, i)] = "lam"


class _Best:
    """Reduction by objective value, then lexicographically smallest (x, y)."""

    def __init__(self, direction: str):
        self.direction = direction
        self.value: TropScalar | None = None
        self.x: TropVector | None = None
        self.y: TropVector | None = None
        self.extra = None

    def offer(self, value: TropScalar, x: TropVector, y: TropVector, extra=None) -> bool:
        if self.value is None:
            take = True
        elif value != self.value:
            take = value < self.value if self.direction == "min" else value > self.value
        else:
            take = (x.key(), y.key()) < (self.x.key(), self.y.key())
        if take:
            self.value, self.x, self.y, self.extra = value, x, y, extra
        return take


def _finite_terms(vec: TropVector, coords: list[str]) -> list[LinTerm]:
    return [
        LinTerm.var(coords[j], const=c.value) for j, c in enumerate(vec) if not c.is_bottom
    ]


def _set_upper_objective(
    system: SelectorSystem, kinds: dict[str, str], upper: str, terms: list[LinTerm]
) -> None:
    """Objective for one decoupled block: epigraph for min, attained term for max."""
    for t in terms:
        note_datum(system, t.const)
    if upper == "min":
        encode_epigraph_min(system, "obj_t", terms)
        kinds["obj_t"] = "sum"
    elif not terms:
        # Objective identically -inf on this block: any feasible point ties.
        system.objective = Objective("max", term=LinTerm.constant(0))
    else:
        system.add_selector("obj_pick", range(len(terms)), {})
        system.objective = Objective(
            "max", selector="obj_pick", guarded=dict(enumerate(terms))
        )


# ---------------------------------------------------------------------------
# Iterative cut generation (lower level minimizes) and candidate enumeration


def _argmin_candidate_system(
    tp1: TropPolytopeV,
    a: TropVector,
    b_value: TropScalar,
    y_prime: TropVector,
    cut_points: list[TropVector],
) -> SelectorSystem:
    """min a^T x (+ the constant b^T y') over x in TP1 with x^T y' <= x^T z rows."""
    system = SelectorSystem(dim=tp1.dim)
    kinds: dict[str, str] = {}
    coords = encode_membership(system, tp1, "x")
    _membership_kinds(kinds, coords, "x", len(tp1.generators))
    yv = require_finite(y_prime, "candidate point")
    for k, z in enumerate(cut_points):
        if z == y_prime:
            continue  # x^T y' <= x^T y' holds trivially
        zv = require_finite(z, "cut point")
        lhs = [LinTerm.var(coords[j], const=yv[j]) for j in range(len(coords))]
        rhs = [LinTerm.var(coords[j], const=zv[j]) for j in range(len(coords))]
        encode_tropical_leq(system, lhs, rhs, f"cut_{k + 1}")
    terms = _finite_terms(a, coords)
    if not b_value.is_bottom:
        terms.append(LinTerm.constant(b_value.value))
    for t in terms:
        note_datum(system, t.const)
    encode_epigraph_min(system, "obj_t", terms)
    kinds["obj_t"] = "sum"
    apply_boxes(system, kinds)
    return system


def _min_min_step(
    inst: BilevelInstance, cuts: list[TropVector], budget: int
) -> tuple[TropScalar, TropVector, TropVector] | None:
    """One cut-generation step with the upper level minimizing.

    The inner point can be restricted to minimal points of TP2: replacing a
    feasible y by a minimal point below it keeps every cut satisfied and
    cannot increase f.  Each candidate system has pure difference leaves.
    """
    best = _Best("min")
    for y_prime in minimal_points(inst.tp2):
        system = _argmin_candidate_system(
            inst.tp1, inst.a, tdot(inst.b, y_prime), y_prime, cuts
        )
        res = enumerate_solve(system, budget)
        if res.status != "optimal":
            continue
        x = _coords_vector(res.assignment, "x", inst.dim)
        best.offer(objective_value(inst, x, y_prime), x, y_prime)
    if best.value is None:
        return None
    return best.value, best.x, best.y


def _grid_scale(tp1: TropPolytopeV, tp2: TropPolytopeV) -> int:
    """Denominator grid for the parametric feasibility search.

    A critically binding simple cycle in the x-space difference graph pins
    the parameter to (sum of data constants) / r with r at most the node
    count, so optima lie on multiples of 1 / (data lcm * lcm(1..nodes)).
    """
    denom = 1
    for poly in (tp1, tp2):
        for g in poly.generators:
            for c in g:
                if not c.is_bottom:
                    denom = denom * c.value.denominator // gcd(denom, c.value.denominator)
    nodes = tp1.dim + len(tp1.generators) + 1
    scale = denom
    for k in range(2, nodes + 1):
        scale = scale * k // gcd(scale, k)
    return scale


def _branch_feasibility_witness(
    tp1: TropPolytopeV,
    gen: TropVector,
    w: Fraction,
    cuts: list[TropVector],
    budget: int,
) -> TropVector | None:
    """Some x in TP1 with x^T gen + w <= x^T z for every cut z, if any."""
    system = SelectorSystem(dim=tp1.dim)
    kinds: dict[str, str] = {}
    coords = encode_membership(system, tp1, "x")
    _membership_kinds(kinds, coords, "x", len(tp1.generators))
    gv = require_finite(gen, "generator")
    for k, z in enumerate(cuts):
        zv = require_finite(z, "cut point")
        lhs = [LinTerm.var(coords[j], const=gv[j] + w) for j in range(len(coords))]
        rhs = [LinTerm.var(coords[j], const=zv[j]) for j in range(len(coords))]
        encode_tropical_leq(system, lhs, rhs, f"cut_{k + 1}")
    system.objective = Objective("min", term=LinTerm.constant(0))
    apply_boxes(system, kinds)
    res = enumerate_solve(system, budget)
    if res.status != "optimal":
        return None
    return _coords_vector(res.assignment, "x", tp1.dim)


def _slack_floor(tp1: TropPolytopeV, gen: TropVector, cuts: list[TropVector]) -> Fraction:
    """max over TP1 generators g of min_z (g^T z - g^T gen); feasible by construction."""
    best = None
    for g in tp1.generators:
        d = min(tdot(g, z).value - tdot(g, gen).value for z in cuts)
        if best is None or d > best:
            best = d
    return best


def _branch_argmax_x(
    tp1: TropPolytopeV,
    gen: TropVector,
    cuts: list[TropVector],
    scale: int,
    budget: int,
) -> TropVector:
    """x in TP1 maximizing the cut slack min_z (x^T z - x^T gen), capped at 0.

    Feasibility of "slack >= w" is downward monotone in w and the maximum
    lies on the 1/scale grid, so binary search over integers is exact.  The
    returned witness attains the capped maximum.
    """
    x0 = _branch_feasibility_witness(tp1, gen, Fraction(0), cuts, budget)
    if x0 is not None:
        return x0
    floor = _slack_floor(tp1, gen, cuts)
    lo = floor * scale
    if lo.denominator != 1:
        raise SolverInconsistencyError("search floor fell off the denominator grid")
    lo = int(lo)
    hi = 0  # infeasible: the w = 0 probe failed
    best_x = _branch_feasibility_witness(tp1, gen, Fraction(lo, scale), cuts, budget)
    if best_x is None:
        raise SolverInconsistencyError("generator slack floor was not feasible")
    while hi - lo > 1:
        mid = (lo + hi) // 2
        x = _branch_feasibility_witness(tp1, gen, Fraction(mid, scale), cuts, budget)
        if x is not None:
            lo, best_x = mid, x
        else:
            hi = mid
    return best_x


def _greatest_feasible_y(
    inst: BilevelInstance, x: TropVector, cuts: list[TropVector]
) -> TropVector:
    """Greatest y in TP2 satisfying every cut at x; exists for every x in TP1."""
    if not cuts:
        return greatest_point(inst.tp2)
    bound = min(tdot(x, z).value for z in cuts)
    ub = TropVector([bound - xj.value for xj in x])
    y = project_below(inst.tp2, ub)
    if y is None:
        raise SolverInconsistencyError("no feasible inner point under the cut bound")
    return y


def _max_min_step(
    inst: BilevelInstance, cuts: list[TropVector], budget: int
) -> tuple[TropScalar, TropVector, TropVector]:
    """One cut-generation step with the upper level maximizing.

    The cuts never restrict x (the argmin point at any x satisfies them all),
    and at a fixed x the best inner point is the residuated projection under
    the cut bound.  Every objective term is then maximized either at the
    greatest point of TP1 or, for y-terms, at an x maximizing one generator's
    cut slack; evaluating f at those candidate pairs is exact.
    """
    best = _Best("max")

    def consider(x: TropVector) -> None:
        y = _greatest_feasible_y(inst, x, cuts)
        best.offer(objective_value(inst, x, y), x, y)

    consider(greatest_point(inst.tp1))
    if cuts and any(not c.is_bottom for c in inst.b):
        scale = _grid_scale(inst.tp1, inst.tp2)
        for gen in inst.tp2.generators:
            # This generator's y-terms are capped by b^T gen; strictly below
            # the value already attained they cannot affect the step maximum.
            if tdot(inst.b, gen) < best.value:
                continue
            consider(_branch_argmax_x(inst.tp1, gen, cuts, scale, budget))
    return best.value, best.x, best.y


def _validate_against_joint(
    inst: BilevelInstance, cuts: list[TropVector], value: TropScalar, budget: int
) -> None:
    """Cross-check a production step value against the literal joint system."""
    if value.is_bottom:
        return  # no finite objective terms; the literal system pins 0
    joint = build_step_system(inst.tp1, inst.tp2, inst.a, inst.b, list(cuts), inst.upper)
    res = enumerate_solve(joint, budget)
    if res.status != "optimal" or res.value != value.value:
        got = res.value if res.status == "optimal" else res.status
        raise SolverInconsistencyError(
            f"joint step system disagrees: reduced {value}, literal {got}"
        )


def solve_iterative(
    inst: BilevelInstance,
    budget: int = SOLVER_BUDGET,
    validate_with_joint: bool = False,
) -> BilevelSolution:
    """Cut generation for the lower-min variants.

    Solve the step problem under the current cut set; if the witness is
    lower-level optimal, stop, otherwise add the argmin point at the current
    x as a new cut.  Each cut is a fresh minimal point, so at most
    |minimal_points(tp2)| + 1 steps run.
    """
    if inst.variant not in _COMPATIBLE["iterative"]:
        raise UnsupportedInstanceError(
            f"iterative cut generation needs a lower-min variant, not {inst.variant}"
        )
    for g in inst.tp1.generators + inst.tp2.generators:
        require_finite(g, "generator")
    bound = len(minimal_points(inst.tp2)) + 1
    cuts: list[TropVector] = []
    trace = []
    for step in range(bound):
        if inst.upper == "min":
            outcome = _min_min_step(inst, cuts, budget)
            if outcome is None:
                raise SolverInconsistencyError("every step candidate was infeasible")
        else:
            outcome = _max_min_step(inst, cuts, budget)
        value, x, y = outcome
        if validate_with_joint:
            _validate_against_joint(inst, cuts, value, budget)
        trace.append(
            {
                "step": step,
                "value": format_scalar(value),
                "x": format_vector(x),
                "y": format_vector(y),
            }
        )
        if check_lower_optimality(inst, x, y):
            certificate = {
                "iterations": step + 1,
                "cuts": [format_vector(z) for z in cuts],
                "trace": trace,
            }
            return BilevelSolution(x, y, value, "iterative-cuts", certificate)
        z = phi_and_argmin(inst.tp2, x)[1]
        if z in cuts:
            raise SolverInconsistencyError("cut point repeated before termination")
        cuts.append(z)
    raise SolverInconsistencyError("iteration bound exceeded")


def solve_enumerate(inst: BilevelInstance, budget: int = SOLVER_BUDGET) -> BilevelSolution:
    """Minimal-point enumeration for min-min.

    Each minimal point y' of TP2 is tried as the inner optimum: minimize
    over x in TP1 subject to x^T y' <= x^T z for every minimal point z,
    which makes y' an argmin at x.  The best candidate wins.
    """
    if inst.variant not in _COMPATIBLE["enumerate"]:
        raise UnsupportedInstanceError(
            f"minimal-point enumeration is specific to min-min, not {inst.variant}"
        )
    points = minimal_points(inst.tp2)
    best = _Best("min")
    table = []
    for y_prime in points:
        system = _argmin_candidate_system(
            inst.tp1, inst.a, tdot(inst.b, y_prime), y_prime, points
        )
        res = enumerate_solve(system, budget)
        entry = {"y": format_vector(y_prime), "status": res.status}
        if res.status == "optimal":
            x = _coords_vector(res.assignment, "x", inst.dim)
            value = objective_value(inst, x, y_prime)
            entry["value"] = format_scalar(value)
            entry["x"] = format_vector(x)
            best.offer(value, x, y_prime)
        table.append(entry)
    if best.value is None:
        raise SolverInconsistencyError("no minimal point admits an argmin region")
    certificate = {"candidates": table, "selected": format_vector(best.y)}
    return BilevelSolution(
        best.x, best.y, best.value, "minimal-point-enumeration", certificate
    )


# ---------------------------------------------------------------------------
# Partition decomposition (lower level maximizes) and the max-max closed form


def partition_piece(inst: BilevelInstance, I, J) -> PartitionPiece:
    """Piece of the decomposition for attaining set I (1-based indices).

    x-side (closed relaxation): x_j - x*_j <= x_i - x*_i for i in I, j in J,
    with equal shifts across I.  y-side: max over I of (x*_i + y_i) equals
    the total sum of ymax.
    """
    n = inst.dim
    iset = tuple(sorted(set(int(i) for i in I)))
    jset = tuple(sorted(set(int(j) for j in J)))
    if not iset:
        raise ValueError("the attaining set I must be nonempty (empty piece)")
    if set(iset) & set(jset):
        raise ValueError("I and J overlap")
    if set(iset) | set(jset) != set(range(1, n + 1)):
        raise ValueError(f"I and J must partition 1..{n}")
    ymax = greatest_point(inst.tp2)
    xs = x_star(ymax)
    xs_vals = [c.value for c in xs]
    total = sum((c.value for c in ymax), Fraction(0))

    def unit(idx: int, value: Fraction) -> TropVector:
        return TropVector([value if k == idx else BOTTOM for k in range(n)])

    x_rows = []
    for i in iset:
        for j in jset:
            # x_j - x*_j <= x_i - x*_i
            x_rows.append(
                TropHalfspace(unit(j - 1, -xs_vals[j - 1]), unit(i - 1, -xs_vals[i - 1]))
            )
    for i, k in zip(iset, iset[1:]):
        x_rows.append(
            TropHalfspace(unit(i - 1, -xs_vals[i - 1]), unit(k - 1, -xs_vals[k - 1]))
        )
        x_rows.append(
            TropHalfspace(unit(k - 1, -xs_vals[k - 1]), unit(i - 1, -xs_vals[i - 1]))
        )
    side = TropVector(
        [xs_vals[k] if (k + 1) in iset else BOTTOM for k in range(n)]
    )
    bottom = TropVector([BOTTOM] * n)
    y_rows = (
        TropHalfspace(side, bottom, beta=TropScalar(total)),
        TropHalfspace(bottom, side, alpha=TropScalar(total)),
    )
    return PartitionPiece(
        iset, jset, xs, ymax, total, tuple(x_rows), y_rows
    )


def _piece_side_x(
    inst: BilevelInstance, piece: PartitionPiece, budget: int
) -> tuple[TropVector, TropScalar] | None:
    system = SelectorSystem(dim=inst.dim)
    kinds: dict[str, str] = {}
    coords = encode_membership(system, inst.tp1, "x")
    _membership_kinds(kinds, coords, "x", len(inst.tp1.generators))
    xs = [c.value for c in piece.xstar]
    for i in piece.I:
        for j in piece.J:
            shift = xs[j - 1] - xs[i - 1]
            note_datum(system, shift)
            system.constraints.append(
                leq(
                    LinTerm.var(coords[j - 1]),
                    LinTerm.var(coords[i - 1], const=shift),
                    f"piece_x_{j}_{i}",
                )
            )
    for i, k in zip(piece.I, piece.I[1:]):
        shift = xs[i - 1] - xs[k - 1]
        note_datum(system, shift)
        system.constraints.append(
            eq(
                LinTerm.var(coords[i - 1]),
                LinTerm.var(coords[k - 1], const=shift),
                f"piece_x_eq_{i}_{k}",
            )
        )
    _set_upper_objective(system, kinds, inst.upper, _finite_terms(inst.a, coords))
    apply_boxes(system, kinds)
    res = enumerate_solve(system, budget)
    if res.status != "optimal":
        return None
    x = _coords_vector(res.assignment, "x", inst.dim)
    return x, tdot(inst.a, x)


def _piece_side_y(
    inst: BilevelInstance, piece: PartitionPiece, budget: int
) -> tuple[TropVector, TropScalar] | None:
    system = SelectorSystem(dim=inst.dim)
    kinds: dict[str, str] = {}
    coords = encode_membership(system, inst.tp2, "y")
    _membership_kinds(kinds, coords, "y", len(inst.tp2.generators))
    xs = [c.value for c in piece.xstar]
    attain = [LinTerm.var(coords[i - 1], const=xs[i - 1]) for i in piece.I]
    level = [LinTerm.constant(piece.total)]
    encode_tropical_leq(system, attain, level, "piece_ub")
    encode_tropical_leq(system, level, attain, "piece_lb")
    _set_upper_objective(system, kinds, inst.upper, _finite_terms(inst.b, coords))
    apply_boxes(system, kinds)
    res = enumerate_solve(system, budget)
    if res.status != "optimal":
        return None
    y = _coords_vector(res.assignment, "y", inst.dim)
    return y, tdot(inst.b, y)


def build_piece_system(inst: BilevelInstance, piece: PartitionPiece) -> SelectorSystem:
    """Joint encoding of one partition piece, for export.

    Both memberships, the x-side region rows, the y-side attainment rows, and
    the upper objective over every finite term.  The solver works the two
    sides separately (they share no variables); this combined form is what
    the MILP exporter writes and its optimum equals the piece value.
    """
    system = SelectorSystem(dim=inst.dim)
    kinds: dict[str, str] = {}
    cx = encode_membership(system, inst.tp1, "x")
    _membership_kinds(kinds, cx, "x", len(inst.tp1.generators))
    cy = encode_membership(system, inst.tp2, "y")
    _membership_kinds(kinds, cy, "y", len(inst.tp2.generators))
    xs = [c.value for c in piece.xstar]
    for i in piece.I:
        for j in piece.J:
            shift = xs[j - 1] - xs[i - 1]
            note_datum(system, shift)
            system.constraints.append(
                leq(
                    LinTerm.var(cx[j - 1]),
                    LinTerm.var(cx[i - 1], const=shift),
                    f"piece_x_{j}_{i}",
                )
            )
    for i, k in zip(piece.I, piece.I[1:]):
        shift = xs[i - 1] - xs[k - 1]
        note_datum(system, shift)
        system.constraints.append(
            eq(
                LinTerm.var(cx[i - 1]),
                LinTerm.var(cx[k - 1], const=shift),
                f"piece_x_eq_{i}_{k}",
            )
        )
    attain = [LinTerm.var(cy[i - 1], const=xs[i - 1]) for i in piece.I]
    level = [LinTerm.constant(piece.total)]
    encode_tropical_leq(system, attain, level, "piece_ub")
    encode_tropical_leq(system, level, attain, "piece_lb")
    _set_upper_objective(
        system, kinds, inst.upper, _finite_terms(inst.a, cx) + _finite_terms(inst.b, cy)
    )
    apply_boxes(system, kinds)
    return system


def solve_minmax(inst: BilevelInstance, budget: int = SOLVER_BUDGET) -> BilevelSolution:
    """Partition decomposition for the lower-max variants.

    For each nonempty attaining set I, the piece constraints reference only
    one block each, so the piece splits into an x-side and a y-side problem
    whose values combine by oplus.  Pieces are scanned by (size, lex) and
    reduced by (value, x, y); every accepted candidate is checked against
    the lower-level equality x^T y = x^T ymax.
    """
    if inst.variant not in _COMPATIBLE["decompose"]:
        raise UnsupportedInstanceError(
            f"partition decomposition needs a lower-max variant, not {inst.variant}"
        )
    ymax = greatest_point(inst.tp2)
    x_star(ymax)  # reject BOTTOM coordinates up front
    n = inst.dim
    best = _Best(inst.upper)
    table = []
    for size in range(1, n + 1):
        for iset in combinations(range(1, n + 1), size):
            jset = tuple(k for k in range(1, n + 1) if k not in iset)
            piece = partition_piece(inst, iset, jset)
            entry = {"I": list(iset)}
            xres = _piece_side_x(inst, piece, budget)
            yres = _piece_side_y(inst, piece, budget)
            if xres is None or yres is None:
                entry["feasible"] = False
                table.append(entry)
                continue
            x, a_val = xres
            y, b_val = yres
            if tdot(x, y) != tdot(x, ymax):
                raise SolverInconsistencyError(
                    f"piece {list(iset)} witness violates the lower-level equality"
                )
            value = a_val.oplus(b_val)
            entry.update(
                {
                    "feasible": True,
                    "value": format_scalar(value),
                    "x": format_vector(x),
                    "y": format_vector(y),
                }
            )
            table.append(entry)
            best.offer(value, x, y, extra=iset)
    if best.value is None:
        raise SolverInconsistencyError("no partition piece was feasible")
    certificate = {
        "ymax": format_vector(ymax),
        "xstar": format_vector(x_star(ymax)),
        "total": str(sum((c.value for c in ymax), Fraction(0))),
        "pieces": table,
        "selected": list(best.extra),
    }
    return BilevelSolution(
        best.x, best.y, best.value, "partition-decomposition", certificate
    )


def solve_maxmax(inst: BilevelInstance) -> BilevelSolution:
    """Closed form for max-max: both greatest points, by isotonicity of f."""
    if inst.variant != "max-max":
        raise UnsupportedInstanceError(
            f"the closed form applies to max-max only, not {inst.variant}"
        )
    x = greatest_point(inst.tp1)
    y = greatest_point(inst.tp2)
    value = objective_value(inst, x, y)
    certificate = {
        "witness": "componentwise greatest points of TP1 and TP2",
        "xmax": format_vector(x),
        "ymax": format_vector(y),
    }
    return BilevelSolution(x, y, value, "greatest-point", certificate)


def solve(
    inst: BilevelInstance, algorithm: str = "auto", budget: int = SOLVER_BUDGET
) -> BilevelSolution:
    """Dispatch to a solver; "auto" picks the production algorithm per variant."""
    if algorithm == "auto":
        algorithm = _AUTO_ALGORITHM[inst.variant]
    if algorithm not in _COMPATIBLE:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    if inst.variant not in _COMPATIBLE[algorithm]:
        raise UnsupportedInstanceError(
            f"algorithm {algorithm!r} does not apply to variant {inst.variant}"
        )
    if algorithm == "iterative":
        return solve_iterative(inst, budget=budget)
    if algorithm == "enumerate":
        return solve_enumerate(inst, budget=budget)
    if algorithm == "decompose":
        return solve_minmax(inst, budget=budget)
    return solve_maxmax(inst)
