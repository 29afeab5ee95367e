"""Classical-side model: affine terms, constraints, and selector systems.

Tropical subproblems are compiled into systems of linear constraints over
rationals plus finite-domain selector variables.  Each selector models one
disjunction (which term of a tropical max is active); instantiating every
selector yields an ordinary linear program, and many leaves are pure
difference systems.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction


class LinTerm:
    """Affine term: sum of coeff * var plus a rational constant."""

    __slots__ = ("coeffs", "const")

    def __init__(self, coeffs: dict[str, Fraction] | None = None, const=0):
        self.coeffs: dict[str, Fraction] = {}
        if coeffs:
            for v, c in coeffs.items():
                c = Fraction(c)
                if c != 0:
                    self.coeffs[v] = c
        self.const = Fraction(const)

    @staticmethod
    def var(name: str, coeff=1, const=0) -> "LinTerm":
        return LinTerm({name: Fraction(coeff)}, const)

    @staticmethod
    def constant(value) -> "LinTerm":
        return LinTerm({}, value)

    def plus(self, other: "LinTerm") -> "LinTerm":
        coeffs = dict(self.coeffs)
        for v, c in other.coeffs.items():
            coeffs[v] = coeffs.get(v, Fraction(0)) + c
        return LinTerm(coeffs, self.const + other.const)

    def minus(self, other: "LinTerm") -> "LinTerm":
        return self.plus(other.scaled(-1))

    def scaled(self, k) -> "LinTerm":
        k = Fraction(k)
        return LinTerm({v: c * k for v, c in self.coeffs.items()}, self.const * k)

    def shift(self, k) -> "LinTerm":
        return LinTerm(dict(self.coeffs), self.const + Fraction(k))

    def evaluate(self, assignment: dict[str, Fraction]) -> Fraction:
        total = self.const
        for v, c in self.coeffs.items():
            total += c * assignment[v]
        return total

    def variables(self) -> set[str]:
        return set(self.coeffs)

    def __repr__(self) -> str:
        parts = [f"{c}*{v}" for v, c in sorted(self.coeffs.items())]
        if self.const or not parts:
            parts.append(str(self.const))
        return " + ".join(parts)


@dataclass(frozen=True)
class LinConstraint:
    """lhs rel rhs with rel in {"<=", "="}."""

    lhs: LinTerm
    rel: str
    rhs: LinTerm
    label: str = ""

    def __post_init__(self):
        if self.rel not in ("<=", "="):
            raise ValueError(f"unsupported relation {self.rel!r}")

    def normalized(self) -> tuple[dict[str, Fraction], Fraction]:
        """Move everything left: returns (coeffs, const) with coeffs.x + const rel 0."""
        t = self.lhs.minus(self.rhs)
        return t.coeffs, t.const

    def satisfied_by(self, assignment: dict[str, Fraction]) -> bool:
        l = self.lhs.evaluate(assignment)
        r = self.rhs.evaluate(assignment)
        return l <= r if self.rel == "<=" else l == r

    def variables(self) -> set[str]:
        return self.lhs.variables() | self.rhs.variables()

    def __repr__(self) -> str:
        return f"{self.lhs} {self.rel} {self.rhs}"


def leq(lhs: LinTerm, rhs: LinTerm, label: str = "") -> LinConstraint:
    return LinConstraint(lhs, "<=", rhs, label)


def eq(lhs: LinTerm, rhs: LinTerm, label: str = "") -> LinConstraint:
    return LinConstraint(lhs, "=", rhs, label)


@dataclass(frozen=True)
class SelectorVar:
    """Finite-domain choice variable; each value activates one constraint group."""

    name: str
    domain: tuple[int, ...]

    def __post_init__(self):
        if not self.domain:
            raise ValueError(f"selector {self.name} has an empty domain")


@dataclass
class Objective:
    """min or max of a fixed affine term, or of a selector-guarded term.

    For a guarded objective, `guarded` maps each domain value of the named
    selector to the affine term that is optimized when that branch is chosen.
    """

    direction: str
    term: LinTerm | None = None
    selector: str | None = None
    guarded: dict[int, LinTerm] | None = None

    def __post_init__(self):
        if self.direction not in ("min", "max"):
            raise ValueError(f"bad direction {self.direction!r}")
        if (self.term is None) == (self.guarded is None):
            raise ValueError("exactly one of term/guarded must be set")
        if self.guarded is not None and self.selector is None:
            raise ValueError("guarded objective needs its selector name")


@dataclass
class SelectorSystem:
    """Fixed constraints + selector-guarded constraint groups + objective.

    `bounds` is the box registry: every continuous variable must carry finite
    lower and upper bounds derived from the instance data.  `datum_lo` and
    `datum_hi` record the finite data range for big-M sizing; `dim` is the
    ambient dimension of the originating instance.
    """

    constraints: list[LinConstraint] = field(default_factory=list)
    selectors: list[SelectorVar] = field(default_factory=list)
    guarded: dict[tuple[str, int], list[LinConstraint]] = field(default_factory=dict)
    objective: Objective | None = None
    bounds: dict[str, tuple[Fraction, Fraction]] = field(default_factory=dict)
    datum_lo: Fraction = Fraction(0)
    datum_hi: Fraction = Fraction(0)
    dim: int = 1

    def add_selector(self, name: str, domain, groups: dict[int, list[LinConstraint]]):
        sel = SelectorVar(name, tuple(domain))
        self.selectors.append(sel)
        for idx in sel.domain:
            self.guarded[(name, idx)] = list(groups.get(idx, []))
        return sel

    def instantiation_count(self) -> int:
        total = 1
        for s in self.selectors:
            total *= len(s.domain)
        return total

    def variables(self) -> list[str]:
        names: set[str] = set()
        for c in self.constraints:
            names |= c.variables()
        for group in self.guarded.values():
            for c in group:
                names |= c.variables()
        if self.objective is not None:
            if self.objective.term is not None:
                names |= self.objective.term.variables()
            else:
                for t in self.objective.guarded.values():
                    names |= t.variables()
        names |= set(self.bounds)
        return sorted(names)

    def set_box(self, var: str, lo, hi):
        self.bounds[var] = (Fraction(lo), Fraction(hi))
