"""Max-plus (tropical) scalars and vectors with exact rational arithmetic.

The semiring operations are oplus = max and otimes = +, with BOTTOM (minus
infinity) as the additive identity and 0 as the multiplicative identity.
Scalars wrap `fractions.Fraction`; BOTTOM is a tagged value, never a sentinel
number, so no finite datum can collide with it.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator, Union

Rational = Union[int, str, Fraction]


class TropScalar:
    """An exact max-plus scalar: either a rational number or BOTTOM."""

    __slots__ = ("_value",)

    def __init__(self, value: Fraction | None):
        self._value = value

    @property
    def is_bottom(self) -> bool:
        return self._value is None

    @property
    def value(self) -> Fraction:
        """The finite value; raises on BOTTOM."""
        if self._value is None:
            raise ValueError("BOTTOM has no finite value")
        return self._value

    def oplus(self, other: "TropScalar") -> "TropScalar":
        """Tropical addition: max, with BOTTOM neutral."""
        if self._value is None:
            return other
        if other._value is None:
            return self
        return TropScalar(max(self._value, other._value))

    def otimes(self, other: "TropScalar") -> "TropScalar":
        """Tropical multiplication: +, with BOTTOM absorbing."""
        if self._value is None or other._value is None:
            return BOTTOM
        return TropScalar(self._value + other._value)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TropScalar):
            return NotImplemented
        return self._value == other._value

    def __hash__(self) -> int:
        return hash(self._value)

    # Total order with BOTTOM below every finite scalar.
    def __lt__(self, other: "TropScalar") -> bool:
        if self._value is None:
            return other._value is not None
        if other._value is None:
            return False
        return self._value < other._value

    def __le__(self, other: "TropScalar") -> bool:
        return self == other or self < other

    def __gt__(self, other: "TropScalar") -> bool:
        return other < self

    def __ge__(self, other: "TropScalar") -> bool:
        return other <= self

    def __repr__(self) -> str:
        return "BOTTOM" if self._value is None else f"trop({self._value})"

    def __str__(self) -> str:
        return "-inf" if self._value is None else str(self._value)


BOTTOM = TropScalar(None)
TROP_ZERO = TropScalar(Fraction(0))


def trop(value: Rational | TropScalar | None) -> TropScalar:
    """Build a TropScalar from an int, Fraction, decimal string, or "-inf"."""
    if isinstance(value, TropScalar):
        return value
    if value is None:
        return BOTTOM
    if isinstance(value, str):
        if value.strip() in ("-inf", "-infinity", "bottom"):
            return BOTTOM
        return TropScalar(Fraction(value))
    if isinstance(value, float):
        raise TypeError("floats are not exact; pass a string, int, or Fraction")
    return TropScalar(Fraction(value))


def format_scalar(s: TropScalar) -> str:
    """Canonical string form: "-inf" or an exact fraction such as "-1/10"."""
    return str(s)


def format_vector(v: "TropVector") -> str:
    return "(" + ", ".join(format_scalar(e) for e in v) + ")"


class TropVector:
    """An immutable vector of TropScalars."""

    __slots__ = ("_entries",)

    def __init__(self, entries: Iterable[TropScalar | Rational | None]):
        self._entries = tuple(trop(e) for e in entries)
        if not self._entries:
            raise ValueError("empty vector")

    @property
    def dim(self) -> int:
        return len(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self) -> Iterator[TropScalar]:
        return iter(self._entries)

    def __getitem__(self, i: int) -> TropScalar:
        return self._entries[i]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TropVector):
            return NotImplemented
        return self._entries == other._entries

    def __hash__(self) -> int:
        return hash(self._entries)

    def __repr__(self) -> str:
        return "tvec(%s)" % ", ".join(str(e) for e in self._entries)

    def is_finite(self) -> bool:
        return all(not e.is_bottom for e in self._entries)

    def key(self) -> tuple:
        """Sort key: lexicographic with BOTTOM first."""
        return tuple((0, Fraction(0)) if e.is_bottom else (1, e.value) for e in self._entries)


def tvec(*entries: TropScalar | Rational | None) -> TropVector:
    return TropVector(entries)


def tdot(x: TropVector, y: TropVector) -> TropScalar:
    """Tropical scalar product max_i (x_i + y_i)."""
    if x.dim != y.dim:
        raise ValueError(f"dimension mismatch: {x.dim} vs {y.dim}")
    acc = BOTTOM
    for xi, yi in zip(x, y):
        acc = acc.oplus(xi.otimes(yi))
    return acc


def tcomb(generators: list[TropVector], coeffs: list[TropScalar]) -> TropVector:
    """Tropical combination oplus_i (coeffs_i otimes generators_i).

    The coefficients must form a tropical convex combination: max coeff = 0.
    """
    if len(generators) != len(coeffs):
        raise ValueError("coefficient count does not match generator count")
    if not generators:
        raise ValueError("no generators")
    top = BOTTOM
    for c in coeffs:
        top = top.oplus(c)
    if top != TROP_ZERO:
        raise ValueError(f"coefficients must have tropical sum 0, got {top}")
    dim = generators[0].dim
    out = []
    for j in range(dim):
        acc = BOTTOM
        for g, c in zip(generators, coeffs):
            if g.dim != dim:
                raise ValueError("generators have mixed dimensions")
            acc = acc.oplus(c.otimes(g[j]))
        out.append(acc)
    return TropVector(out)


def dominates(x: TropVector, y: TropVector) -> bool:
    """Componentwise x >= y (BOTTOM below everything)."""
    if x.dim != y.dim:
        raise ValueError(f"dimension mismatch: {x.dim} vs {y.dim}")
    return all(xi >= yi for xi, yi in zip(x, y))


def vector_max(vectors: list[TropVector]) -> TropVector:
    """Componentwise tropical sum (max) of a nonempty list of vectors."""
    if not vectors:
        raise ValueError("no vectors")
    dim = vectors[0].dim
    out = []
    for j in range(dim):
        acc = BOTTOM
        for v in vectors:
            if v.dim != dim:
                raise ValueError("vectors have mixed dimensions")
            acc = acc.oplus(v[j])
        out.append(acc)
    return TropVector(out)
