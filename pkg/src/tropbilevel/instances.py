"""Instance files: a small JSON schema with exact decimal-string coordinates.

Coordinates are strings ("3", "-1.5", "2/3") or "-inf"; binary floats are
rejected so fixtures stay bit-stable across platforms.  Loading reports JSON
syntax errors with line and column, schema problems with a field path.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .bilevel import VARIANTS, BilevelInstance
from .polytope import TropPolytopeV
from .semiring import BOTTOM, TropScalar, TropVector, trop

BOTTOM_TOKEN = "-inf"


def parse_scalar(raw, where: str) -> TropScalar:
    """One coordinate from JSON: decimal/rational string, int, or "-inf"."""
    if isinstance(raw, str):
        if raw.strip() == BOTTOM_TOKEN:
            return BOTTOM
        try:
            return trop(Fraction(raw))
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"{where}: cannot parse coordinate {raw!r}")
    if isinstance(raw, bool):
        raise ValueError(f"{where}: coordinate must be a string, got {raw!r}")
    if isinstance(raw, int):
        return trop(raw)
    if isinstance(raw, float):
        raise ValueError(
            f"{where}: float coordinates are not allowed, write {raw!r} as a decimal string"
        )
    raise ValueError(f"{where}: coordinate must be a string, got {type(raw).__name__}")


def scalar_to_json(v: TropScalar) -> str:
    return BOTTOM_TOKEN if v.is_bottom else str(v.value)


def parse_vector(raw, dim: int, where: str) -> TropVector:
    if not isinstance(raw, list):
        raise ValueError(f"{where}: expected a list of coordinates")
    if len(raw) != dim:
        raise ValueError(f"{where}: expected {dim} coordinates, got {len(raw)}")
    return TropVector(
        [parse_scalar(c, f"{where}[{i}]") for i, c in enumerate(raw)]
    )


def vector_to_json(v: TropVector) -> list[str]:
    return [scalar_to_json(c) for c in v]


def parse_cli_vector(text: str, dim: int, where: str) -> TropVector:
    """Comma-separated coordinates as given on the command line."""
    parts = [p.strip() for p in text.split(",")]
    return parse_vector(parts, dim, where)


def _polytope_from_json(raw, dim: int, where: str) -> TropPolytopeV:
    if not isinstance(raw, dict) or "generators" not in raw:
        raise ValueError(f'{where}: expected an object with a "generators" list')
    gens = raw["generators"]
    if not isinstance(gens, list) or not gens:
        raise ValueError(f"{where}.generators: expected a nonempty list")
    return TropPolytopeV(
        [parse_vector(g, dim, f"{where}.generators[{i}]") for i, g in enumerate(gens)]
    )


def instance_from_dict(doc) -> BilevelInstance:
    if not isinstance(doc, dict):
        raise ValueError("instance file must be a JSON object")
    missing = [k for k in ("dim", "tp1", "tp2", "a", "b", "variant") if k not in doc]
    if missing:
        raise ValueError(f"missing keys: {', '.join(missing)}")
    dim = doc["dim"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise ValueError(f'"dim" must be a positive integer, got {dim!r}')
    variant = doc["variant"]
    if variant not in VARIANTS:
        raise ValueError(
            f'"variant" must be one of {", ".join(VARIANTS)}, got {variant!r}'
        )
    return BilevelInstance(
        tp1=_polytope_from_json(doc["tp1"], dim, "tp1"),
        tp2=_polytope_from_json(doc["tp2"], dim, "tp2"),
        a=parse_vector(doc["a"], dim, "a"),
        b=parse_vector(doc["b"], dim, "b"),
        variant=variant,
    )


def instance_to_dict(inst: BilevelInstance) -> dict:
    return {
        "dim": inst.dim,
        "tp1": {"generators": [vector_to_json(g) for g in inst.tp1.generators]},
        "tp2": {"generators": [vector_to_json(g) for g in inst.tp2.generators]},
        "a": vector_to_json(inst.a),
        "b": vector_to_json(inst.b),
        "variant": inst.variant,
    }


def loads_instance(text: str) -> BilevelInstance:
    """Parse an instance document; JSONDecodeError carries line/column."""
    return instance_from_dict(json.loads(text))


def load_instance(path: str) -> BilevelInstance:
    with open(path, "r", encoding="utf-8") as fh:
        return loads_instance(fh.read())


def dumps_instance(inst: BilevelInstance) -> str:
    return json.dumps(instance_to_dict(inst), indent=2) + "\n"


def save_instance(inst: BilevelInstance, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_instance(inst))
