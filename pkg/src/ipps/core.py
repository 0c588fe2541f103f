"""Data model shared by the constructors and verifiers.

Points are positive integers ``1..n``.  Systems whose ground set is a product
``[L] x [V]`` keep that structure as metadata; a pair ``(i, v)`` is stored as
the flat point ``(i - 1) * V + v`` so every verifier runs on one code path.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Iterable, NamedTuple, Sequence


class ValidationError(ValueError):
    """Raised when an input violates a data-model invariant.

    ``code`` is a short machine-readable tag (``duplicate-block``,
    ``point-out-of-range`` ...), ``path`` locates the offending field in a
    JSON document when there is one.
    """

    def __init__(self, code: str, message: str, path: str = ""):
        self.code = code
        self.path = path
        where = f" at {path}" if path else ""
        super().__init__(f"{code}{where}: {message}")


class Point(NamedTuple):
    coordinate: int
    value: int


def encode_point(point: Point | tuple[int, int], V: int) -> int:
    i, v = point
    return (i - 1) * V + v


def decode_point(x: int, V: int) -> Point:
    return Point((x - 1) // V + 1, (x - 1) % V + 1)


def to_bitset(points: Iterable[int]) -> int:
    bits = 0
    for p in points:
        bits |= 1 << p
    return bits


def from_bitset(bits: int) -> tuple[int, ...]:
    out = []
    while bits:
        low = bits & -bits
        out.append(low.bit_length() - 1)
        bits ^= low
    return tuple(out)


@dataclass(frozen=True)
class SetSystem:
    """An ``(n, k)`` set system: ``blocks`` are distinct k-subsets of ``1..n``.

    Blocks are kept as sorted tuples in input order; ``product`` is ``(L, V)``
    when the ground set is ``[L] x [V]`` (then ``n == L * V``).
    """

    n: int
    k: int
    blocks: tuple[tuple[int, ...], ...]
    product: tuple[int, int] | None = None

    def __post_init__(self):
        _check_system(self.n, self.k, self.blocks, self.product)

    @classmethod
    def from_blocks(cls, n: int, k: int, blocks: Iterable[Iterable[int]], product=None) -> "SetSystem":
        return cls(n, k, tuple(tuple(sorted(b)) for b in blocks), product)

    def __len__(self) -> int:
        return len(self.blocks)

    @cached_property
    def bitsets(self) -> tuple[int, ...]:
        return tuple(to_bitset(b) for b in self.blocks)

    def label(self, x: int) -> int | Point:
        """Human-facing form of a flat point."""
        if self.product is None:
            return x
        return decode_point(x, self.product[1])

    def labels(self, points: Iterable[int]) -> list:
        return [self.label(x) for x in sorted(points)]

    def encode(self, point: int | Sequence[int]) -> int:
        if self.product is None:
            if not isinstance(point, int):
                raise ValidationError("bad-point", f"expected an integer point, got {point!r}")
            return point
        if isinstance(point, int) or len(point) != 2:
            raise ValidationError("bad-point", f"expected a [coordinate, value] pair, got {point!r}")
        i, v = point
        L, V = self.product
        if not (1 <= i <= L and 1 <= v <= V):
            raise ValidationError("point-out-of-range", f"{list(point)} outside [{L}]x[{V}]")
        return encode_point((i, v), V)

    def subsystem(self, indices: Iterable[int]) -> "SetSystem":
        return SetSystem(self.n, self.k, tuple(self.blocks[i] for i in indices), self.product)


def _check_system(n, k, blocks, product) -> None:
    if not isinstance(n, int) or n < 1:
        raise ValidationError("bad-n", f"n must be a positive integer, got {n!r}")
    if not isinstance(k, int) or k < 1:
        raise ValidationError("bad-k", f"k must be a positive integer, got {k!r}")
    if k > n:
        raise ValidationError("k-exceeds-n", f"k={k} > n={n}")
    if product is not None:
        L, V = product
        if L < 1 or V < 1 or L * V != n:
            raise ValidationError("bad-product", f"product {L}x{V} does not match n={n}")
    seen: dict[tuple[int, ...], int] = {}
    for idx, block in enumerate(blocks):
        if len(set(block)) != len(block):
            raise ValidationError("repeated-point", f"block {idx} repeats a point", f"blocks[{idx}]")
        if len(block) != k:
            raise ValidationError(
                "wrong-block-size", f"block {idx} has {len(block)} points, expected {k}", f"blocks[{idx}]"
            )
        for x in block:
            if not isinstance(x, int) or not 1 <= x <= n:
                raise ValidationError("point-out-of-range", f"point {x!r} not in 1..{n}", f"blocks[{idx}]")
        if tuple(sorted(block)) != tuple(block):
            raise ValidationError("unsorted-block", f"block {idx} is not sorted", f"blocks[{idx}]")
        if block in seen:
            raise ValidationError(
                "duplicate-block", f"block {idx} repeats block {seen[block]}", f"blocks[{idx}]"
            )
        seen[block] = idx


def validate_set_system(raw: dict[str, Any]) -> SetSystem:
    """Build a :class:`SetSystem` from a parsed JSON-like mapping.

    Blocks may list plain integers, or ``[coordinate, value]`` pairs when a
    ``product`` entry is present.
    """
    if not isinstance(raw, dict):
        raise ValidationError("schema", "top level must be an object")
    for key in ("n", "k", "blocks"):
        if key not in raw:
            raise ValidationError("schema", f"missing field {key!r}", key)
    n, k = raw["n"], raw["k"]
    for key in ("n", "k"):
        if not isinstance(raw[key], int) or isinstance(raw[key], bool):
            raise ValidationError("schema", f"{key} must be an integer", key)
    product = None
    if raw.get("product") is not None:
        prod = raw["product"]
        if not isinstance(prod, dict) or not all(isinstance(prod.get(f), int) for f in ("L", "V")):
            raise ValidationError("schema", "product must be {L: int, V: int}", "product")
        product = (prod["L"], prod["V"])
        if product[0] * product[1] != n:
            raise ValidationError("bad-product", f"L*V={product[0] * product[1]} != n={n}", "product")
    if not isinstance(raw["blocks"], list):
        raise ValidationError("schema", "blocks must be a list", "blocks")
    if k > n:
        raise ValidationError("k-exceeds-n", f"k={k} > n={n}")

    blocks = []
    for idx, block in enumerate(raw["blocks"]):
        path = f"blocks[{idx}]"
        if not isinstance(block, list):
            raise ValidationError("schema", "block must be a list", path)
        flat = []
        for j, pt in enumerate(block):
            flat.append(_encode_raw_point(pt, n, product, f"{path}[{j}]"))
        if len(set(flat)) != len(flat):
            raise ValidationError("repeated-point", f"block {idx} repeats a point", path)
        if len(flat) != k:
            raise ValidationError("wrong-block-size", f"block {idx} has {len(flat)} points, expected {k}", path)
        blocks.append(tuple(sorted(flat)))
    return SetSystem(n, k, tuple(blocks), product)


def _encode_raw_point(pt, n, product, path) -> int:
    if product is None:
        if not isinstance(pt, int) or isinstance(pt, bool):
            raise ValidationError("schema", f"point must be an integer, got {pt!r}", path)
        if not 1 <= pt <= n:
            raise ValidationError("point-out-of-range", f"point {pt} not in 1..{n}", path)
        return pt
    if not (isinstance(pt, list) and len(pt) == 2 and all(isinstance(c, int) for c in pt)):
        raise ValidationError("schema", f"point must be [coordinate, value], got {pt!r}", path)
    L, V = product
    i, v = pt
    if not (1 <= i <= L and 1 <= v <= V):
        raise ValidationError("point-out-of-range", f"point {pt} outside [{L}]x[{V}]", path)
    return encode_point((i, v), V)


def system_to_dict(system: SetSystem) -> dict[str, Any]:
    out: dict[str, Any] = {"n": system.n, "k": system.k}
    if system.product is not None:
        L, V = system.product
        out["product"] = {"L": L, "V": V}
        out["blocks"] = [[list(decode_point(x, V)) for x in b] for b in system.blocks]
    else:
        out["blocks"] = [list(b) for b in system.blocks]
    return out


def serialize_set_system(system: SetSystem) -> str:
    return json.dumps(system_to_dict(system), separators=(",", ":")) + "\n"


def parse_set_system(text: str) -> SetSystem:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError("malformed", str(exc)) from exc
    return validate_set_system(raw)


@dataclass
class VerificationReport:
    """Verdict of one property check.

    A failing report always carries a ``witness`` that the matching
    ``check_*_witness`` predicate can re-validate on its own.
    """

    property: str
    verdict: str
    witness: dict[str, Any] | None = None
    stats: dict[str, int] = field(default_factory=lambda: {"examined": 0, "pruned": 0})

    def __post_init__(self):
        if self.verdict not in ("pass", "fail"):
            raise ValueError(f"verdict must be pass or fail, got {self.verdict!r}")
        if self.verdict == "fail" and self.witness is None:
            raise ValueError("a failing report needs a witness")

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self) -> dict[str, Any]:
        return {
            "property": self.property,
            "verdict": self.verdict,
            "witness": self.witness,
            "stats": dict(self.stats),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, default=_jsonable) + "\n"


def _jsonable(obj):
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")
