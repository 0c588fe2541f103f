"""Homogeneous linear equations in four unknowns and solution-free sets.

An equation ``a1*x + a2*y + a3*z + a4*w = 0`` with ``sum(a) == 0`` is
translation invariant, so a set with no non-trivial solution keeps that
property under any shift.  Two notions of "trivial" are used:

* ``ALL_EQUAL``: only ``x == y == z == w`` is trivial.
* ``COEFF_MATCHED``: for ``a*x + b*y - a*z - b*w`` a solution is trivial when
  every positive-coefficient unknown can be paired with a negative-coefficient
  unknown of the same magnitude holding the same value.  For ``a == b == 1``
  this is the usual Sidon (B2) convention.
"""

from __future__ import annotations

import itertools
import json
import math
import random
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, NamedTuple, Sequence

from .core import VerificationReport

MAX_M = 2**20


class Triviality(str, Enum):
    ALL_EQUAL = "AE"
    COEFF_MATCHED = "CM"


class Assignment(NamedTuple):
    x: int
    y: int
    z: int
    w: int


def is_homogeneous(eq: "LinearEquation | Sequence[int]") -> bool:
    coeffs = eq.coeffs if isinstance(eq, LinearEquation) else eq
    return sum(coeffs) == 0


def has_matched_shape(coeffs: Sequence[int]) -> bool:
    """True for a permutation of ``(a, b, -a, -b)`` with ``a, b > 0``."""
    pos = sorted(c for c in coeffs if c > 0)
    neg = sorted(-c for c in coeffs if c < 0)
    return len(pos) == 2 and len(neg) == 2 and pos == neg


@dataclass(frozen=True, order=True)
class LinearEquation:
    coeffs: tuple[int, int, int, int]
    triviality: Triviality = Triviality.ALL_EQUAL

    def __post_init__(self):
        coeffs = tuple(int(c) for c in self.coeffs)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "triviality", Triviality(self.triviality))
        if len(coeffs) != 4:
            raise ValueError(f"expected 4 coefficients, got {len(coeffs)}")
        if not any(coeffs):
            raise ValueError("coefficients are all zero")
        if sum(coeffs) != 0:
            raise ValueError(f"equation {coeffs} is not homogeneous")
        if self.triviality is Triviality.COEFF_MATCHED and not has_matched_shape(coeffs):
            raise ValueError(f"{coeffs} does not have the a*x+b*y-a*z-b*w shape")

    @classmethod
    def sidon(cls) -> "LinearEquation":
        return cls((1, 1, -1, -1), Triviality.COEFF_MATCHED)

    @classmethod
    def matched(cls, a: int, b: int) -> "LinearEquation":
        """``a*x + b*y = a*z + b*w`` in canonical form."""
        return canonicalize(cls((a, b, -a, -b), Triviality.COEFF_MATCHED))

    def evaluate(self, values: Sequence[int]) -> int:
        return sum(a * v for a, v in zip(self.coeffs, values))

    def __str__(self) -> str:
        terms = []
        for a, var in zip(self.coeffs, "xyzw"):
            if a == 0:
                continue
            sign = "-" if a < 0 else "+"
            mag = "" if abs(a) == 1 else str(abs(a))
            terms.append(f"{sign}{mag}{var}")
        text = "".join(terms).lstrip("+")
        return f"{text}=0 [{self.triviality.value}]"


def is_trivial_solution(eq: LinearEquation, asg: Sequence[int]) -> bool:
    if eq.triviality is Triviality.ALL_EQUAL:
        return len(set(asg)) == 1
    pos = [i for i, c in enumerate(eq.coeffs) if c > 0]
    neg = [i for i, c in enumerate(eq.coeffs) if c < 0]
    for perm in itertools.permutations(neg):
        if all(
            eq.coeffs[i] == -eq.coeffs[j] and asg[i] == asg[j] for i, j in zip(pos, perm)
        ):
            return True
    return False


def canonicalize(eq: LinearEquation) -> LinearEquation:
    """Orbit representative under variable permutation and global sign.

    Coefficients are divided by their gcd; each of ``eq`` and ``-eq`` is
    sorted in descending order and the lexicographically smaller of the two
    is kept.  Matched-shape results are tagged ``COEFF_MATCHED``.
    """
    g = math.gcd(*eq.coeffs)
    base = [c // g for c in eq.coeffs]
    candidates = [
        tuple(sorted(base, reverse=True)),
        tuple(sorted((-c for c in base), reverse=True)),
    ]
    coeffs = min(candidates)
    tag = Triviality.COEFF_MATCHED if has_matched_shape(coeffs) else Triviality.ALL_EQUAL
    return LinearEquation(coeffs, tag)


def find_nontrivial_solution_exhaustive(S: Iterable[int], eq: LinearEquation) -> Assignment | None:
    """Reference scan over all of ``S**4``; returns the lexicographically smallest hit."""
    values = sorted(set(S))
    for asg in itertools.product(values, repeat=4):
        if eq.evaluate(asg) == 0 and not is_trivial_solution(eq, asg):
            return Assignment(*asg)
    return None


def find_nontrivial_solution(S: Iterable[int], eq: LinearEquation) -> Assignment | None:
    """Lexicographically smallest non-trivial solution over ``S``, or None.

    Three unknowns are enumerated and the fourth is solved for, so the work
    is ``O(|S|**3)`` instead of ``O(|S|**4)``.
    """
    values = sorted(set(S))
    members = set(values)
    solve = max(i for i, c in enumerate(eq.coeffs) if c != 0)
    free = [i for i in range(4) if i != solve]
    a_solve = eq.coeffs[solve]
    best = None
    for combo in itertools.product(values, repeat=3):
        partial = sum(eq.coeffs[i] * v for i, v in zip(free, combo))
        if partial % a_solve:
            continue
        val = -partial // a_solve
        if val not in members:
            continue
        asg = [0] * 4
        for i, v in zip(free, combo):
            asg[i] = v
        asg[solve] = val
        if is_trivial_solution(eq, asg):
            continue
        if solve == 3:
            # free unknowns lead, so product order is lexicographic order
            return Assignment(*asg)
        if best is None or tuple(asg) < best:
            best = tuple(asg)
    return Assignment(*best) if best is not None else None


def _solution_through(S: set[int], eq: LinearEquation, s: int) -> Assignment | None:
    """Some non-trivial solution over ``S | {s}`` that uses ``s``."""
    pool = sorted(S | {s})
    members = set(pool)
    for pos in range(4):
        solve = next(i for i in (3, 2, 1, 0) if i != pos and eq.coeffs[i] != 0)
        rest = [i for i in range(4) if i not in (pos, solve)]
        a_solve = eq.coeffs[solve]
        for combo in itertools.product(pool, repeat=2):
            partial = eq.coeffs[pos] * s + sum(eq.coeffs[i] * v for i, v in zip(rest, combo))
            if partial % a_solve:
                continue
            val = -partial // a_solve
            if val not in members:
                continue
            asg = [0] * 4
            asg[pos] = s
            asg[solve] = val
            for i, v in zip(rest, combo):
                asg[i] = v
            if not is_trivial_solution(eq, asg):
                return Assignment(*asg)
    return None


def verify_solution_free(S: Iterable[int], eqs: Iterable[LinearEquation]) -> VerificationReport:
    values = sorted(set(S))
    examined = 0
    for eq in eqs:
        examined += len(values) ** 3
        asg = find_nontrivial_solution(values, eq)
        if asg is not None:
            witness = {"equation": equation_to_list(eq), "assignment": list(asg)}
            return VerificationReport("solution-free", "fail", witness, {"examined": examined, "pruned": 0})
    return VerificationReport("solution-free", "pass", None, {"examined": examined, "pruned": 0})


def check_solution_witness(S: Iterable[int], witness: dict) -> bool:
    """Independent re-check of a ``solution-free`` failure witness."""
    eq = equation_from_list(witness["equation"])
    asg = witness["assignment"]
    members = set(S)
    return (
        all(v in members for v in asg)
        and eq.evaluate(asg) == 0
        and not is_trivial_solution(eq, asg)
    )


@dataclass(frozen=True)
class SolutionFreeSet:
    m: int
    elements: tuple[int, ...]
    avoided: tuple[LinearEquation, ...]

    def __post_init__(self):
        els = tuple(self.elements)
        if any(b <= a for a, b in zip(els, els[1:])):
            raise ValueError("elements must be strictly increasing")
        if els and not (1 <= els[0] and els[-1] <= self.m):
            raise ValueError(f"elements must lie in [1, {self.m}]")
        report = verify_solution_free(els, self.avoided)
        if not report.passed:
            raise ValueError(f"set is not solution-free: {report.witness}")

    def __len__(self) -> int:
        return len(self.elements)

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "elements": list(self.elements),
            "equations": [equation_to_list(e) for e in self.avoided],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":")) + "\n"

    @classmethod
    def from_dict(cls, raw: dict) -> "SolutionFreeSet":
        return cls(
            int(raw["m"]),
            tuple(sorted(int(e) for e in raw["elements"])),
            tuple(equation_from_list(e) for e in raw["equations"]),
        )


def greedy_solution_free(m: int, eqs: Iterable[LinearEquation]) -> SolutionFreeSet:
    """First-fit scan of ``1..m`` keeping every candidate that stays solution-free."""
    if m < 1 or m > MAX_M:
        raise ValueError(f"m must be in [1, {MAX_M}], got {m}")
    eqs = tuple(eqs)
    chosen: set[int] = set()
    for s in range(1, m + 1):
        if all(_solution_through(chosen, eq, s) is None for eq in eqs):
            chosen.add(s)
    return SolutionFreeSet(m, tuple(sorted(chosen)), eqs)


def shift_intersect(S0: Iterable[int], S1: Iterable[int], u: int, m: int) -> set[int]:
    target = set(S1)
    return {s + u for s in S0 if 1 <= s + u <= m and s + u in target}


def random_shift_search(
    S0: Iterable[int], S1: Iterable[int], m: int, seed: int, trials: int
) -> tuple[int, set[int]]:
    """Best of ``trials`` uniform shifts ``u`` in ``[-m, m]``; ties go to the smaller ``u``."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    S0, S1 = set(S0), set(S1)
    rng = random.Random(seed)
    best_u, best = None, None
    for _ in range(trials):
        u = rng.randint(-m, m)
        got = shift_intersect(S0, S1, u, m)
        if best is None or len(got) > len(best) or (len(got) == len(best) and u < best_u):
            best_u, best = u, got
    return best_u, best


def equation_to_list(eq: LinearEquation) -> list:
    return [*eq.coeffs, eq.triviality.value]


def equation_from_list(raw: Sequence) -> LinearEquation:
    if len(raw) not in (4, 5):
        raise ValueError(f"equation needs 4 coefficients and an optional tag, got {raw!r}")
    tag = raw[4] if len(raw) == 5 else Triviality.ALL_EQUAL
    return LinearEquation(tuple(int(c) for c in raw[:4]), Triviality(tag))


def parse_equations(text: str) -> list[LinearEquation]:
    """One equation per line: four signed integers and an optional ``CM`` tag."""
    eqs = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        tag = Triviality.ALL_EQUAL
        if len(parts) == 5:
            if parts[4].upper() not in ("CM", "AE"):
                raise ValueError(f"line {lineno}: unknown tag {parts[4]!r}")
            tag = Triviality(parts[4].upper())
            parts = parts[:4]
        if len(parts) != 4:
            raise ValueError(f"line {lineno}: expected 4 integers")
        try:
            coeffs = tuple(int(p) for p in parts)
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from exc
        try:
            eqs.append(LinearEquation(coeffs, tag))
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from exc
    return eqs


def format_equations(eqs: Iterable[LinearEquation]) -> str:
    lines = []
    for eq in eqs:
        text = " ".join(str(c) for c in eq.coeffs)
        if eq.triviality is Triviality.COEFF_MATCHED:
            text += " CM"
        lines.append(text)
    return "\n".join(lines) + "\n"
