"""2-IPPS(n, 4) systems built from a solution-free set of slopes.

Each block is the graph of four affine maps of an offset ``p`` and a slope
``s`` over four coordinates: ``{(1, p), (2, p+2s), (3, p+5s), (4, p+(q+5)s)}``
with ``1 <= p <= m`` and ``s`` taken from a set ``S`` that has no non-trivial
solution to a list of linear equations.  :func:`derive_required_equations`
computes that list by enumerating every way four blocks could share a
4-point pirate and eliminating the offsets.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import mpmath

from .core import SetSystem, VerificationReport, encode_point
from .equations import (
    LinearEquation,
    SolutionFreeSet,
    Triviality,
    canonicalize,
    greedy_solution_free,
    verify_solution_free,
)

MAX_Q = 2**12
MAX_M = 2**20

# A1, A2, B1, B2 carry slope unknowns x, y, z, w in this order.
BLOCK_NAMES = ("A1", "A2", "B1", "B2")


def _log2_squared_at_least(Q: int, m: int) -> bool:
    """Exact test of ``log2(Q)**2 >= log2(m)``, i.e. ``Q >= 2**sqrt(log2 m)``."""
    if Q < 1:
        return False
    if Q & (Q - 1) == 0 and m & (m - 1) == 0:
        a, b = Q.bit_length() - 1, m.bit_length() - 1
        return a * a >= b
    # Not both powers of two: the two sides differ, so enough precision
    # separates them.
    for dps in (30, 60, 120, 240, 480):
        with mpmath.workdps(dps):
            diff = mpmath.log(Q, 2) ** 2 - mpmath.log(m, 2)
            if abs(diff) > mpmath.mpf(10) ** (-(dps - 10)):
                return diff > 0
    raise ArithmeticError(f"could not separate log2({Q})^2 from log2({m})")


def q_of_m(m: int) -> int:
    """``ceil(2 ** sqrt(log2 m))`` with an exact ceiling."""
    if m < 2:
        raise ValueError(f"m must be >= 2, got {m}")
    if m > MAX_M:
        raise ValueError(f"m must be <= {MAX_M}, got {m}")
    q = max(1, math.ceil(2 ** math.sqrt(math.log2(m))))
    while not _log2_squared_at_least(q, m):
        q += 1
    while q > 1 and _log2_squared_at_least(q - 1, m):
        q -= 1
    return q


def template_for(q: int) -> tuple[int, int, int, int]:
    return (0, 2, 5, q + 5)


@dataclass(frozen=True)
class ConstructionParams:
    m: int
    q: int
    n: int
    template: tuple[int, int, int, int]

    def __post_init__(self):
        if self.m < 2:
            raise ValueError(f"m must be >= 2, got {self.m}")
        if self.q != q_of_m(self.m):
            raise ValueError(f"q={self.q} does not match ceil(2^sqrt(log2 {self.m}))")
        if self.n != ground_size(self.m, self.q):
            raise ValueError(f"n={self.n} != 4(q+6)m")
        if tuple(self.template) != template_for(self.q):
            raise ValueError(f"template {self.template} != {template_for(self.q)}")

    @classmethod
    def for_m(cls, m: int) -> "ConstructionParams":
        q = q_of_m(m)
        return cls(m, q, ground_size(m, q), template_for(q))

    @property
    def values(self) -> int:
        """Size of the value range per coordinate, ``(q+6)m``."""
        return (self.q + 6) * self.m


def ground_size(m: int, q: int) -> int:
    if m < 2:
        raise ValueError(f"m must be >= 2, got {m}")
    if not 1 <= q <= MAX_Q:
        raise ValueError(f"q must be in [1, {MAX_Q}], got {q}")
    n = 4 * (q + 6) * m
    if n >= 2**63:
        raise OverflowError(f"n={n} does not fit a signed 64-bit integer")
    return n


def make_block(p: int, s: int, params: ConstructionParams) -> tuple[tuple[int, int], ...]:
    """The four ``(coordinate, value)`` points of the block with offset p, slope s."""
    if not 1 <= p <= params.m:
        raise ValueError(f"p={p} outside [1, {params.m}]")
    if not 1 <= s <= params.m:
        raise ValueError(f"s={s} outside [1, {params.m}]")
    return tuple((i + 1, p + c * s) for i, c in enumerate(params.template))


def check_pairwise_noncollinear(params: "ConstructionParams | Sequence[int]") -> bool:
    """Distinct slope coefficients, which caps block intersections at one point."""
    template = params.template if isinstance(params, ConstructionParams) else tuple(params)
    return len(set(template)) == len(template)


def build_ipps(params: ConstructionParams, S: SolutionFreeSet) -> SetSystem:
    if S.m != params.m:
        raise ValueError(f"set was built for m={S.m}, params have m={params.m}")
    if not check_pairwise_noncollinear(params):
        raise ValueError("template slopes are not pairwise distinct")
    required = derive_required_equations(params)
    report = verify_solution_free(S.elements, required)
    if not report.passed:
        raise ValueError(f"slope set has a non-trivial solution: {report.witness}")
    V = params.values
    blocks = []
    for p in range(1, params.m + 1):
        for s in S.elements:
            blocks.append(tuple(sorted(encode_point(pt, V) for pt in make_block(p, s, params))))
    return SetSystem(params.n, 4, tuple(blocks), (4, V))


# --- case analysis -------------------------------------------------------


@dataclass(frozen=True)
class CaseEquation:
    """One way four distinct blocks could jointly cover a 4-point pirate.

    ``coordinates`` is ``(i, j, k, l)``: A1 meets the pirate at coordinates
    ``i, j`` and A2 at ``k, l``.  ``matching`` names the B block holding
    each of those four points.  ``outcome`` is ``"forces-equality"`` when the
    constraints alone make two of the blocks coincide, else ``"equation"``.
    """

    coordinates: tuple[int, int, int, int]
    matching: tuple[str, str, str, str]
    outcome: str
    equation: LinearEquation | None = None
    raw: tuple[int, int, int, int] | None = None
    coincident: tuple[str, str] | None = None

    @property
    def case(self) -> int:
        """1, 2 or 3 for an overlap of 0, 1 or 2 between A1's and A2's coordinates."""
        i, j, k, l = self.coordinates
        return len({i, j} & {k, l}) + 1


def _constraint_row(coord_slope: int, a: int, b: int) -> list[int]:
    """``p_a + c*v_a - p_b - c*v_b = 0`` over ``(p1..p4, x, y, z, w)``."""
    row = [0] * 8
    row[a] += 1
    row[b] -= 1
    row[4 + a] += coord_slope
    row[4 + b] -= coord_slope
    return row


def _normalize(row: list[int]) -> list[int]:
    g = math.gcd(*row)
    if g == 0:
        return row
    row = [c // g for c in row]
    lead = next(c for c in row if c != 0)
    return [-c for c in row] if lead < 0 else row


def _eliminate(rows: list[list[int]], columns: Sequence[int]) -> tuple[list[list[int]], list[list[int]]]:
    """Fraction-free elimination on ``columns``.

    Returns ``(pivot_rows, rest)``: rows used as pivots and the remaining rows,
    which are zero on every eliminated column.
    """
    rows = [list(r) for r in rows if any(r)]
    pivots = []
    for col in columns:
        idx = next((i for i, r in enumerate(rows) if r[col] != 0), None)
        if idx is None:
            continue
        piv = rows.pop(idx)
        out = []
        for r in rows:
            if r[col]:
                r = [piv[col] * a - r[col] * b for a, b in zip(r, piv)]
                r = _normalize(r)
            if any(r):
                out.append(r)
        rows = out
        pivots.append(piv)
    return pivots, rows


def _rank(rows: list[list[int]]) -> int:
    pivots, rest = _eliminate(rows, range(len(rows[0])) if rows else [])
    return len(pivots)


def _forced_coincidence(rows: list[list[int]]) -> tuple[str, str] | None:
    """A block pair whose offsets and slopes the constraints force equal."""
    base = _rank(rows)
    for u, v in itertools.combinations(range(4), 2):
        p_eq = [0] * 8
        p_eq[u], p_eq[v] = 1, -1
        s_eq = [0] * 8
        s_eq[4 + u], s_eq[4 + v] = 1, -1
        if _rank(rows + [p_eq, s_eq]) == base:
            return BLOCK_NAMES[u], BLOCK_NAMES[v]
    return None


def _matchings(coords: tuple[int, int, int, int]):
    """B1/B2 labels for the four pirate points, two each, one per coordinate."""
    for labels in itertools.product((2, 3), repeat=4):
        if labels.count(2) != 2:
            continue
        ok = True
        for b in (2, 3):
            used = [coords[t] for t in range(4) if labels[t] == b]
            if len(set(used)) != len(used):
                ok = False
        if ok:
            yield labels


def _trivial_patterns(raw: Sequence[int], triviality: Triviality) -> list[list[tuple[int, int]]]:
    """Slope equalities that make a solution trivial, one list per alternative."""
    if triviality is Triviality.ALL_EQUAL:
        return [[(0, 1), (1, 2), (2, 3)]]
    pos = [i for i, c in enumerate(raw) if c > 0]
    neg = [i for i, c in enumerate(raw) if c < 0]
    return [
        list(zip(pos, perm))
        for perm in itertools.permutations(neg)
        if all(raw[i] == -raw[j] for i, j in zip(pos, perm))
    ]


def _pattern_is_safe(rows: list[list[int]], pattern: list[tuple[int, int]]) -> bool:
    """Whether these slope equalities, with the constraints, force two blocks to coincide."""
    extra = []
    for u, v in pattern:
        row = [0] * 8
        row[4 + u], row[4 + v] = 1, -1
        extra.append(row)
    return _forced_coincidence(rows + extra) is not None


def _relation_equation(rows: list[list[int]], raw: tuple[int, ...]) -> LinearEquation:
    """Canonical equation for one eliminated relation.

    The coefficient-matched convention is kept only when each of its trivial
    solutions forces a block coincidence for this matching; otherwise the
    all-equal convention applies.  The former fails when two slope gaps of
    the template coincide (q in {2, 3, 5}), e.g. ``q*x - 5y + 5z - q*w``
    at q = 5 also admits ``x == y, z == w`` with four distinct blocks.
    """
    eq = canonicalize(LinearEquation(raw))
    if eq.triviality is Triviality.COEFF_MATCHED:
        if all(_pattern_is_safe(rows, pat) for pat in _trivial_patterns(raw, Triviality.COEFF_MATCHED)):
            return eq
        eq = LinearEquation(eq.coeffs, Triviality.ALL_EQUAL)
    if not _pattern_is_safe(rows, _trivial_patterns(raw, Triviality.ALL_EQUAL)[0]):
        raise ArithmeticError(f"equal slopes do not force coinciding blocks for relation {raw}")
    return eq


def derive_cases(params: "ConstructionParams | int") -> list[CaseEquation]:
    """Every coordinate choice and matching, with its eliminated outcome."""
    q = params.q if isinstance(params, ConstructionParams) else int(params)
    slopes = template_for(q)
    results = []
    pairs = list(itertools.combinations(range(1, 5), 2))
    for (i, j), (k, l) in itertools.product(pairs, repeat=2):
        coords = (i, j, k, l)
        owners = (0, 0, 1, 1)  # A1, A1, A2, A2
        for labels in _matchings(coords):
            rows = [
                _constraint_row(slopes[c - 1], a, b) for c, a, b in zip(coords, owners, labels)
            ]
            matching = tuple(BLOCK_NAMES[b] for b in labels)
            pair = _forced_coincidence(rows)
            if pair is not None:
                results.append(CaseEquation(coords, matching, "forces-equality", coincident=pair))
                continue
            _, relations = _eliminate(rows, range(4))
            if not relations:
                raise ArithmeticError(f"matching {coords}/{matching} leaves the slopes unconstrained")
            for rel in relations:
                raw = tuple(rel[4:])
                results.append(CaseEquation(coords, matching, "equation", _relation_equation(rows, raw), raw))
    return results


def derive_required_equations(params: "ConstructionParams | int") -> tuple[LinearEquation, ...]:
    """Canonical, deduplicated equations a slope set must avoid.

    When the same coefficients occur under both conventions only the
    all-equal one is kept, since it excludes strictly more.  Ordered with
    all-equal equations first, then coefficient-matched ones, each group
    sorted by coefficients.
    """
    eqs = {c.equation for c in derive_cases(params) if c.equation is not None}
    strict = {e.coeffs for e in eqs if e.triviality is Triviality.ALL_EQUAL}
    eqs = {e for e in eqs if e.triviality is Triviality.ALL_EQUAL or e.coeffs not in strict}
    return tuple(sorted(eqs, key=lambda e: (e.triviality is Triviality.COEFF_MATCHED, e.coeffs)))


@dataclass
class ConstructionResult:
    params: ConstructionParams
    equations: tuple[LinearEquation, ...]
    slopes: SolutionFreeSet
    system: SetSystem
    report: VerificationReport
    extra: dict = field(default_factory=dict)

    def sidecar(self) -> dict:
        from .equations import equation_to_list

        return {
            "m": self.params.m,
            "q": self.params.q,
            "n": self.params.n,
            "slopes": list(self.slopes.elements),
            "blocks": len(self.system),
            "equations": [equation_to_list(e) for e in self.equations],
        }


def run_construction(
    m: int,
    mode: str = "greedy",
    S: Sequence[int] | SolutionFreeSet | None = None,
    verify_mode: str = "fast",
) -> ConstructionResult:
    """Parameters, equations, slope set, system and verification in one call.

    Raises ``RuntimeError`` if the built system fails verification, which
    would mean a bug rather than a property of the input.
    """
    from .verify import verify_ipps2

    params = ConstructionParams.for_m(m)
    equations = derive_required_equations(params)
    if mode == "greedy":
        slopes = greedy_solution_free(m, equations)
    elif mode == "provided-set":
        if S is None:
            raise ValueError("provided-set mode needs a slope set")
        elements = S.elements if isinstance(S, SolutionFreeSet) else tuple(sorted(set(S)))
        slopes = SolutionFreeSet(m, elements, equations)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    system = build_ipps(params, slopes)
    report = verify_ipps2(system, mode=verify_mode)
    if not report.passed:
        raise RuntimeError(f"constructed system failed {report.property}: {report.witness}")
    return ConstructionResult(params, equations, slopes, system, report)


def end_to_end(
    m: int,
    mode: str = "greedy",
    S: Sequence[int] | SolutionFreeSet | None = None,
    verify_mode: str = "fast",
) -> tuple[SetSystem, VerificationReport]:
    result = run_construction(m, mode, S, verify_mode)
    return result.system, result.report
