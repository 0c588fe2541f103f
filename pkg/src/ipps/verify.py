"""Parent-identifying checks for set systems.

For t = 2 a system is parent-identifying iff two forbidden configurations
are absent:

* IPPSa: three distinct blocks with ``|(A|B) & (A|C) & (B|C)| >= k``;
* IPPSb: four distinct blocks split into pairs with
  ``|(A1|A2) & (B1|B2)| >= k``.

:func:`verify_ipps_bruteforce` checks the definition directly (any t) and
serves as the oracle for the t = 2 fast path.  Witnesses are canonical: the
smallest block-index tuple wins, so every mode reports the same one.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .core import SetSystem, VerificationReport, from_bitset, to_bitset

BRUTE_MAX_N = 64
BRUTE_MAX_BLOCKS = 12
BRUTE_MAX_T = 3
BRUTE_MAX_K = 6



class GuardExceeded(ValueError):
    """The instance is too large for an exhaustive definition check."""


def _popcount(x: int) -> int:
    return bin(x).count("1")


def _witness_points(system: SetSystem, points: Iterable[int]) -> dict:
    pts = sorted(points)
    return {"T": pts, "labels": [_plain(system.label(x)) for x in pts]}


def _plain(label):
    return list(label) if isinstance(label, tuple) else label


def max_pairwise_intersection(system: SetSystem) -> int:
    if len(system) < 2:
        raise ValueError("need at least two blocks")
    best = 0
    for u, v in itertools.combinations(system.bitsets, 2):
        best = max(best, _popcount(u & v))
    return best


def _intersection_graph(system: SetSystem) -> list[set[int]]:
    index: dict[int, list[int]] = {}
    for b, block in enumerate(system.blocks):
        for x in block:
            index.setdefault(x, []).append(b)
    adj = [set() for _ in system.blocks]
    for owners in index.values():
        for u, v in itertools.combinations(owners, 2):
            adj[u].add(v)
            adj[v].add(u)
    return adj


# --- IPPSa -----------------------------------------------------------------


def _ippsa_witness(system, triple, common) -> dict:
    # any k of the covered points form a pirate with three pairwise-disjoint parent pairs
    common = sorted(common)
    return {"blocks": list(triple), "set": common, **_witness_points(system, common[: system.k])}


def verify_ippsa(system: SetSystem, mode: str = "fast") -> VerificationReport:
    """Every three distinct blocks cover fewer than k points pairwise.

    The fast mode uses ``(A|B)&(A|C)&(B|C) == (A&B)|(A&C)|(B&C)`` and skips
    the scan outright when three maximal pairwise intersections cannot reach k.
    """
    bits = system.bitsets
    nb, k = len(bits), system.k
    total = nb * (nb - 1) * (nb - 2) // 6
    if mode == "fast" and nb >= 2 and 3 * max_pairwise_intersection(system) < k:
        return VerificationReport("IPPSa", "pass", None, {"examined": 0, "pruned": total})
    for a, b, c in itertools.combinations(range(nb), 3):
        A, B, C = bits[a], bits[b], bits[c]
        if mode == "fast":
            common = (A & B) | (A & C) | (B & C)
        else:
            common = (A | B) & (A | C) & (B | C)
        if _popcount(common) >= k:
            witness = _ippsa_witness(system, (a, b, c), from_bitset(common))
            examined = _triple_rank(a, b, c, nb) + 1
            return VerificationReport("IPPSa", "fail", witness, {"examined": examined, "pruned": 0})
    return VerificationReport("IPPSa", "pass", None, {"examined": total, "pruned": 0})


def _triple_rank(a, b, c, nb) -> int:
    # number of triples preceding (a, b, c) in combinations order
    count = 0
    for x in range(a):
        r = nb - x - 1
        count += r * (r - 1) // 2
    for y in range(a + 1, b):
        count += nb - y - 1
    return count + (c - b - 1)


def check_ippsa_witness(system: SetSystem, witness: dict) -> bool:
    a, b, c = witness["blocks"]
    if len({a, b, c}) != 3:
        return False
    A, B, C = (set(system.blocks[i]) for i in (a, b, c))
    common = (A | B) & (A | C) & (B | C)
    T = set(witness["T"])
    return set(witness["set"]) == common and len(T) == system.k and T <= common


# --- IPPSb -----------------------------------------------------------------


def _pairing_key(quad: Sequence[int]):
    """Canonical order of a pairing ``(a1, a2, b1, b2)``.

    Sorted block indices first; among the pairings of one 4-set, the smallest
    alternating sequence ``(A1, B1, A2, B2)`` with ``A1`` the least block.
    """
    (a1, a2), (b1, b2) = _orient(quad)
    return tuple(sorted(quad)), (a1, b1, a2, b2)


def _orient(quad: Sequence[int]) -> tuple[tuple[int, int], tuple[int, int]]:
    a1, a2, b1, b2 = quad
    A, B = tuple(sorted((a1, a2))), tuple(sorted((b1, b2)))
    return (A, B) if A[0] < B[0] else (B, A)


def _ippsb_witness(system: SetSystem, quad: Sequence[int], inter: int) -> dict:
    A, B = _orient(quad)
    T = from_bitset(inter)[: system.k]
    return {"pairing": [list(A), list(B)], "intersection": list(from_bitset(inter)), **_witness_points(system, T)}


def _word_matrix(system: SetSystem) -> np.ndarray:
    nw = (system.n + 64) // 64
    words = np.zeros((len(system), nw), dtype=np.uint64)
    mask = (1 << 64) - 1
    for b, bits in enumerate(system.bitsets):
        for w in range(nw):
            words[b, w] = (bits >> (64 * w)) & mask
    return words


def _ippsb_exhaustive(system: SetSystem):
    """All ``3 * C(nb, 4)`` pairings, vectorised over the second pair."""
    nb, k = len(system), system.k
    if nb < 4:
        return None, 0
    words = _word_matrix(system)
    pi, pj = np.triu_indices(nb, k=1)
    unions = words[pi] | words[pj]
    best = None
    examined = 0
    npairs = len(pi)
    for P in range(npairs - 1):
        a, b = int(pi[P]), int(pj[P])
        qi, qj = pi[P + 1 :], pj[P + 1 :]
        # pairs after P in lexicographic order; those touching a or b are not four distinct blocks
        ok = (qi != a) & (qi != b) & (qj != b)
        idx = np.nonzero(ok)[0]
        if idx.size == 0:
            continue
        examined += int(idx.size)
        sizes = np.bitwise_count(unions[P] & unions[P + 1 + idx]).sum(axis=1, dtype=np.int64)
        hits = idx[sizes >= k]
        for h in hits.tolist():
            quad = (a, b, int(qi[h]), int(qj[h]))
            key = _pairing_key(quad)
            if best is None or key < best[0]:
                best = (key, quad)
    if best is None:
        return None, examined
    quad = best[1]
    bits = system.bitsets
    inter = (bits[quad[0]] | bits[quad[1]]) & (bits[quad[2]] | bits[quad[3]])
    return _ippsb_witness(system, quad, inter), examined


def _ippsb_cycles(system: SetSystem):
    """Candidates where all four cross pairs intersect: 4-cycles in the intersection graph."""
    bits = system.bitsets
    k = system.k
    adj = _intersection_graph(system)
    best = None
    examined = 0
    for x in range(len(bits)):
        partners = set()
        for b in adj[x]:
            partners.update(y for y in adj[b] if y > x)
        for y in sorted(partners):
            common = sorted((adj[x] & adj[y]) - {x, y})
            for u, v in itertools.combinations(common, 2):
                if u < x:
                    continue  # counted with {u, v} as the A side
                examined += 1
                inter = (bits[x] | bits[y]) & (bits[u] | bits[v])
                if _popcount(inter) >= k:
                    quad = (x, y, u, v)
                    key = _pairing_key(quad)
                    if best is None or key < best[0]:
                        best = (key, quad, inter)
    if best is None:
        return None, examined
    return _ippsb_witness(system, best[1], best[2]), examined


def verify_ippsb(system: SetSystem, mode: str = "fast") -> VerificationReport:
    nb = len(system)
    total = 3 * (nb * (nb - 1) * (nb - 2) * (nb - 3) // 24)
    use_cycles = mode == "fast" and nb >= 2 and system.k >= 4 and max_pairwise_intersection(system) <= 1
    if use_cycles:
        witness, examined = _ippsb_cycles(system)
    else:
        witness, examined = _ippsb_exhaustive(system)
    stats = {"examined": examined, "pruned": total - examined}
    verdict = "pass" if witness is None else "fail"
    return VerificationReport("IPPSb", verdict, witness, stats)


def check_ippsb_witness(system: SetSystem, witness: dict) -> bool:
    (a1, a2), (b1, b2) = witness["pairing"]
    if len({a1, a2, b1, b2}) != 4:
        return False
    blk = [set(system.blocks[i]) for i in (a1, a2, b1, b2)]
    inter = (blk[0] | blk[1]) & (blk[2] | blk[3])
    T = set(witness["T"])
    return len(T) == system.k and T <= inter


def verify_ipps2(system: SetSystem, mode: str = "fast") -> VerificationReport:
    """Both t = 2 conditions; a failure returns the failing check's report."""
    if mode not in ("fast", "exhaustive"):
        raise ValueError(f"mode must be fast or exhaustive, got {mode!r}")
    ra = verify_ippsa(system, mode)
    if not ra.passed:
        return ra
    rb = verify_ippsb(system, mode)
    if not rb.passed:
        return rb
    stats = {key: ra.stats[key] + rb.stats[key] for key in ("examined", "pruned")}
    return VerificationReport("IPPSa+IPPSb", "pass", None, stats)


# --- definition-level oracle ------------------------------------------------


@dataclass(frozen=True)
class ParentSetFamily:
    pirate: tuple[int, ...]
    parents: tuple[tuple[int, ...], ...]


def _coalitions(system: SetSystem, t: int):
    bits = system.bitsets
    for size in range(1, t + 1):
        for combo in itertools.combinations(range(len(bits)), size):
            union = 0
            for i in combo:
                union |= bits[i]
            yield combo, union


def parent_sets(system: SetSystem, T: Iterable[int], t: int) -> ParentSetFamily:
    """All coalitions of at most t blocks whose union covers T."""
    T = tuple(sorted(set(T)))
    if len(T) != system.k:
        raise ValueError(f"pirate must have {system.k} points, got {len(T)}")
    if t < 1:
        raise ValueError("t must be >= 1")
    tb = to_bitset(T)
    parents = tuple(combo for combo, union in _coalitions(system, t) if tb & ~union == 0)
    return ParentSetFamily(T, parents)


def _check_guard(system: SetSystem, t: int) -> None:
    if system.n > BRUTE_MAX_N or len(system) > BRUTE_MAX_BLOCKS or t > BRUTE_MAX_T or system.k > BRUTE_MAX_K:
        raise GuardExceeded(
            f"brute force limited to n<={BRUTE_MAX_N}, blocks<={BRUTE_MAX_BLOCKS}, "
            f"t<={BRUTE_MAX_T}, k<={BRUTE_MAX_K}"
        )


def _common(parents: Sequence[Sequence[int]]) -> set[int]:
    out = set(parents[0])
    for p in parents[1:]:
        out &= set(p)
    return out


def verify_ipps_bruteforce(system: SetSystem, t: int) -> VerificationReport:
    """Definition check: every coverable k-set has parent sets sharing a block.

    Only k-subsets of unions of at most t blocks can have parents, so those
    are the only pirates enumerated.  The witness is the failing pirate whose
    smallest pair of disjoint parent sets is smallest (ordered as for IPPSb),
    then the smallest pirate.
    """
    if t < 1:
        raise ValueError("t must be >= 1")
    _check_guard(system, t)
    coalitions = list(_coalitions(system, t))
    seen = set()
    examined = 0
    best = None
    for _, union in coalitions:
        for T in itertools.combinations(from_bitset(union), system.k):
            if T in seen:
                continue
            seen.add(T)
            examined += 1
            tb = to_bitset(T)
            parents = [combo for combo, u in coalitions if tb & ~u == 0]
            if _common(parents):
                continue
            key = (_separating_pair(parents), T)
            if best is None or key < best[0]:
                best = (key, T, parents)
    stats = {"examined": examined, "pruned": 0}
    if best is None:
        return VerificationReport("IPPS-def", "pass", None, stats)
    _, T, parents = best
    witness = {"parent_sets": [list(p) for p in parents], **_witness_points(system, T)}
    return VerificationReport("IPPS-def", "fail", witness, stats)


def _separating_pair(parents: Sequence[Sequence[int]]) -> tuple:
    """Smallest pair of disjoint parent sets, ordered like IPPSb pairings."""
    best = None
    for p, r in itertools.combinations(parents, 2):
        if set(p) & set(r):
            continue
        if len(p) == 2 and len(r) == 2:
            key = _pairing_key((*p, *r))
        else:
            first, second = sorted((tuple(p), tuple(r)))
            key = (tuple(sorted(p + r)), first + second)
        if best is None or key < best:
            best = key
    if best is not None:
        return best
    # t >= 3 can lose the common block without any disjoint pair
    everything = tuple(sorted(set().union(*parents)))
    return everything, everything


def check_definition_witness(system: SetSystem, witness: dict, t: int) -> bool:
    """Recompute the parent family of the witness pirate from scratch."""
    T = set(witness["T"])
    if len(T) != system.k:
        return False
    blocks = [set(b) for b in system.blocks]
    parents = []
    for size in range(1, t + 1):
        for combo in itertools.combinations(range(len(blocks)), size):
            if T <= set().union(*(blocks[i] for i in combo)):
                parents.append(set(combo))
    return bool(parents) and not set.intersection(*parents)


@dataclass(frozen=True)
class TraceResult:
    """``status`` is ``identified``, ``no-parents`` or ``unidentifiable``."""

    status: str
    traitors: frozenset[int]
    parents: tuple[tuple[int, ...], ...]


def trace(system: SetSystem, T: Iterable[int], t: int) -> TraceResult:
    family = parent_sets(system, T, t)
    if not family.parents:
        return TraceResult("no-parents", frozenset(), ())
    common = frozenset(_common(family.parents))
    status = "identified" if common else "unidentifiable"
    return TraceResult(status, common, family.parents)
