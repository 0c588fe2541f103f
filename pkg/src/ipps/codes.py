"""q-ary parent-identifying codes and the Kautz-Singleton map to set systems.

Code length is called ``length`` here; ``n`` is kept for the ground-set size
of set systems.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterable, Sequence

from .core import SetSystem, ValidationError, VerificationReport, encode_point

Word = tuple[int, ...]

IPPC_MAX_WORDS = 16
IPPC_MAX_T = 3


@dataclass(frozen=True)
class Code:
    q: int
    length: int
    words: tuple[Word, ...]

    def __post_init__(self):
        words = tuple(tuple(w) for w in self.words)
        object.__setattr__(self, "words", words)
        if self.q < 1 or self.length < 1:
            raise ValidationError("schema", "q and length must be positive")
        seen = set()
        for idx, w in enumerate(words):
            if len(w) != self.length:
                raise ValidationError("wrong-length", f"word {idx} has length {len(w)}", f"words[{idx}]")
            if any(not 1 <= s <= self.q for s in w):
                raise ValidationError("symbol-out-of-range", f"word {idx} uses a symbol outside [1, {self.q}]", f"words[{idx}]")
            if w in seen:
                raise ValidationError("duplicate-word", f"word {idx} repeats an earlier word", f"words[{idx}]")
            seen.add(w)

    def __len__(self) -> int:
        return len(self.words)

    def subcode(self, indices: Iterable[int]) -> "Code":
        return Code(self.q, self.length, tuple(self.words[i] for i in indices))


def word_str(word: Word, q: int) -> str | list[int]:
    """``1123``-style strings for q <= 9, integer lists otherwise."""
    return "".join(str(s) for s in word) if q <= 9 else list(word)


def code_to_dict(code: Code) -> dict:
    return {"q": code.q, "length": code.length, "words": [word_str(w, code.q) for w in code.words]}


def serialize_code(code: Code) -> str:
    return json.dumps(code_to_dict(code), separators=(",", ":")) + "\n"


def parse_code(text: str) -> Code:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError("malformed", str(exc)) from exc
    if not isinstance(raw, dict) or not all(key in raw for key in ("q", "length", "words")):
        raise ValidationError("schema", "code needs q, length and words")
    words = []
    for idx, w in enumerate(raw["words"]):
        if isinstance(w, str):
            if not w.isdigit():
                raise ValidationError("schema", f"bad word {w!r}", f"words[{idx}]")
            words.append(tuple(int(c) for c in w))
        elif isinstance(w, list) and all(isinstance(s, int) for s in w):
            words.append(tuple(w))
        else:
            raise ValidationError("schema", f"bad word {w!r}", f"words[{idx}]")
    return Code(int(raw["q"]), int(raw["length"]), tuple(words))


def desc(words: Sequence[Word]) -> set[Word]:
    """Every word whose i-th symbol is the i-th symbol of some member."""
    words = list(words)
    if not words:
        raise ValueError("desc of an empty coalition")
    columns = [sorted({w[i] for w in words}) for i in range(len(words[0]))]
    return set(itertools.product(*columns))


def _covers(coalition: Sequence[Word], d: Word) -> bool:
    return all(any(w[i] == s for w in coalition) for i, s in enumerate(d))


def verify_ippc_bruteforce(code: Code, t: int) -> VerificationReport:
    """Definition check for codes, with descendants drawn from small coalitions only.

    The witness is the smallest failing descendant word.
    """
    if t < 1:
        raise ValueError("t must be >= 1")
    if len(code) > IPPC_MAX_WORDS or t > IPPC_MAX_T:
        raise ValueError(f"brute force limited to {IPPC_MAX_WORDS} words and t<={IPPC_MAX_T}")
    coalitions = [
        combo for size in range(1, t + 1) for combo in itertools.combinations(range(len(code)), size)
    ]
    candidates = set()
    for combo in coalitions:
        candidates |= desc([code.words[i] for i in combo])
    examined = 0
    for d in sorted(candidates):
        examined += 1
        parents = [combo for combo in coalitions if _covers([code.words[i] for i in combo], d)]
        common = set(parents[0]).intersection(*parents[1:])
        if not common:
            witness = {
                "d": word_str(d, code.q),
                "parent_sets": [[word_str(code.words[i], code.q) for i in p] for p in parents],
                "parent_indices": [list(p) for p in parents],
            }
            return VerificationReport("IPPC-def", "fail", witness, {"examined": examined, "pruned": 0})
    return VerificationReport("IPPC-def", "pass", None, {"examined": examined, "pruned": 0})


def check_ippc_witness(code: Code, witness: dict, t: int) -> bool:
    d = witness["d"]
    d = tuple(int(c) for c in d) if isinstance(d, str) else tuple(d)
    parents = []
    for size in range(1, t + 1):
        for combo in itertools.combinations(range(len(code)), size):
            if d in desc([code.words[i] for i in combo]):
                parents.append(set(combo))
    return bool(parents) and not set.intersection(*parents)


def kautz_singleton(code: Code) -> SetSystem:
    """One block ``{(i, w_i)}`` per word over the ground set ``[length] x [q]``."""
    V = code.q
    blocks = [
        tuple(sorted(encode_point((i + 1, s), V) for i, s in enumerate(w))) for w in code.words
    ]
    return SetSystem(code.length * code.q, code.length, tuple(blocks), (code.length, code.q))


def hamming_ternary() -> Code:
    """The ternary Hamming code of length 4 (nine words)."""
    words = ["1111", "1222", "1333", "2123", "2231", "2312", "3132", "3213", "3321"]
    return Code(3, 4, tuple(tuple(int(c) for c in w) for w in words))


def agreement(u: Word, v: Word) -> int:
    return sum(a == b for a, b in zip(u, v))
