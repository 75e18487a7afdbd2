"""Alphabet, fractional word grading and shuffle combinatorics.

Letters are 1-based integers ``1..d`` and a word is a plain tuple of letters;
the empty tuple is the empty word. A letter ``i`` has degree ``1/p_i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Iterable, Optional, Sequence, Tuple

from .errors import CapacityError, InvalidWordError, UnsupportedGradingError

Word = Tuple[int, ...]
WordSum = Dict[Word, int]

EMPTY: Word = ()
DEG_TOL = 1e-9
DEFAULT_WORD_LIMIT = 200_000


@dataclass(frozen=True)
class PiIndex:
    """Grading context ``(p_1, ..., p_d)``.

    Build with ``PiIndex((2.0, 1.0))`` for a general grading, or with
    :meth:`uniform` when every ``p_i = p / k_i`` so that integer weights are
    available.
    """

    p_list: Tuple[float, ...]
    uniform_p: Optional[float] = None
    k_list: Optional[Tuple[int, ...]] = None
    inv_p: Tuple[float, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        p_list = tuple(float(p) for p in self.p_list)
        if not p_list:
            raise ValueError("alphabet must have at least one letter")
        if any(not math.isfinite(p) or p < 1.0 for p in p_list):
            raise ValueError(f"every p_i must be a finite real >= 1, got {p_list}")
        object.__setattr__(self, "p_list", p_list)
        if (self.uniform_p is None) != (self.k_list is None):
            raise ValueError("uniform_p and k_list must be given together")
        if self.uniform_p is not None:
            p = float(self.uniform_p)
            k = tuple(int(k) for k in self.k_list)
            if len(k) != len(p_list):
                raise ValueError("k_list must have one entry per letter")
            if any(ki < 1 or ki > math.floor(p) for ki in k):
                raise ValueError(f"k_i must lie in 1..floor(p)={math.floor(p)}, got {k}")
            if any(pi != p / ki for pi, ki in zip(p_list, k)):
                raise ValueError("p_list must equal p / k_i exactly")
            object.__setattr__(self, "uniform_p", p)
            object.__setattr__(self, "k_list", k)
        object.__setattr__(self, "inv_p", tuple(1.0 / p for p in p_list))

    @classmethod
    def uniform(cls, p: float, k_list: Sequence[int]) -> "PiIndex":
        p = float(p)
        k_list = tuple(int(k) for k in k_list)
        return cls(tuple(p / k for k in k_list), p, k_list)

    @classmethod
    def homogeneous(cls, p: float, d: int) -> "PiIndex":
        return cls.uniform(p, (1,) * d)

    @property
    def d(self) -> int:
        return len(self.p_list)

    @property
    def p_max(self) -> float:
        return max(self.p_list)

    @property
    def is_uniform(self) -> bool:
        return self.uniform_p is not None

    @property
    def min_letter_degree(self) -> float:
        return min(self.inv_p)

    def check_word(self, w: Iterable[int]) -> Word:
        w = tuple(w)
        for letter in w:
            if not isinstance(letter, int) or letter < 1 or letter > self.d:
                raise InvalidWordError(f"letter {letter!r} outside 1..{self.d} in word {w!r}")
        return w


def degree(w: Word, ix: PiIndex) -> float:
    """``|w| = sum_j 1/p_{i_j}``; zero for the empty word."""
    w = ix.check_word(w)
    # fsum is exactly rounded, so the result does not depend on letter order
    return math.fsum(ix.inv_p[i - 1] for i in w)


def weight(w: Word, ix: PiIndex) -> int:
    """Integer weight ``||w|| = sum_j k_{i_j}`` (uniform gradings only)."""
    if not ix.is_uniform:
        raise UnsupportedGradingError("weight needs a uniform grading p_i = p / k_i")
    w = ix.check_word(w)
    return sum(ix.k_list[i - 1] for i in w)


def within_cap(w: Word, ix: PiIndex, cap: float) -> bool:
    if ix.is_uniform:
        return weight(w, ix) <= cap * ix.uniform_p + DEG_TOL
    return degree(w, ix) <= cap + DEG_TOL


def word_key(w: Word, ix: PiIndex):
    grade = weight(w, ix) if ix.is_uniform else degree(w, ix)
    return (grade, len(w), w)


@lru_cache(maxsize=256)
def _enumerate(ix: PiIndex, cap: float, limit: int) -> Tuple[Word, ...]:
    words = [EMPTY]
    frontier = [EMPTY]
    while frontier:
        nxt = []
        for w in frontier:
            for i in range(1, ix.d + 1):
                u = w + (i,)
                if within_cap(u, ix, cap):
                    nxt.append(u)
        words.extend(nxt)
        if len(words) > limit:
            raise CapacityError(
                f"more than {limit} words with degree <= {cap} for {ix.p_list}"
            )
        frontier = nxt
    words.sort(key=lambda w: word_key(w, ix))
    return tuple(words)


def enumerate_words(ix: PiIndex, cap: float, limit: int = DEFAULT_WORD_LIMIT) -> list[Word]:
    """All words with degree at most ``cap`` in canonical (degree, length, lex) order."""
    if cap < 0:
        raise ValueError("cap must be nonnegative")
    return list(_enumerate(ix, float(cap), int(limit)))


@lru_cache(maxsize=65536)
def _shuffle(a: Word, b: Word) -> Tuple[Tuple[Word, int], ...]:
    if not a:
        return ((b, 1),)
    if not b:
        return ((a, 1),)
    out: Dict[Word, int] = {}
    for w, c in _shuffle(a[1:], b):
        key = (a[0],) + w
        out[key] = out.get(key, 0) + c
    for w, c in _shuffle(a, b[1:]):
        key = (b[0],) + w
        out[key] = out.get(key, 0) + c
    return tuple(out.items())


def shuffle(w1: Word, w2: Word) -> WordSum:
    """Shuffle product as a map word -> integer multiplicity."""
    return dict(_shuffle(tuple(w1), tuple(w2)))


def concat(u: Word, v: Word) -> Word:
    return tuple(u) + tuple(v)


def theta(ix: PiIndex) -> float:
    """Smallest word degree strictly above one.

    Any word of degree > 1 has a prefix of degree <= 1 followed by one letter,
    so it suffices to scan one-letter extensions of that finite set.
    """
    best = math.inf
    for w in enumerate_words(ix, 1.0):
        base = degree(w, ix)
        for i in range(1, ix.d + 1):
            dg = math.fsum((base, ix.inv_p[i - 1]))
            if dg > 1.0 + DEG_TOL and dg < best:
                best = dg
    return best


def word_to_str(w: Word) -> str:
    if not w:
        return "e"
    if any(i > 9 for i in w):
        return ".".join(str(i) for i in w)
    return "".join(str(i) for i in w)


def parse_word(s: str) -> Word:
    s = s.strip()
    if s in ("e", ""):
        return EMPTY
    try:
        if "." in s:
            return tuple(int(c) for c in s.split("."))
        return tuple(int(c) for c in s)
    except ValueError:
        raise InvalidWordError(f"cannot parse word {s!r}") from None
