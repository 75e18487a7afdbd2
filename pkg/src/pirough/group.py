"""Truncated series over graded words: Chen product, inverse, dilation,
homogeneous norm, shuffle certification and the truncated exp/log pair.

Coefficients are dense vectors indexed by the canonical word order of
:func:`pirough.words.enumerate_words`; deconcatenation and shuffle tables are
built once per ``(PiIndex, cap)`` and cached.
"""

from __future__ import annotations

import math
from functools import cached_property, lru_cache
from itertools import combinations
from typing import Dict, Iterable, Mapping

import numpy as np

from .errors import DomainError, IncompatibleSeriesError, InvalidWordError, NonUnitalError
from .words import DEG_TOL, EMPTY, PiIndex, Word, degree, enumerate_words, parse_word, weight, word_to_str

GROUP_TOL = 1e-9


class WordBasis:
    """Canonical word list for ``(ix, cap)`` plus precomputed index tables."""

    def __init__(self, ix: PiIndex, cap: float):
        self.ix = ix
        self.cap = float(cap)
        self.words: list[Word] = enumerate_words(ix, cap)
        self.index: Dict[Word, int] = {w: k for k, w in enumerate(self.words)}
        self.size = len(self.words)
        self.degrees = np.array([degree(w, ix) for w in self.words])
        self.lengths = np.array([len(w) for w in self.words], dtype=np.int64)
        self.max_length = int(self.lengths.max())
        letters = np.zeros((self.size, max(self.max_length, 1)), dtype=np.int64)
        for k, w in enumerate(self.words):
            letters[k, : len(w)] = w
        # zero-padded letter matrix; column j holds the j-th letter or 0
        self.letters = letters

    @cached_property
    def weights(self) -> np.ndarray:
        return np.array([weight(w, self.ix) for w in self.words], dtype=np.int64)

    @cached_property
    def splits(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Arrays ``(w, u, v)`` listing every deconcatenation ``uv = w``."""
        ws, us, vs = [], [], []
        for k, w in enumerate(self.words):
            for j in range(len(w) + 1):
                ws.append(k)
                us.append(self.index[w[:j]])
                vs.append(self.index[w[j:]])
        return np.array(ws), np.array(us), np.array(vs)

    @cached_property
    def codes(self) -> np.ndarray:
        return _encode(self.letters, self.ix.d)

    @cached_property
    def shuffle_table(self):
        """Vectorised shuffle data for all pairs with ``|w1| + |w2| <= cap``.

        Returns ``(left, right, terms)`` where ``terms`` is an integer matrix
        of basis indices, one row per pair and one column per interleaving.
        Pairs are grouped by length so the column count is constant within a
        group; the result is a list of such groups.
        """
        base = 1 + self.ix.d
        order = np.argsort(self.codes)
        sorted_codes = self.codes[order]
        by_len = {m: np.flatnonzero(self.lengths == m) for m in range(self.max_length + 1)}
        groups = []
        for m1 in range(self.max_length + 1):
            for m2 in range(m1, self.max_length + 1 - m1):
                i1, i2 = by_len[m1], by_len[m2]
                if i1.size == 0 or i2.size == 0:
                    continue
                dsum = self.degrees[i1][:, None] + self.degrees[i2][None, :]
                if self.ix.is_uniform:
                    wsum = self.weights[i1][:, None] + self.weights[i2][None, :]
                    ok = wsum <= self.cap * self.ix.uniform_p + DEG_TOL
                else:
                    ok = dsum <= self.cap + DEG_TOL
                if m1 == m2:
                    ok &= np.arange(i1.size)[:, None] <= np.arange(i2.size)[None, :]
                a, b = np.nonzero(ok)
                if a.size == 0:
                    continue
                left, right = i1[a], i2[b]
                la = self.letters[left, :m1]
                lb = self.letters[right, :m2]
                cols = []
                for pos in combinations(range(m1 + m2), m1):
                    mask = np.zeros(m1 + m2, dtype=bool)
                    mask[list(pos)] = True
                    merged = np.zeros((left.size, m1 + m2), dtype=np.int64)
                    merged[:, mask] = la
                    merged[:, ~mask] = lb
                    code = np.zeros(left.size, dtype=np.int64)
                    for j in range(m1 + m2 - 1, -1, -1):
                        code = code * base + merged[:, j]
                    cols.append(order[np.searchsorted(sorted_codes, code)])
                groups.append((left, right, np.stack(cols, axis=1)))
        return groups

    def restrict_indices(self, other: "WordBasis") -> np.ndarray:
        """Indices into ``self`` of the words of a smaller basis ``other``."""
        return np.array([self.index[w] for w in other.words], dtype=np.int64)

    def chen_matrix(self, b: np.ndarray) -> np.ndarray:
        """Matrix ``M`` with ``(a b) = a @ M`` for the Chen product."""
        w, u, v = self.splits
        m = np.zeros((self.size, self.size))
        m[u, w] = b[v]
        return m


def _encode(letters: np.ndarray, d: int) -> np.ndarray:
    base = 1 + d
    code = np.zeros(letters.shape[0], dtype=np.int64)
    for j in range(letters.shape[1] - 1, -1, -1):
        code = code * base + letters[:, j]
    return code


@lru_cache(maxsize=128)
def get_basis(ix: PiIndex, cap: float) -> WordBasis:
    return WordBasis(ix, float(cap))


class GroupSeries:
    """Truncated map word -> real over ``{w : |w| <= cap}``."""

    __slots__ = ("ix", "cap", "coeffs", "basis")

    def __init__(self, ix: PiIndex, cap: float, coeffs):
        self.ix = ix
        self.cap = float(cap)
        self.basis = get_basis(ix, self.cap)
        arr = np.array(coeffs, dtype=float)
        if arr.shape != (self.basis.size,):
            raise ValueError(f"expected {self.basis.size} coefficients, got shape {arr.shape}")
        arr.setflags(write=False)
        self.coeffs = arr

    @classmethod
    def identity(cls, ix: PiIndex, cap: float) -> "GroupSeries":
        c = np.zeros(get_basis(ix, cap).size)
        c[0] = 1.0
        return cls(ix, cap, c)

    @classmethod
    def zero(cls, ix: PiIndex, cap: float) -> "GroupSeries":
        return cls(ix, cap, np.zeros(get_basis(ix, cap).size))

    @classmethod
    def from_dict(cls, ix: PiIndex, cap: float, values: Mapping) -> "GroupSeries":
        basis = get_basis(ix, cap)
        c = np.zeros(basis.size)
        for w, val in values.items():
            if isinstance(w, str):
                w = parse_word(w)
            w = ix.check_word(w)
            if w not in basis.index:
                raise InvalidWordError(f"word {word_to_str(w)} exceeds cap {cap}")
            c[basis.index[w]] = val
        return cls(ix, cap, c)

    @property
    def words(self) -> list[Word]:
        return self.basis.words

    def __getitem__(self, w) -> float:
        if isinstance(w, str):
            w = parse_word(w)
        return float(self.coeffs[self.basis.index[tuple(w)]])

    def to_dict(self) -> Dict[Word, float]:
        return {w: float(c) for w, c in zip(self.basis.words, self.coeffs)}

    def restrict(self, cap: float) -> "GroupSeries":
        small = get_basis(self.ix, cap)
        if small.cap > self.cap + DEG_TOL:
            raise IncompatibleSeriesError(f"cannot extend cap {self.cap} to {cap}")
        return GroupSeries(self.ix, cap, self.coeffs[self.basis.restrict_indices(small)])

    def _check(self, other: "GroupSeries"):
        if self.ix != other.ix or self.cap != other.cap:
            raise IncompatibleSeriesError("series have different gradings or caps")

    def __mul__(self, other):
        if isinstance(other, GroupSeries):
            return chen_product(self, other)
        return GroupSeries(self.ix, self.cap, self.coeffs * float(other))

    def __rmul__(self, other):
        return GroupSeries(self.ix, self.cap, self.coeffs * float(other))

    def __add__(self, other: "GroupSeries") -> "GroupSeries":
        self._check(other)
        return GroupSeries(self.ix, self.cap, self.coeffs + other.coeffs)

    def __sub__(self, other: "GroupSeries") -> "GroupSeries":
        self._check(other)
        return GroupSeries(self.ix, self.cap, self.coeffs - other.coeffs)

    def __neg__(self):
        return GroupSeries(self.ix, self.cap, -self.coeffs)

    def max_abs_diff(self, other: "GroupSeries") -> float:
        self._check(other)
        return float(np.max(np.abs(self.coeffs - other.coeffs)))

    def allclose(self, other: "GroupSeries", atol: float = 1e-12) -> bool:
        return self.max_abs_diff(other) <= atol

    def csv_lines(self) -> list[str]:
        return [f"{word_to_str(w)},{c!r}" for w, c in zip(self.basis.words, self.coeffs.tolist())]

    def __repr__(self):
        nz = [(word_to_str(w), round(float(c), 6)) for w, c in zip(self.basis.words, self.coeffs) if c != 0]
        return f"GroupSeries(cap={self.cap}, nonzero={nz[:8]}{'...' if len(nz) > 8 else ''})"


def chen_product(a: GroupSeries, b: GroupSeries) -> GroupSeries:
    """``(ab, w) = sum_{uv=w} (a, u)(b, v)``."""
    a._check(b)
    w, u, v = a.basis.splits
    out = np.bincount(w, weights=a.coeffs[u] * b.coeffs[v], minlength=a.basis.size)
    return GroupSeries(a.ix, a.cap, out)


def inverse(a: GroupSeries) -> GroupSeries:
    """Inverse of a unital series, built level by level in word length."""
    if abs(a.coeffs[0] - 1.0) > 0.0:
        raise NonUnitalError(f"inverse needs (a, e) = 1, got {a.coeffs[0]}")
    basis = a.basis
    w, u, v = basis.splits
    inner = (basis.lengths[u] > 0) & (basis.lengths[v] > 0)
    wi, ui, vi = w[inner], u[inner], v[inner]
    b = -a.coeffs.copy()
    b[0] = 1.0
    wlen = basis.lengths[wi]
    for m in range(2, basis.max_length + 1):
        sel = wlen == m
        if not sel.any():
            continue
        # all proper prefixes u are shorter than m, hence already final
        contrib = np.bincount(wi[sel], weights=b[ui[sel]] * a.coeffs[vi[sel]], minlength=basis.size)
        level = basis.lengths == m
        b[level] -= contrib[level]
    return GroupSeries(a.ix, a.cap, b)


def dilate(a: GroupSeries, lam: float) -> GroupSeries:
    if lam <= 0:
        raise DomainError("dilation factor must be positive")
    return GroupSeries(a.ix, a.cap, a.coeffs * lam ** (a.ix.p_max * a.basis.degrees))


def homogeneous_norm(a: GroupSeries) -> float:
    """``sum_{0<|w|<=1} |(a,w)|^{1/(p_max |w|)}``."""
    deg = a.basis.degrees
    sel = (deg > 0) & (deg <= 1.0 + DEG_TOL)
    vals = np.abs(a.coeffs[sel]) ** (1.0 / (a.ix.p_max * deg[sel]))
    return float(vals.sum())


def shuffle_defect(a: GroupSeries, relative: bool = False) -> float:
    """Largest violation of ``(a,w1)(a,w2) = (a, w1 sh w2)`` over pairs within cap.

    With ``relative=True`` the defect is divided by ``max(1, max|coef|)``.
    """
    worst = 0.0
    c = a.coeffs
    for left, right, terms in a.basis.shuffle_table:
        lhs = c[left] * c[right]
        rhs = c[terms].sum(axis=1)
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    if relative:
        worst /= max(1.0, float(np.max(np.abs(c))))
    return worst


def is_group_like(a: GroupSeries, tol: float = GROUP_TOL) -> bool:
    return abs(a.coeffs[0] - 1.0) <= tol and shuffle_defect(a, relative=True) <= tol


def _nilpotency_bound(a: GroupSeries) -> int:
    return int(math.floor(a.cap / a.ix.min_letter_degree + DEG_TOL)) + 1


def exp_series(v: GroupSeries) -> GroupSeries:
    """Truncated concatenation exponential ``sum_k v^k / k!``."""
    if v.coeffs[0] != 0.0:
        raise DomainError("exp_series needs a zero empty-word coefficient")
    out = GroupSeries.identity(v.ix, v.cap)
    term = out
    for k in range(1, _nilpotency_bound(v) + 1):
        term = chen_product(term, v) * (1.0 / k)
        if not term.coeffs.any():
            break
        out = out + term
    return out


def log_series(a: GroupSeries) -> GroupSeries:
    """Truncated logarithm ``sum_k (-1)^{k+1} (a - e)^k / k``."""
    if abs(a.coeffs[0] - 1.0) > 0.0:
        raise DomainError("log_series needs (a, e) = 1")
    x = a - GroupSeries.identity(a.ix, a.cap)
    out = GroupSeries.zero(a.ix, a.cap)
    power = GroupSeries.identity(a.ix, a.cap)
    for k in range(1, _nilpotency_bound(a) + 1):
        power = chen_product(power, x)
        if not power.coeffs.any():
            break
        out = out + power * ((-1.0) ** (k + 1) / k)
    return out


def from_letters(ix: PiIndex, cap: float, values: Iterable[float]) -> GroupSeries:
    """Lie element ``sum_i values[i] * (letter i)``."""
    vals = list(values)
    return GroupSeries.from_dict(ix, cap, {(i + 1,): x for i, x in enumerate(vals)})


__all__ = [
    "EMPTY",
    "GROUP_TOL",
    "GroupSeries",
    "WordBasis",
    "chen_product",
    "dilate",
    "exp_series",
    "from_letters",
    "get_basis",
    "homogeneous_norm",
    "inverse",
    "is_group_like",
    "log_series",
    "shuffle_defect",
]
