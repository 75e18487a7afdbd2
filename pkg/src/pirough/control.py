"""Grid-restricted word variations and the control ``omega``.

For a word ``w`` with ``0 < |w| <= 1`` the variation over ``[s, t]`` is the
supremum of ``sum_k |(X_{t_k, t_{k+1}}, w)|^{1/|w|}`` over partitions drawn
from the grid. It is computed by dynamic programming over the last partition
point, so it is a lower bound of the true supremum that can only grow when the
grid is refined.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from .errors import CellTooLargeError, GridError, IntervalError
from .group import get_basis
from .lift import GridSignal
from .words import DEG_TOL, Word, word_to_str

TIE_TOL = 1e-12


class ControlGrid:
    """Variation and control computations for one grid signal."""

    def __init__(self, signal: GridSignal, cap: float = 1.0):
        if signal.cap + DEG_TOL < cap:
            raise GridError(f"signal cap {signal.cap} is below the control cap {cap}")
        self.signal = signal if signal.cap == cap else signal.restricted(cap)
        self.grid = signal.grid
        self.basis = get_basis(signal.ix, cap)
        deg = self.basis.degrees
        self.word_idx = np.flatnonzero(deg > 0)
        self.words: list[Word] = [self.basis.words[k] for k in self.word_idx]
        self.inv_deg = 1.0 / deg[self.word_idx]
        self._cell_mats = None
        self._rows: dict[int, np.ndarray] = {}
        self._table: Optional[np.ndarray] = None

    @property
    def n(self) -> int:
        return self.grid.size

    def _mats(self):
        if self._cell_mats is None:
            self._cell_mats = [self.basis.chen_matrix(c) for c in self.signal.cell_array]
        return self._cell_mats

    def _powers(self, rows: np.ndarray) -> np.ndarray:
        return np.abs(rows[:, self.word_idx]) ** self.inv_deg[None, :]

    def from_start(self, a: int) -> np.ndarray:
        """``V[j, k]``: variation of word ``k`` over ``[grid[a], grid[j]]`` (zero for j <= a)."""
        if a in self._rows:
            return self._rows[a]
        mats = self._mats()
        n, nw = self.n, len(self.words)
        e = np.zeros(self.basis.size)
        e[0] = 1.0
        V = np.zeros((n, nw))
        R = e[None, :]
        for j in range(a + 1, n):
            # rows of R are X_{grid[i], grid[j]} for i = a..j-1
            R = R @ mats[j - 1]
            V[j] = np.max(V[a:j] + self._powers(R), axis=0)
            R = np.vstack((R, e))
        self._rows[a] = V
        return V

    def table(self) -> np.ndarray:
        """All-pairs table ``T[s, t, k]`` of word variations (s <= t)."""
        if self._table is not None:
            return self._table
        mats = self._mats()
        n, nw = self.n, len(self.words)
        e = np.zeros(self.basis.size)
        e[0] = 1.0
        T = np.zeros((n, n, nw))
        R = np.zeros((0, self.basis.size))
        idx = np.arange(n)
        for j in range(1, n):
            R = np.vstack((R, e)) @ mats[j - 1]
            A = self._powers(R)  # (j, nw), row i is X_{i, j}
            cand = T[:j, :j, :] + A[None, :, :]
            cand[idx[:j, None] > idx[None, :j]] = -np.inf
            T[:j, j, :] = cand.max(axis=1)
        self._table = T
        return T

    def _index(self, s: float, t: float) -> tuple[int, int]:
        i, j = self.signal.locate(s), self.signal.locate(t)
        if i > j:
            raise IntervalError(f"need s <= t, got {s} > {t}")
        return i, j

    def _word_col(self, w: Word) -> int:
        w = tuple(w)
        try:
            return self.words.index(w)
        except ValueError:
            raise GridError(f"word {word_to_str(w)} is not a nonempty word of degree <= cap") from None

    def word_variation(self, w: Word, s: float, t: float) -> float:
        i, j = self._index(s, t)
        return float(self.from_start(i)[j, self._word_col(w)])

    def omega(self, s: float, t: float) -> float:
        i, j = self._index(s, t)
        return float(self.from_start(i)[j].sum())

    def omega_from(self, s: float) -> np.ndarray:
        """``omega(s, grid[j])`` for every grid index ``j``."""
        return self.from_start(self.signal.locate(s)).sum(axis=1)

    def omega_table(self) -> np.ndarray:
        return self.table().sum(axis=2)

    def word_partition(self, w: Word, s: float, t: float) -> list[float]:
        """An optimal partition for one word, preferring fewer pieces on ties."""
        i0, j0 = self._index(s, t)
        col = self._word_col(w)
        mats = self._mats()
        e = np.zeros(self.basis.size)
        e[0] = 1.0
        n = self.n
        val = np.full(n, -np.inf)
        pieces = np.zeros(n, dtype=np.int64)
        prev = np.full(n, -1, dtype=np.int64)
        val[i0] = 0.0
        R = e[None, :]
        for j in range(i0 + 1, j0 + 1):
            R = R @ mats[j - 1]
            a = np.abs(R[:, self.word_idx[col]]) ** self.inv_deg[col]
            cand = val[i0:j] + a
            best = cand.max()
            ties = np.flatnonzero(cand >= best - TIE_TOL)
            pick = ties[np.argmin(pieces[i0:j][ties])]
            val[j] = best
            prev[j] = i0 + pick
            pieces[j] = pieces[i0 + pick] + 1
            R = np.vstack((R, e))
        out = [j0]
        while out[-1] != i0:
            out.append(int(prev[out[-1]]))
        return [float(self.grid[k]) for k in reversed(out)]

    def split_by_control(self, s: float, t: float, budget: float) -> list[float]:
        """Greedy partition of ``[s, t]`` into grid intervals with ``omega <= budget``.

        All pieces but the last are as long as the grid allows.
        """
        if budget <= 0:
            raise ValueError("budget must be positive")
        i, j = self._index(s, t)
        points = [i]
        a = i
        while a < j:
            om = self.omega_from(self.grid[a])
            ok = np.flatnonzero(om[a + 1 : j + 1] <= budget + TIE_TOL)
            if ok.size == 0:
                cell = (float(self.grid[a]), float(self.grid[a + 1]))
                raise CellTooLargeError(
                    f"grid cell {cell} has omega {om[a + 1]:.6g} > budget {budget}", cell, float(om[a + 1])
                )
            # omega is nondecreasing in t, so the feasible set is a prefix
            a = a + 1 + int(ok[-1])
            points.append(a)
        return [float(self.grid[k]) for k in points]


def word_variation(signal: GridSignal, w: Word, s: float, t: float) -> float:
    return ControlGrid(signal).word_variation(w, s, t)


def control_omega(signal: GridSignal, s: float, t: float, cap: float = 1.0) -> float:
    return ControlGrid(signal, cap).omega(s, t)


def split_by_control(signal: GridSignal, s: float, t: float, budget: float) -> list[float]:
    return ControlGrid(signal).split_by_control(s, t, budget)


def variation_rows(cg: ControlGrid, pairs: Sequence[tuple[int, int]]) -> list[tuple[float, float, str, float]]:
    rows = []
    for i, j in pairs:
        V = cg.from_start(i)[j]
        for k, w in enumerate(cg.words):
            rows.append((float(cg.grid[i]), float(cg.grid[j]), word_to_str(w), float(V[k])))
    return rows


__all__ = ["ControlGrid", "control_omega", "split_by_control", "variation_rows", "word_variation"]
