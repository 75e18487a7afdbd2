"""Canonical signatures of piecewise-linear drivers and discrete group-valued
signals on a time grid."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import CertificationError, DomainError, GridError, IntervalError
from .group import GROUP_TOL, GroupSeries, chen_product, exp_series, get_basis, shuffle_defect
from .words import PiIndex

TIME_TOL = 1e-12


@dataclass(frozen=True)
class PLPath:
    """Piecewise-linear path through ``values[k]`` at ``times[k]``."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        x = np.asarray(self.values, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        if t.ndim != 1 or t.size < 2 or x.shape[0] != t.size:
            raise ValueError("need at least two breakpoints and one value row per time")
        if np.any(np.diff(t) <= 0):
            raise ValueError("times must be strictly increasing")
        t.setflags(write=False)
        x.setflags(write=False)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", x)

    @property
    def d(self) -> int:
        return self.values.shape[1]

    @property
    def start(self) -> float:
        return float(self.times[0])

    @property
    def end(self) -> float:
        return float(self.times[-1])

    def value_at(self, t: float) -> np.ndarray:
        return np.array([np.interp(t, self.times, self.values[:, i]) for i in range(self.d)])

    def points_between(self, s: float, t: float) -> tuple[np.ndarray, np.ndarray]:
        """Breakpoints of the restriction to ``[s, t]`` (endpoints included)."""
        if s > t:
            raise IntervalError(f"need s <= t, got s={s}, t={t}")
        if s < self.start - TIME_TOL or t > self.end + TIME_TOL:
            raise IntervalError(f"[{s}, {t}] not inside [{self.start}, {self.end}]")
        inner = self.times[(self.times > s + TIME_TOL) & (self.times < t - TIME_TOL)]
        ts = np.concatenate(([s], inner, [t])) if t > s else np.array([s])
        xs = np.stack([self.value_at(u) for u in ts])
        return ts, xs

    def scaled(self, factors: Sequence[float]) -> "PLPath":
        return PLPath(self.times, self.values * np.asarray(factors, dtype=float)[None, :])

    def reversed(self) -> "PLPath":
        t = self.times
        return PLPath(t[0] + t[-1] - t[::-1], self.values[::-1])

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("t," + ",".join(f"x{i + 1}" for i in range(self.d)) + "\n")
        for t, row in zip(self.times.tolist(), self.values.tolist()):
            buf.write(",".join(repr(v) for v in [t] + row) + "\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "PLPath":
        rows = [r for r in csv.reader(io.StringIO(text)) if r and not r[0].startswith("#")]
        header, body = rows[0], rows[1:]
        if header[0].strip() != "t":
            raise ValueError("PL path CSV must start with a 't,x1,...,xd' header")
        data = np.array([[float(v) for v in r] for r in body])
        return cls(data[:, 0], data[:, 1:])


def segment_signature(dx, ix: PiIndex, cap: float) -> GroupSeries:
    """Signature of a straight segment: ``prod_j dx^{i_j} / m!``."""
    dx = np.atleast_1d(np.asarray(dx, dtype=float))
    if dx.shape != (ix.d,):
        raise ValueError(f"increment has dimension {dx.shape}, alphabet has {ix.d} letters")
    basis = get_basis(ix, cap)
    ext = np.concatenate(([1.0], dx))
    prod = ext[basis.letters].prod(axis=1)
    return GroupSeries(ix, cap, prod / _factorials(basis.max_length)[basis.lengths])


def _factorials(m: int) -> np.ndarray:
    return np.array([math.factorial(k) for k in range(m + 1)], dtype=float)


def _segments_signature(xs: np.ndarray, ix: PiIndex, cap: float) -> GroupSeries:
    out = GroupSeries.identity(ix, cap)
    for dx in np.diff(xs, axis=0):
        out = chen_product(out, segment_signature(dx, ix, cap))
    return out


def path_signature(x: PLPath, s: float, t: float, ix: PiIndex, cap: float) -> GroupSeries:
    """Signature of ``x`` over ``[s, t]``; query times may fall inside segments."""
    if x.d != ix.d:
        raise ValueError("path dimension does not match the alphabet")
    _, xs = x.points_between(s, t)
    return _segments_signature(xs, ix, cap)


def rescale_signal(X: GroupSeries, norms: Sequence[float]) -> GroupSeries:
    """Multiply the coefficient of ``i_1...i_m`` by ``norms[i_1]...norms[i_m]``."""
    norms = np.asarray(norms, dtype=float)
    if norms.shape != (X.ix.d,):
        raise ValueError("need one norm per letter")
    if np.any(norms < 0):
        raise ValueError("norms must be nonnegative")
    ext = np.concatenate(([1.0], norms))
    return GroupSeries(X.ix, X.cap, X.coeffs * ext[X.basis.letters].prod(axis=1))


class GridSignal:
    """Group-valued increments on consecutive cells of a time grid.

    ``cells[k]`` is the element over ``[grid[k], grid[k+1]]``; increments over
    longer grid intervals are Chen products of consecutive cells.
    """

    def __init__(self, grid, cells: Sequence[GroupSeries]):
        grid = np.asarray(grid, dtype=float)
        if grid.ndim != 1 or np.any(np.diff(grid) <= 0):
            raise GridError("grid must be strictly increasing")
        if len(cells) != grid.size - 1:
            raise GridError("need one cell increment per grid interval")
        self.grid = grid
        self.ix = cells[0].ix if cells else None
        self.cap = cells[0].cap if cells else 0.0
        self.cells = list(cells)
        self.cell_array = np.stack([c.coeffs for c in cells]) if cells else np.zeros((0, 1))

    @property
    def n(self) -> int:
        return self.grid.size

    def locate(self, t: float) -> int:
        k = int(np.searchsorted(self.grid, t))
        for j in (k - 1, k):
            if 0 <= j < self.grid.size and abs(self.grid[j] - t) <= TIME_TOL * max(1.0, abs(t)):
                return j
        raise GridError(f"time {t} is not a grid point")

    def between(self, i: int, j: int) -> GroupSeries:
        """``X_{grid[i], grid[j]}`` by folding cells i..j-1."""
        if i > j:
            raise IntervalError(f"need i <= j, got {i} > {j}")
        out = GroupSeries.identity(self.ix, self.cap)
        for k in range(i, j):
            out = chen_product(out, self.cells[k])
        return out

    def __call__(self, s: float, t: float) -> GroupSeries:
        return self.between(self.locate(s), self.locate(t))

    def rescaled(self, norms: Sequence[float]) -> "GridSignal":
        return GridSignal(self.grid, [rescale_signal(c, norms) for c in self.cells])

    def restricted(self, cap: float) -> "GridSignal":
        return GridSignal(self.grid, [c.restrict(cap) for c in self.cells])

    def sub_grid(self, i: int, j: int) -> "GridSignal":
        return GridSignal(self.grid[i : j + 1], self.cells[i:j])


def refine_grid(points, levels: int) -> np.ndarray:
    """Split every interval of ``points`` into ``2**levels`` equal pieces."""
    points = np.asarray(points, dtype=float)
    parts = 2 ** int(levels)
    fr = np.arange(parts) / parts
    inner = points[:-1, None] + np.diff(points)[:, None] * fr[None, :]
    return np.concatenate((inner.ravel(), points[-1:]))


def lift_on_grid(
    x: PLPath,
    ix: PiIndex,
    cap: float,
    s: Optional[float] = None,
    t: Optional[float] = None,
    refine: int = 2,
    extra_points: Sequence[float] = (),
) -> GridSignal:
    """Lift ``x`` on ``breakpoints(s, t) + extra_points`` refined dyadically ``refine`` times."""
    s = x.start if s is None else s
    t = x.end if t is None else t
    ts, _ = x.points_between(s, t)
    if len(extra_points):
        ts = np.unique(np.concatenate((ts, [u for u in extra_points if s <= u <= t])))
    grid = refine_grid(ts, refine)
    vals = np.stack([np.interp(grid, x.times, x.values[:, i]) for i in range(x.d)], axis=1)
    cells = [segment_signature(dx, ix, cap) for dx in np.diff(vals, axis=0)]
    return GridSignal(grid, cells)


def synthetic_group_path(
    increments: Sequence[GroupSeries],
    times=None,
    ix: Optional[PiIndex] = None,
    cap: Optional[float] = None,
    tol: float = GROUP_TOL,
) -> GridSignal:
    """Multiplicative functional whose k-th cell is ``exp(increments[k])``.

    An empty increment list gives the constant path on ``[0, 1]`` (needs ``ix``
    and ``cap``).
    """
    if not increments:
        if ix is None or cap is None:
            raise ValueError("an empty synthetic path needs ix and cap")
        return GridSignal([0.0, 1.0], [GroupSeries.identity(ix, cap)])
    grid = np.arange(len(increments) + 1, dtype=float) if times is None else np.asarray(times, float)
    cells = []
    for k, v in enumerate(increments):
        if v.coeffs[0] != 0.0:
            raise DomainError("increments must have a zero empty-word coefficient")
        g = exp_series(v)
        defect = shuffle_defect(g, relative=True)
        if defect > tol:
            raise CertificationError(f"increment {k} is not a Lie element (shuffle defect {defect:.3g})")
        cells.append(g)
    return GridSignal(grid, cells)


__all__ = [
    "GridSignal",
    "PLPath",
    "lift_on_grid",
    "path_signature",
    "refine_grid",
    "rescale_signal",
    "segment_signature",
    "synthetic_group_path",
]
