"""Named drivers and test families used by the experiments and the suite."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, Optional

import numpy as np

from .fields import ExpDecay, Polynomial, Trig, VectorField, rotation
from .lift import PLPath
from .words import PiIndex


def triangle(t):
    """Distance to the nearest integer."""
    return np.abs(t - np.round(t))


def takagi(t, hurst: float, levels: int, shift: float = 0.0):
    """``sum_{j<=levels} 2^{-j H} triangle(2^j t + shift)``."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    for j in range(levels + 1):
        out += 2.0 ** (-j * hurst) * triangle(2.0**j * t + shift)
    return out


def takagi_path(hurst: float = 0.5, levels: int = 9, amplitude: float = 1.0, shifts=(0.0,), T: float = 1.0) -> PLPath:
    """Piecewise-linear fractal path, one coordinate per shift.

    With shifts in quarter units every component is exactly linear between
    multiples of ``2^{-(levels+2)} T``, so sampling there loses nothing.
    """
    nseg = 2 ** (levels + 2)
    t = np.linspace(0.0, T, nseg + 1)
    cols = [amplitude * (takagi(t / T, hurst, levels, s) - takagi(0.0, hurst, levels, s)) for s in shifts]
    return PLPath(t, np.stack(cols, axis=1))


def drift_lift(path: PLPath, rate: float = 1.0) -> PLPath:
    """Append a drift coordinate ``rate * (t - t_0)``."""
    drift = rate * (path.times - path.times[0])
    return PLPath(path.times, np.column_stack((path.values, drift)))


def self_similar_path(end, knots, exponents, depth: int = 24, T: float = 1.0) -> PLPath:
    """Path with ``x(t/2) = diag(2^{-a}) x(t)`` on ``[0, T]``, ``a = exponents``.

    ``knots`` are ``(u, value)`` pairs with ``0 < u < 1`` describing the piece on
    ``[T/2, T]``; that piece runs from ``diag(2^{-a}) end`` to ``end``. Copies are
    stacked ``depth`` times towards 0 and the innermost gap is a straight segment,
    so signatures over ``[0, 2^{-k} T]`` are exact graded dilations for ``k`` well
    below ``depth``.
    """
    end = np.asarray(end, dtype=float)
    lam = 2.0 ** (-np.asarray(exponents, dtype=float))
    us = [0.0] + [float(u) for u, _ in knots] + [1.0]
    gs = [lam * end] + [np.asarray(v, dtype=float) for _, v in knots] + [end]
    times, values = [0.0], [np.zeros_like(end)]
    for k in range(depth - 1, -1, -1):
        a = T * 2.0 ** (-k)
        for u, g in zip(us, gs):
            if u == 0.0 and k < depth - 1:
                continue
            times.append(a * (0.5 + 0.5 * u))
            values.append(lam**k * g)
    return PLPath(np.array(times), np.stack(values))


def random_pl_path(rng: np.random.Generator, d: int, n_segments: int, scale: float = 1.0) -> PLPath:
    times = np.concatenate(([0.0], np.cumsum(rng.uniform(0.2, 1.0, n_segments))))
    steps = rng.uniform(-scale, scale, (n_segments, d))
    values = np.vstack((np.zeros(d), np.cumsum(steps, axis=0)))
    return PLPath(times, values)


def l_path() -> PLPath:
    return PLPath([0.0, 1.0, 2.0], [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]])


@dataclass
class Family:
    """A driver, a field, a grading and a starting point for nested-interval runs."""

    name: str
    ix: PiIndex
    field: VectorField
    path: PLPath
    xi: np.ndarray
    s: float
    t: float
    N: Optional[int] = None

    def ends(self, levels: int = 7) -> list[float]:
        return [self.s + 2.0 ** (-k) * (self.t - self.s) for k in range(levels)]


def homogeneous_rotation_poly() -> Family:
    """p = 2, d = 2: rotation plus a quadratic field, N = 3.

    The driver is self-similar at 0 under the dilation with ``lambda = 2^{-1/2}``
    per halving of time, so on nested intervals ``[0, 2^{-k}]`` the control
    halves exactly and the next Taylor term scales like ``omega^2``.
    """
    ix = PiIndex.homogeneous(2.0, 2)
    f2 = Polynomial(2, [(0, 0.5, (0, 0)), (0, 0.3, (1, 1)), (1, 0.2, (2, 0)), (1, -0.2, (0, 1))])
    field = VectorField([rotation(1.0), f2], [3.5, 3.5], [[-2.5, 2.5], [-2.5, 2.5]])
    a = 0.3
    knots = [(0.3, [1.2 * a, 0.9 * a]), (0.6, [0.3 * a, 0.8 * a]), (0.8, [1.3 * a, -0.2 * a])]
    path = self_similar_path([a, 0.3 * a], knots, [0.5, 0.5])
    return Family("homogeneous_rotation_poly", ix, field, path, np.array([1.0, 0.0]), 0.0, 1.0, 3)


def inhomogeneous_drift() -> Family:
    """Pi = (2, 1), p = 2, k = (1, 2): oscillating first driver plus drift, N = 2.

    ``x^1`` is self-similar with exponent 1/2 and ``x^2 = t``, matching the
    graded dilation of this grading.
    """
    ix = PiIndex.uniform(2.0, (1, 2))
    f1 = Trig([0.8, 0.6], [0.0, 1.0], 0.3)
    f2 = ExpDecay([0.5, -0.4], [0.3, 0.2])
    field = VectorField([f1, f2], [2.5, 1.5], [[-3.0, 3.0], [-3.0, 3.0]])
    a = 0.5
    x1 = self_similar_path([a], [(0.25, [1.8 * a]), (0.5, [-0.6 * a]), (0.75, [1.4 * a])], [0.5])
    path = drift_lift(x1, 1.0)
    return Family("inhomogeneous_drift", ix, field, path, np.array([0.2, -0.1]), 0.0, 1.0, 2)


def exp_sharpness(t: float = 0.5) -> Family:
    """``dy = e^{-y} dt``, ``y_0 = 0``; the field has unit Lip norms on ``y >= 0``."""
    ix = PiIndex.homogeneous(1.0, 1)
    field = VectorField([ExpDecay([1.0], [1.0])], [3.0], [[0.0, 10.0]])
    path = PLPath([0.0, t], [[0.0], [t]])
    return Family("exp_sharpness", ix, field, path, np.array([0.0]), 0.0, t, 2)


REGISTRY: Dict[str, Callable[[], Family]] = {
    "homogeneous_rotation_poly": homogeneous_rotation_poly,
    "inhomogeneous_drift": inhomogeneous_drift,
    "exp_sharpness": exp_sharpness,
}
