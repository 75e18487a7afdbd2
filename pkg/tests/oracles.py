"""Independent reference computations used only by the tests."""

from __future__ import annotations

import itertools

import numpy as np
from scipy.integrate import solve_ivp


def signature_by_ode(times, values, words, rtol=1e-12, atol=1e-13):
    """Iterated integrals of a piecewise-linear path by integrating
    ``d(S, w i) = (S, w) dx^i`` with an adaptive solver, segment by segment."""
    words = sorted(set(words) | {()}, key=len)
    pos = {w: k for k, w in enumerate(words)}
    for w in words:
        if w and w[:-1] not in pos:
            raise ValueError("word set must be prefix closed")
    S = np.zeros(len(words))
    S[pos[()]] = 1.0
    values = np.asarray(values, float)
    if values.ndim == 1:
        values = values[:, None]
    for k in range(len(times) - 1):
        dt = times[k + 1] - times[k]
        v = (values[k + 1] - values[k]) / dt

        def rhs(_, s):
            out = np.zeros_like(s)
            for w in words:
                if w:
                    out[pos[w]] = s[pos[w[:-1]]] * v[w[-1] - 1]
            return out

        S = solve_ivp(rhs, (0.0, dt), S, method="DOP853", rtol=rtol, atol=atol).y[:, -1]
    return {w: float(S[pos[w]]) for w in words}


def brute_force_variation(increment, grid_idx, power):
    """``max over partitions of sum |increment(a, b)|^power`` by enumeration."""
    inner = grid_idx[1:-1]
    best = -np.inf
    for r in range(len(inner) + 1):
        for pick in itertools.combinations(inner, r):
            pts = [grid_idx[0], *pick, grid_idx[-1]]
            best = max(best, sum(abs(increment(a, b)) ** power for a, b in zip(pts, pts[1:])))
    return best


def prefix_closed(words):
    out = set()
    for w in words:
        for m in range(len(w) + 1):
            out.add(tuple(w[:m]))
    return out
