"""Admissibility checks and Taylor-scheme parameters."""

from __future__ import annotations

import functools
import math
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import InadmissibleError
from .fields import strict_floor
from .words import PiIndex, theta

ADMISSIBLE_SLACK = 1e-9
BETA_TERM_STOP = 1e-14
BETA_K_MAX = 10**6


def beta_series(q: float) -> float:
    """``sum_{k>=2} (2/k)^q`` for ``q > 1``.

    Summed directly until the term drops below 1e-14 (or k = 10^6); the tail is
    the Euler-Maclaurin integral estimate with its first two correction terms.
    """
    if q <= 1:
        raise ValueError("series exponent must exceed 1")
    k_stop = int(min(BETA_K_MAX, max(2.0, math.ceil(2.0 * BETA_TERM_STOP ** (-1.0 / q)))))
    k = np.arange(2, k_stop + 1, dtype=float)
    # pairwise summation from the small end; rounding error ~1e-16 relative
    head = float(np.sum(((2.0 / k) ** q)[::-1]))
    K = float(k_stop)
    g = (2.0 / K) ** q
    # sum_{k>K} g(k) ~ int_K^inf g - g(K)/2 - g'(K)/12, with g' = -q g / x
    tail = 2.0**q * K ** (1.0 - q) / (q - 1.0) - g / 2.0 + q * g / (12.0 * K)
    return head + tail


@functools.lru_cache(maxsize=None)
def beta_constant(p: float) -> float:
    """``p (1 + sum_{k>=2} (2/k)^{([p]+1)/p})``."""
    if p < 1:
        raise ValueError("p must be >= 1")
    q = (math.floor(p) + 1) / p
    return p * (1.0 + beta_series(q))


@dataclass(frozen=True)
class TaylorParams:
    ix: PiIndex
    gamma_list: tuple
    thresholds: tuple
    margins: tuple
    theta: float
    gamma: Optional[float] = None
    N: Optional[int] = None
    beta: Optional[float] = None
    p: Optional[float] = None

    def to_json_dict(self) -> dict:
        out = asdict(self)
        out["ix"] = {"p_list": list(self.ix.p_list), "p": self.ix.uniform_p, "k": list(self.ix.k_list or [])}
        for key in ("gamma_list", "thresholds", "margins"):
            out[key] = list(out[key])
        return out


def euler_thresholds(ix: PiIndex) -> list[float]:
    """``p_max (1 - 1/p_i) + 1``; with ``p_i = p/k_i`` this equals ``p_max (1 - k_i/p) + 1``."""
    return [ix.p_max * (1.0 - q) + 1.0 for q in ix.inv_p]


def admissible_params(ix: PiIndex, gamma_list: Sequence[float]) -> TaylorParams:
    """Validate the Lip indices and derive the scheme parameters.

    Non-uniform gradings only get the Euler-level quantities (thresholds and theta).
    """
    gamma_list = tuple(float(g) for g in gamma_list)
    if len(gamma_list) != ix.d:
        raise InadmissibleError("need one Lip index per letter")
    if any(g <= 0 for g in gamma_list):
        raise InadmissibleError("Lip indices must be positive")
    thr = euler_thresholds(ix)
    if ix.is_uniform:
        # the same threshold written with the integer weights, kept as a cross-check
        thr_t = [ix.p_max * (1.0 - k / ix.uniform_p) + 1.0 for k in ix.k_list]
        assert all(abs(a - b) <= 1e-12 for a, b in zip(thr, thr_t))
    margins = [g - t for g, t in zip(gamma_list, thr)]
    failures = [
        {"component": i + 1, "gamma": g, "threshold": t, "margin": m}
        for i, (g, t, m) in enumerate(zip(gamma_list, thr, margins))
        if m <= ADMISSIBLE_SLACK
    ]
    if failures:
        desc = "; ".join(f"f_{f['component']}: gamma={f['gamma']} needs > {f['threshold']:.12g}" for f in failures)
        raise InadmissibleError(f"inadmissible Lip indices ({desc})", failures)
    th = theta(ix)
    if not ix.is_uniform:
        return TaylorParams(ix, gamma_list, tuple(thr), tuple(margins), th)
    p = ix.uniform_p
    gamma = min((g - 1.0) * p / ix.p_max + k for g, k in zip(gamma_list, ix.k_list))
    N = strict_floor(gamma)
    if N < math.floor(p):
        raise InadmissibleError(f"N={N} below floor(p)={math.floor(p)}; admissibility arithmetic is inconsistent")
    return TaylorParams(ix, gamma_list, tuple(thr), tuple(margins), th, gamma, N, beta_constant(p), p)


__all__ = ["TaylorParams", "admissible_params", "beta_constant", "beta_series", "euler_thresholds"]
