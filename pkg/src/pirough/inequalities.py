"""Numeric certifiers for the inequalities behind the Taylor estimate."""

from __future__ import annotations

import math
from typing import Optional

import numpy as np

from .group import GroupSeries
from .params import TaylorParams, beta_constant
from .taylor import frac_factorial
from .words import Word, weight

DECAY_SLACK = 1e-12
NEO_EQ_TOL = 1e-12


def factorial_decay_check(Xbar: GroupSeries, l: Word, params: TaylorParams, omega: float) -> dict:
    """``|(X, l)| <= beta^{||l||-1} omega^{||l||/p} / (||l||/p)!``."""
    l = tuple(l)
    n = weight(l, params.ix)
    lhs = abs(Xbar[l])
    rhs = params.beta ** (n - 1) * omega ** (n / params.p) / frac_factorial(n / params.p)
    return {"word": l, "weight": n, "lhs": lhs, "rhs": rhs, "passed": lhs <= rhs + DECAY_SLACK}


def neoclassical_terms(p: float, n: int, s: float, t: float) -> tuple[float, float]:
    j = np.arange(n + 1)
    a, b = j / p, (n - j) / p
    terms = np.array([s**x * t**y / (frac_factorial(x) * frac_factorial(y)) for x, y in zip(a, b)])
    lhs = math.fsum(terms.tolist()) / p**2
    rhs = (s + t) ** (n / p) / frac_factorial(n / p)
    return lhs, rhs


def neoclassical_check(p: float, n: int, s: float, t: float) -> dict:
    """``p^{-2} sum_j s^{j/p} t^{(n-j)/p} / ((j/p)! ((n-j)/p)!) <= (s+t)^{n/p} / (n/p)!``."""
    if p < 1 or s < 0 or t < 0 or n < 0:
        raise ValueError("need p >= 1, s, t >= 0 and n >= 0")
    lhs, rhs = neoclassical_terms(p, n, s, t)
    gap = abs(lhs - rhs)
    return {
        "p": p,
        "n": n,
        "s": s,
        "t": t,
        "lhs": lhs,
        "rhs": rhs,
        "passed": lhs <= rhs * (1 + NEO_EQ_TOL) + NEO_EQ_TOL,
        "equal": gap <= NEO_EQ_TOL * max(1.0, rhs),
    }


def kershaw_ratio_check(p: float, N_max: int, beta: Optional[float] = None) -> dict:
    """Boundedness of ``sum_{j<=N} a_j / a_{N+1}`` with ``a_j = (j-1)! beta^{j-1} / (j/p)!``.

    Works in log space. Also reports the geometric constant ``C_p`` with
    ``a_j <= C_p lambda^{N+1-j} a_{N+1}``, ``lambda = (1/beta + 1)/2``, and
    the constant ``max_N 1/a_{N+1}``.
    """
    if N_max < 2:
        raise ValueError("N_max must be at least 2")
    beta = beta_constant(p) if beta is None else float(beta)
    j = np.arange(1, N_max + 2)
    log_a = np.array([math.lgamma(k) + (k - 1) * math.log(beta) - math.lgamma(k / p + 1) for k in j])
    ratios = []
    for N in range(1, N_max + 1):
        la = log_a[:N] - log_a[N]
        ratios.append(float(np.exp(la).sum()))
    ratios = np.array(ratios)
    lam = 0.5 * (1.0 / beta + 1.0)
    cp = 0.0
    for N in range(1, N_max + 1):
        k = np.arange(1, N + 1)
        cp = max(cp, float(np.max(np.exp(log_a[:N] - log_a[N] - (N + 1 - k) * math.log(lam)))))
    inc = np.diff(log_a) > 0
    growth_from = N_max + 1
    for k in range(len(inc) - 1, -1, -1):
        if not inc[k]:
            break
        growth_from = k + 1
    tail = ratios[len(ratios) // 2 :]
    return {
        "p": p,
        "beta": beta,
        "N": list(range(1, N_max + 1)),
        "log_a": log_a.tolist(),
        "ratios": ratios.tolist(),
        "C_ratio": float(ratios.max()),
        "C_geometric": cp,
        "C_inner9": float(np.max(np.exp(-log_a[1:]))),
        "growth_from": growth_from,
        "passed": bool(
            np.all(np.isfinite(ratios))
            and growth_from <= N_max
            and np.all(np.diff(tail) <= 1e-12 * max(1.0, float(ratios.max())))
        ),
    }


__all__ = ["factorial_decay_check", "kershaw_ratio_check", "neoclassical_check", "neoclassical_terms"]
