"""Vector fields with exact derivative evaluators and the composed derivatives F^w.

Every component ``f : R^n -> R^n`` can produce its Taylor jet at a point,
``c_alpha = d^alpha f(y) / alpha!`` for all multi-indices ``|alpha| <= K``.
Jets are stored as arrays whose first axis runs over monomials in graded
order, so truncating to a lower order is a prefix slice. The derivation
``f(phi) = (D phi) f`` acts on jets exactly, which gives

    F^{i w} = (D F^w) f_i,    F^e = I,

without finite differences.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np

from .errors import CapabilityError, DomainError, NormalizationRequiredError, UnsupportedGradingError
from .words import PiIndex, Word, weight

BOX_TOL = 1e-12


class Monomials:
    """Graded monomial tables in ``n`` variables up to total degree ``L``."""

    def __init__(self, n: int, L: int):
        self.n, self.L = n, L
        exps = []
        for deg in range(L + 1):
            for c in itertools.combinations_with_replacement(range(n), deg):
                e = [0] * n
                for j in c:
                    e[j] += 1
                exps.append(tuple(e))
        self.exps = np.array(exps, dtype=np.int64).reshape(len(exps), n)
        self.index = {e: k for k, e in enumerate(exps)}
        self.degrees = self.exps.sum(axis=1)
        self.counts = np.array([int(np.sum(self.degrees <= K)) for K in range(L + 1)])
        self.alpha_fact = np.array([np.prod([math.factorial(int(a)) for a in e]) for e in self.exps], float)

        trip = []
        for ia, ea in enumerate(exps):
            for ib, eb in enumerate(exps):
                if self.degrees[ia] + self.degrees[ib] <= L:
                    ec = tuple(x + y for x, y in zip(ea, eb))
                    trip.append((self.index[ec], ia, ib))
        trip.sort()
        t = np.array(trip, dtype=np.int64)
        self.tc, self.ta, self.tb = t[:, 0], t[:, 1], t[:, 2]
        # number of triples whose output has degree <= K
        self.tcount = np.searchsorted(self.tc, self.counts, side="left")
        self.tstart = [np.searchsorted(self.tc, np.arange(m)) for m in self.counts]

        self.dsrc = np.zeros((n, self.counts[L - 1] if L > 0 else 0), dtype=np.int64)
        self.dfac = np.zeros_like(self.dsrc, dtype=float)
        if L > 0:
            for k in range(self.counts[L - 1]):
                e = list(exps[k])
                for j in range(n):
                    e2 = e.copy()
                    e2[j] += 1
                    self.dsrc[j, k] = self.index[tuple(e2)]
                    self.dfac[j, k] = e[j] + 1
        self.unit = [self.index[tuple(int(i == j) for i in range(n))] for j in range(n)] if L > 0 else []

    def size(self, K: int) -> int:
        return int(self.counts[K])

    def derivative(self, P: np.ndarray, K: int) -> np.ndarray:
        """All first partials of an order-K jet: shape ``(n, M(K-1), ...)``."""
        m = self.size(K - 1)
        src, fac = self.dsrc[:, :m], self.dfac[:, :m]
        return P[src] * fac.reshape(fac.shape + (1,) * (P.ndim - 1))

    def derivation(self, phi: np.ndarray, f: np.ndarray, K: int) -> np.ndarray:
        """Order-(K-1) jet of ``(D phi) f`` from an order-K jet ``phi`` and order-(K-1) jet ``f``."""
        if K < 1:
            raise ValueError("need an order >= 1 jet to differentiate")
        dphi = self.derivative(phi, K)  # (n_j, M, n_out)
        nt = int(self.tcount[K - 1])
        a, b = self.ta[:nt], self.tb[:nt]
        # sum_j d_j phi[a] * f_j[b]
        prod = np.einsum("jtk,tj->tk", dphi[:, a, :], f[b, :])
        starts = self.tstart[K - 1]
        return np.add.reduceat(prod, starts, axis=0)

    def frobenius_sq(self, c: np.ndarray, order: int) -> float:
        """Squared Frobenius norm of the order-``order`` derivative tensor from jet rows."""
        sel = self.degrees[: c.shape[0]] == order
        w = math.factorial(order) * self.alpha_fact[: c.shape[0]][sel]
        return float(np.sum(w[:, None] * c[sel] ** 2))


@lru_cache(maxsize=64)
def monomials(n: int, L: int) -> Monomials:
    return Monomials(n, L)


class Component:
    """One vector field ``f : R^n -> R^n``."""

    n: int
    max_order: Optional[int] = None
    family: str = "custom"

    def value(self, y: np.ndarray) -> np.ndarray:
        return self.jet(y, 0)[0]

    def jet(self, y: np.ndarray, K: int) -> np.ndarray:
        raise NotImplementedError

    def _exps(self, K):
        return monomials(self.n, max(K, 1)).exps[: monomials(self.n, max(K, 1)).size(K)]


class Identity(Component):
    family = "identity"

    def __init__(self, n: int):
        self.n = n

    def value(self, y):
        return np.array(y, dtype=float)

    def jet(self, y, K):
        mono = monomials(self.n, max(K, 1))
        out = np.zeros((mono.size(K), self.n))
        out[0] = y
        if K >= 1:
            for j in range(self.n):
                out[mono.unit[j], j] = 1.0
        return out


class Linear(Component):
    """``f(y) = A y + b``."""

    family = "linear"

    def __init__(self, A, b=None):
        self.A = np.atleast_2d(np.asarray(A, dtype=float))
        self.n = self.A.shape[0]
        if self.A.shape != (self.n, self.n):
            raise ValueError("A must be square")
        self.b = np.zeros(self.n) if b is None else np.asarray(b, dtype=float)

    def value(self, y):
        return self.A @ y + self.b

    def jet(self, y, K):
        mono = monomials(self.n, max(K, 1))
        out = np.zeros((mono.size(K), self.n))
        out[0] = self.value(np.asarray(y, float))
        if K >= 1:
            for j in range(self.n):
                out[mono.unit[j]] = self.A[:, j]
        return out


def rotation(rate: float = 1.0, n: int = 2) -> Linear:
    """``f(y) = rate * (-y_2, y_1, 0, ...)``."""
    A = np.zeros((n, n))
    A[0, 1], A[1, 0] = -rate, rate
    comp = Linear(A)
    comp.family = "rotation"
    return comp


class Polynomial(Component):
    """``f_k(y) = sum coef * y^beta`` over terms ``(k, coef, beta)`` (k is 0-based)."""

    family = "polynomial"

    def __init__(self, n: int, terms: Iterable[tuple]):
        self.n = n
        self.terms = [(int(k), float(c), tuple(int(e) for e in beta)) for k, c, beta in terms]
        for k, _, beta in self.terms:
            if not 0 <= k < n or len(beta) != n or min(beta, default=0) < 0:
                raise ValueError(f"bad polynomial term {(k, beta)}")

    def value(self, y):
        y = np.asarray(y, float)
        out = np.zeros(self.n)
        for k, c, beta in self.terms:
            out[k] += c * np.prod(y ** np.array(beta))
        return out

    def jet(self, y, K):
        y = np.asarray(y, float)
        E = self._exps(K)
        out = np.zeros((E.shape[0], self.n))
        for k, c, beta in self.terms:
            b = np.array(beta)
            ok = np.all(E <= b[None, :], axis=1)
            if not ok.any():
                continue
            Eo = E[ok]
            binom = np.prod([[math.comb(int(bj), int(aj)) for aj, bj in zip(row, b)] for row in Eo], axis=1)
            out[ok, k] += c * binom * np.prod(y[None, :] ** (b[None, :] - Eo), axis=1)
        return out


class ExpDecay(Component):
    """``f(y) = c * exp(-a . y)``; in one dimension with c = a = 1 this is ``e^{-y}``."""

    family = "exp_decay"

    def __init__(self, c, a):
        self.c = np.atleast_1d(np.asarray(c, dtype=float))
        self.a = np.atleast_1d(np.asarray(a, dtype=float))
        self.n = self.c.size
        if self.a.size != self.n:
            raise ValueError("c and a must have the same length")

    def value(self, y):
        return self.c * math.exp(-float(self.a @ np.asarray(y, float)))

    def jet(self, y, K):
        E = self._exps(K)
        mono = monomials(self.n, max(K, 1))
        scal = np.prod((-self.a[None, :]) ** E, axis=1) / mono.alpha_fact[: E.shape[0]]
        return math.exp(-float(self.a @ np.asarray(y, float))) * scal[:, None] * self.c[None, :]


class Trig(Component):
    """``f(y) = c * sin(a . y + phase)``."""

    family = "trig"

    def __init__(self, c, a, phase: float = 0.0):
        self.c = np.atleast_1d(np.asarray(c, dtype=float))
        self.a = np.atleast_1d(np.asarray(a, dtype=float))
        self.n = self.c.size
        self.phase = float(phase)

    def value(self, y):
        return self.c * math.sin(float(self.a @ np.asarray(y, float)) + self.phase)

    def jet(self, y, K):
        E = self._exps(K)
        mono = monomials(self.n, max(K, 1))
        arg = float(self.a @ np.asarray(y, float)) + self.phase
        deg = E.sum(axis=1)
        scal = np.prod(self.a[None, :] ** E, axis=1) / mono.alpha_fact[: E.shape[0]]
        return (scal * np.sin(arg + deg * math.pi / 2))[:, None] * self.c[None, :]


class Scaled(Component):
    def __init__(self, base: Component, factor: float):
        self.base, self.factor = base, float(factor)
        self.n, self.max_order, self.family = base.n, base.max_order, base.family

    def value(self, y):
        return self.factor * self.base.value(y)

    def jet(self, y, K):
        return self.factor * self.base.jet(y, K)


def strict_floor(x: float, tol: float = 1e-9) -> int:
    """Largest integer strictly less than ``x``."""
    r = round(x)
    if abs(x - r) <= tol:
        return int(r) - 1
    return int(math.floor(x))


def box_grid(box: np.ndarray, density: int) -> np.ndarray:
    axes = [np.linspace(lo, hi, density) for lo, hi in box]
    return np.stack([g.ravel() for g in np.meshgrid(*axes, indexing="ij")], axis=1)


def lip_norm_estimate(comp: Component, gamma: float, box, density: int = 21, max_pairs_points: int = 1500) -> float:
    """Grid lower bound of the Lip(gamma) norm.

    The maximum of: sup of the Frobenius norm of ``D^m f`` for ``m <= k`` and the
    Holder quotient of ``D^k f`` with exponent ``gamma - k``, where ``k`` is the
    strict floor of ``gamma``.
    """
    box = np.asarray(box, dtype=float)
    k = max(strict_floor(gamma), 0)
    r = gamma - k
    pts = box_grid(box, density)
    mono = monomials(comp.n, max(k, 1))
    best = 0.0
    top = []
    top_sel = mono.degrees[: mono.size(k)] == k
    top_w = np.sqrt(math.factorial(k) * mono.alpha_fact[: mono.size(k)][top_sel])
    for y in pts:
        c = comp.jet(y, k)
        for m in range(k + 1):
            best = max(best, math.sqrt(mono.frobenius_sq(c, m)))
        top.append((top_w[:, None] * c[top_sel]).ravel())
    top = np.array(top)
    if pts.shape[0] > max_pairs_points:
        sel = np.random.default_rng(0).choice(pts.shape[0], max_pairs_points, replace=False)
        pts, top = pts[sel], top[sel]
    for i in range(pts.shape[0] - 1):
        dist = np.linalg.norm(pts[i + 1 :] - pts[i], axis=1)
        diff = np.linalg.norm(top[i + 1 :] - top[i], axis=1)
        ok = dist > 0
        if ok.any():
            best = max(best, float(np.max(diff[ok] / dist[ok] ** r)))
    return best


class VectorField:
    """``d`` components on ``R^n`` with declared Lip indices and an estimation box."""

    def __init__(self, components: Sequence[Component], gammas: Sequence[float], box, density: int = 21):
        self.components = list(components)
        self.d = len(self.components)
        self.n = self.components[0].n
        if any(c.n != self.n for c in self.components):
            raise ValueError("all components must act on the same R^n")
        self.gammas = tuple(float(g) for g in gammas)
        if len(self.gammas) != self.d:
            raise ValueError("need one Lip index per component")
        self.box = np.asarray(box, dtype=float).reshape(self.n, 2)
        self.density = int(density)
        self._norms: Optional[np.ndarray] = None

    def in_box(self, y) -> bool:
        y = np.asarray(y, float)
        return bool(np.all(y >= self.box[:, 0] - BOX_TOL) and np.all(y <= self.box[:, 1] + BOX_TOL))

    def check_point(self, y):
        if not self.in_box(y):
            raise DomainError(f"point {np.asarray(y).tolist()} outside the domain box")

    def rhs(self, y, dx) -> np.ndarray:
        out = np.zeros(self.n)
        for c, v in zip(self.components, dx):
            if v != 0.0:
                out += v * c.value(y)
        return out

    def lip_norms(self) -> np.ndarray:
        if self._norms is None:
            self._norms = np.array(
                [lip_norm_estimate(c, g, self.box, self.density) for c, g in zip(self.components, self.gammas)]
            )
        return self._norms

    def normalized(self) -> "VectorField":
        """Components divided by their Lip norms (pair with ``rescale_signal`` on the driver)."""
        norms = self.lip_norms()
        if np.any(norms <= 0):
            raise ValueError("cannot normalize a component with zero norm")
        out = VectorField([Scaled(c, 1.0 / s) for c, s in zip(self.components, norms)], self.gammas, self.box, self.density)
        out._norms = np.ones(self.d)
        out._parent_norms = norms
        return out

    def is_normalized(self, tol: float = 1e-9) -> bool:
        return bool(np.all(np.abs(self.lip_norms() - 1.0) <= tol))

    def F_jets(self, words: Iterable[Word], y, extra: int = 0) -> Dict[Word, np.ndarray]:
        """Jets of F^w at ``y`` for every word and all of its suffixes.

        Each returned jet has order at least ``extra``.
        """
        words = [tuple(w) for w in words]
        y = np.asarray(y, dtype=float)
        L = max((len(w) for w in words), default=0) + extra
        mono = monomials(self.n, max(L, 1))
        fj: List[Optional[np.ndarray]] = [None] * self.d
        need = [0] * self.d
        for w in words:
            for pos, letter in enumerate(w):
                if letter < 1 or letter > self.d:
                    raise ValueError(f"letter {letter} outside 1..{self.d}")
                need[letter - 1] = max(need[letter - 1], L - 1 - (len(w) - 1 - pos))
        for i, c in enumerate(self.components):
            if c.max_order is not None and need[i] > c.max_order:
                raise CapabilityError(f"component {i + 1} supplies derivatives up to {c.max_order}, need {need[i]}")
            fj[i] = c.jet(y, max(need[i], 0))
        memo: Dict[Word, np.ndarray] = {(): Identity(self.n).jet(y, L)}

        def get(v: Word) -> np.ndarray:
            if v in memo:
                return memo[v]
            inner = get(v[1:])
            K = L - len(v) + 1
            f = fj[v[0] - 1][: mono.size(K - 1)]
            memo[v] = mono.derivation(inner, f, K)
            return memo[v]

        for w in words:
            get(w)
        return memo

    def F(self, w: Word, y) -> np.ndarray:
        return self.F_jets([w], y)[tuple(w)][0].copy()

    def F_many(self, words: Iterable[Word], y) -> Dict[Word, np.ndarray]:
        words = [tuple(w) for w in words]
        jets = self.F_jets(words, y)
        return {w: jets[w][0].copy() for w in words}

    def DF(self, w: Word, y) -> np.ndarray:
        """Jacobian of F^w at ``y``."""
        jet = self.F_jets([w], y, extra=1)[tuple(w)]
        mono = monomials(self.n, max(len(w) + 1, 1))
        return np.stack([jet[mono.unit[j]] for j in range(self.n)], axis=1)


def apply_derivation(f: Component, phi: Component, y, box=None) -> np.ndarray:
    """``(D phi)(y) f(y)``."""
    y = np.asarray(y, dtype=float)
    if box is not None:
        box = np.asarray(box, float).reshape(-1, 2)
        if np.any(y < box[:, 0] - BOX_TOL) or np.any(y > box[:, 1] + BOX_TOL):
            raise DomainError(f"point {y.tolist()} outside the domain box")
    mono = monomials(phi.n, 1)
    jet = phi.jet(y, 1)
    J = np.stack([jet[mono.unit[j]] for j in range(phi.n)], axis=1)
    return J @ f.value(y)


def compose_F(field: VectorField, w: Word, y) -> np.ndarray:
    field.check_point(y)
    return field.F(w, y)


def factorial_bound_check(
    field: VectorField,
    w: Word,
    i: int,
    points,
    ix: Optional[PiIndex] = None,
    mode: str = "weight",
    slack: float = 1e-9,
) -> dict:
    """Check ``|F^{iw}| <= ||w||!`` and ``|F^w(y) - F^w(x)| <= ||w||! |y - x|`` on sample points.

    ``mode="degree"`` uses the bound ``floor(p_max)!`` instead.
    """
    if not field.is_normalized():
        raise NormalizationRequiredError("factorial bounds need a field with unit Lip norms")
    w = tuple(w)
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if mode == "weight":
        if ix is None or not ix.is_uniform:
            raise UnsupportedGradingError("weight mode needs a uniform grading")
        bound = float(math.factorial(weight(w, ix)))
    elif mode == "degree":
        if ix is None:
            raise ValueError("degree mode needs the grading")
        bound = float(math.factorial(int(math.floor(ix.p_max))))
    else:
        raise ValueError(f"unknown mode {mode!r}")
    iw = (int(i),) + w
    sup_F = 0.0
    sup_DF = 0.0
    values = []
    for y in points:
        sup_F = max(sup_F, float(np.linalg.norm(field.F(iw, y))))
        if w:
            sup_DF = max(sup_DF, float(np.linalg.norm(field.DF(w, y), 2)))
            values.append(field.F(w, y))
    quot = 0.0
    if w and len(points) > 1:
        vals = np.array(values)
        for k in range(len(points) - 1):
            dist = np.linalg.norm(points[k + 1 :] - points[k], axis=1)
            diff = np.linalg.norm(vals[k + 1 :] - vals[k], axis=1)
            ok = dist > 0
            if ok.any():
                quot = max(quot, float(np.max(diff[ok] / dist[ok])))
    lim = bound * (1 + slack)
    return {
        "word": w,
        "letter": int(i),
        "mode": mode,
        "bound": bound,
        "sup_F_iw": sup_F,
        "sup_DF_w": sup_DF,
        "lipschitz_quotient": quot,
        "passed": sup_F <= lim and sup_DF <= lim and quot <= lim,
    }


__all__ = [
    "Component",
    "ExpDecay",
    "Identity",
    "Linear",
    "Monomials",
    "Polynomial",
    "Scaled",
    "Trig",
    "VectorField",
    "apply_derivation",
    "box_grid",
    "compose_F",
    "factorial_bound_check",
    "lip_norm_estimate",
    "rotation",
    "strict_floor",
]
