import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pirough.control import ControlGrid
from pirough.families import l_path
from pirough.inequalities import factorial_decay_check, kershaw_ratio_check, neoclassical_check
from pirough.lift import PLPath, lift_on_grid, path_signature
from pirough.params import admissible_params, beta_constant
from pirough.words import PiIndex


def test_decay_linear_segment():
    ix = PiIndex.homogeneous(1.0, 1)
    P = admissible_params(ix, (3.0,))
    h = 0.4
    X = path_signature(PLPath([0, 1], [[0.0], [h]]), 0, 1, ix, 3.0)
    rep = factorial_decay_check(X, (1, 1, 1), P, h)
    assert rep["lhs"] == pytest.approx(h**3 / 6)
    assert rep["rhs"] == pytest.approx(P.beta**2 * h**3 / 6)
    assert rep["passed"]


def test_decay_l_path_and_single_letters():
    ix = PiIndex.homogeneous(2.0, 2)
    P = admissible_params(ix, (3.5, 3.5))
    x = l_path()
    om = ControlGrid(lift_on_grid(x, ix, 1.0, refine=2)).omega(0.0, 2.0)
    X = path_signature(x, 0.0, 2.0, ix, 2.0)
    assert factorial_decay_check(X, (1, 2), P, om)["passed"]
    for i in (1, 2):
        rep = factorial_decay_check(X, (i,), P, om)
        assert rep["rhs"] == pytest.approx(om ** 0.5 / math.gamma(1.5))
        assert abs(X[(i,)]) <= om ** 0.5 and rep["passed"]


def test_neoclassical_examples():
    r = neoclassical_check(1.0, 2, 1.0, 1.0)
    assert r["lhs"] == pytest.approx(2.0) and r["rhs"] == pytest.approx(2.0) and r["equal"]
    r = neoclassical_check(2.0, 2, 1.0, 1.0)
    assert r["lhs"] == pytest.approx(0.8183, abs=1e-4) and r["rhs"] == pytest.approx(2.0) and r["passed"]
    for p in (1.0, 2.5):
        r = neoclassical_check(p, 3, 0.0, 1.7)
        assert r["lhs"] == pytest.approx(1.7 ** (3 / p) / math.gamma(3 / p + 1) / p**2)
        assert r["passed"]


@settings(max_examples=60, deadline=None)
@given(st.floats(1.0, 5.0), st.integers(0, 12), st.floats(0, 3), st.floats(0, 3))
def test_neoclassical_holds(p, n, s, t):
    assert neoclassical_check(p, n, s, t)["passed"]


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 12), st.floats(0, 3), st.floats(0, 3))
def test_neoclassical_equality_at_p1(n, s, t):
    assert neoclassical_check(1.0, n, s, t)["equal"]


def test_kershaw_p1_closed_form():
    beta = beta_constant(1.0)
    rep = kershaw_ratio_check(1.0, 10)
    a = np.exp(rep["log_a"])
    assert np.allclose(a, [beta ** (j - 1) / j for j in range(1, 12)], rtol=1e-12)
    assert all(a[j] > a[j - 1] for j in range(1, 11))


def test_kershaw_small():
    rep = kershaw_ratio_check(2.0, 2)
    a = np.exp(rep["log_a"])
    assert a[0] / a[2] <= rep["ratios"][1]
    with pytest.raises(ValueError):
        kershaw_ratio_check(2.0, 1)


@pytest.mark.parametrize("p", [1.0, 2.0, 3.0])
def test_kershaw_bounded(p):
    rep = kershaw_ratio_check(p, 30)
    assert rep["passed"]
    assert max(rep["ratios"]) <= rep["C_ratio"]
    assert rep["C_ratio"] < 1.0
