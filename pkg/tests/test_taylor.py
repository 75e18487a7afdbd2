import math

import numpy as np
import pytest
from scipy.linalg import expm

from pirough.control import ControlGrid
from pirough.errors import CapError, DomainExitError
from pirough.families import inhomogeneous_drift
from pirough.fields import Linear, VectorField, rotation
from pirough.lift import PLPath, lift_on_grid, path_signature
from pirough.params import admissible_params, beta_constant
from pirough.taylor import (
    euler_bound,
    euler_increment,
    fit_slope,
    frac_factorial,
    ode_solve,
    remainder,
    remainder_bound,
    remainder_reports,
    step_scheme,
    taylor_increment,
    taylor_words,
)
from pirough.words import PiIndex

ONE = PiIndex.homogeneous(1.0, 1)


def scalar_linear(a=1.0, box=20.0):
    return VectorField([Linear([[a]])], [3.0], [[-box, box]])


def test_frac_factorial():
    assert frac_factorial(0.5) == pytest.approx(math.sqrt(math.pi) / 2, rel=1e-14)
    for n in range(10):
        assert frac_factorial(n) == pytest.approx(math.factorial(n), rel=1e-13)


def test_ode_examples():
    zero = VectorField([Linear([[0.0]])], [2.0], [[-5, 5]])
    x = PLPath([0, 1], [[0.0], [1.0]])
    assert ode_solve(zero, x, [0.7], [0.5, 1.0]).at(1.0)[0] == 0.7
    assert ode_solve(scalar_linear(), x, [1.3], [1.0]).at(1.0)[0] == pytest.approx(math.e * 1.3, rel=1e-11)
    rot = VectorField([rotation(1.0)], [2.0], np.tile([-2.0, 2.0], (2, 1)))
    y = ode_solve(rot, PLPath([0, math.pi / 2], [[0.0], [math.pi / 2]]), [1.0, 0.0], [math.pi / 2]).at(math.pi / 2)
    assert np.allclose(y, [0.0, 1.0], atol=1e-11)


def test_domain_exit():
    field = VectorField([Linear([[1.0]])], [2.0], [[-2.0, 2.0]])
    with pytest.raises(DomainExitError) as err:
        ode_solve(field, PLPath([0, 2], [[0.0], [2.0]]), [1.0], [2.0])
    assert err.value.exit_time == pytest.approx(math.log(2.0), rel=1e-6)


def test_taylor_increment_examples():
    field = scalar_linear()
    X = path_signature(PLPath([0, 1], [[0.0], [0.1]]), 0, 1, ONE, 2.0)
    assert taylor_increment(field, X, np.array([2.0]), ONE, 2)[0] == pytest.approx(2.0 * 0.105, rel=1e-14)
    assert np.all(taylor_increment(field, X, np.array([2.0]), ONE, 0) == 0)
    with pytest.raises(CapError):
        taylor_increment(field, X, np.array([2.0]), ONE, 3)


def test_euler_increment_matches_degree_one_words():
    ix = PiIndex.homogeneous(2.0, 2)
    rng = np.random.default_rng(4)
    A = rng.normal(size=(2, 2, 2))
    field = VectorField([Linear(A[0]), Linear(A[1])], [3.5, 3.5], np.tile([-5, 5], (2, 1)))
    x = PLPath([0, 1, 2], [[0, 0], [0.2, 0.1], [0.1, 0.4]])
    X = path_signature(x, 0, 2, ix, 1.5)
    y = np.array([0.3, 0.2])
    assert np.allclose(euler_increment(field, X, y), taylor_increment(field, X, y, ix, 2))


@pytest.mark.parametrize("seed", range(4))
def test_linear_fields_match_matrix_exponential(seed):
    rng = np.random.default_rng(seed)
    d, m, N = 2, 3, 10
    As = rng.normal(size=(d, m, m)) * 0.5
    field = VectorField([Linear(A) for A in As], [12.0] * d, np.tile([-50, 50], (m, 1)))
    ix = PiIndex.homogeneous(1.0, d)
    steps = rng.uniform(-0.15, 0.15, (3, d))
    x = PLPath([0, 1, 2, 3], np.vstack((np.zeros(d), np.cumsum(steps, axis=0))))
    X = path_signature(x, 0, 3, ix, float(N))
    y = rng.normal(size=m)
    M = np.eye(m)
    for dx in steps:
        M = expm(np.tensordot(dx, As, axes=1)) @ M
    assert np.allclose(y + taylor_increment(field, X, y, ix, N), M @ y, atol=1e-10)
    # the degree-3 truncation is the degree-3 part of the product of exponentials
    trunc = taylor_increment(field, X, y, ix, 3)
    ref = np.zeros(m)
    for w in taylor_words(ix, 3):
        P = np.eye(m)
        for letter in w:
            P = As[letter - 1] @ P
        ref += X[w] * (P @ y)
    assert np.allclose(trunc, ref, atol=1e-14)


def test_remainder_examples():
    x = PLPath([0, 1], [[0.0], [0.1]])
    rep = remainder(scalar_linear(), x, [1.0], 0.0, 1.0, ONE, N=2)
    assert rep.remainder == pytest.approx(math.exp(0.1) - 1.105, rel=1e-7)
    assert rep.remainder == pytest.approx(1.70918e-4, rel=1e-5)
    assert rep.remainder == pytest.approx(float(np.linalg.norm(rep.true - rep.taylor)), rel=1e-14)
    zero = VectorField([Linear([[0.0]], [0.0])], [3.0], [[-1, 1]])
    for N in (1, 2):
        assert remainder(zero, x, [0.5], 0.0, 1.0, ONE, N=N).remainder == 0.0


def test_exp_decay_third_order_plateau():
    from pirough.families import exp_sharpness

    fam = exp_sharpness(0.05)
    reps = remainder_reports(fam.field, fam.path, fam.xi, 0.0, [0.05, 0.025, 0.0125], fam.ix, 2)
    for r in reps:
        assert r.remainder / r.t**3 == pytest.approx(2 / 6, rel=0.05)


def test_bound_examples():
    P = admissible_params(ONE, (3.0,))
    assert remainder_bound(P, 1, 0.0) == 0.0
    b = remainder_bound(P, 1, 0.1, N=2)
    assert P.beta == pytest.approx(3.579736, abs=1e-6)
    assert b == pytest.approx(2 * beta_constant(1.0) ** 2 * 0.001 / 6, rel=1e-14)
    assert b == pytest.approx(4.2715e-3, rel=1e-4)
    assert remainder_bound(P, 1, 0.2, N=2) / b == pytest.approx(2.0**3, rel=1e-12)
    assert euler_bound(1.5, 1.0, C=3.0) == 3.0
    assert euler_bound(1.5, 0.25) == pytest.approx(0.125)
    assert euler_bound(1.5, 4.0) == 4.0


def test_exponents_agree_for_homogeneous():
    ix = PiIndex.homogeneous(2.0, 2)
    P = admissible_params(ix, (2.5, 2.5))
    assert P.N == 2
    assert (P.N + 1) / P.p == pytest.approx(P.theta)
    om = np.array([0.5, 0.25, 0.125])
    t = np.array([remainder_bound(P, 2, o) for o in om])
    e = np.array([euler_bound(P.theta, o) for o in om])
    assert fit_slope(om, t) == pytest.approx(fit_slope(om, e), abs=1e-12)


def test_one_step_scheme_is_taylor_increment():
    field = scalar_linear()
    x = PLPath([0, 1], [[0.0], [0.3]])
    X = path_signature(x, 0, 1, ONE, 3.0)
    traj = step_scheme(field, x, [0.0, 1.0], [1.0], ONE, 3)
    assert traj[-1][0] == pytest.approx(1.0 + taylor_increment(field, X, np.array([1.0]), ONE, 3)[0], rel=1e-15)


def test_scheme_converges_for_linear_scalar():
    x = PLPath([0, 1], [[0.0], [1.0]])
    errs = []
    for n in (2, 4, 8, 16):
        traj = step_scheme(scalar_linear(), x, np.linspace(0, 1, n + 1), [1.0], ONE, 2)
        errs.append(abs(traj[-1][0] - math.e))
    assert all(b < a for a, b in zip(errs, errs[1:]))
    assert fit_slope([1 / 2, 1 / 4, 1 / 8, 1 / 16], errs) == pytest.approx(2.0, abs=0.2)


def test_scheme_with_grid_signal_driver():
    x = PLPath([0, 1], [[0.0], [1.0]])
    sig = lift_on_grid(x, ONE, 3.0, refine=3)
    a = step_scheme(scalar_linear(), sig, sig.grid, [1.0], ONE, 3)
    b = step_scheme(scalar_linear(), x, sig.grid, [1.0], ONE, 3)
    assert np.allclose(a, b, atol=1e-14)


def test_mixed_driver_scheme_within_summed_local_bounds():
    fam = inhomogeneous_drift()
    N = 2
    P = admissible_params(fam.ix, fam.field.gammas)
    reps = remainder_reports(fam.field, fam.path, fam.xi, 0.0, fam.ends(), fam.ix, N)
    C = max(r.ratio for r in reps)
    xbar = fam.path.scaled(fam.field.lip_norms())
    cg = ControlGrid(lift_on_grid(xbar, fam.ix, 1.0, 0.0, 1.0, refine=2))
    part = cg.split_by_control(0.0, 1.0, 1.0)
    traj = step_scheme(fam.field, fam.path, part, fam.xi, fam.ix, N)
    true = ode_solve(fam.field, fam.path, fam.xi, [1.0]).at(1.0)
    err = float(np.linalg.norm(traj[-1] - true))
    local = sum(remainder_bound(P, fam.ix.d, cg.omega(a, b), C, N) for a, b in zip(part, part[1:]))
    assert err > 0
    assert err <= 10 * local
