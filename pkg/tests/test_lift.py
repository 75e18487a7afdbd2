import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import prefix_closed, signature_by_ode
from pirough.errors import CertificationError, IntervalError
from pirough.families import l_path, random_pl_path
from pirough.group import GroupSeries, chen_product, exp_series, from_letters, inverse, shuffle_defect
from pirough.lift import (
    GridSignal,
    PLPath,
    lift_on_grid,
    path_signature,
    rescale_signal,
    segment_signature,
    synthetic_group_path,
)
from pirough.words import PiIndex


def test_segment_examples():
    assert segment_signature([2.0], PiIndex.homogeneous(2.0, 1), 1.0)[(1, 1)] == pytest.approx(2.0)
    X = segment_signature([1.0, 3.0], PiIndex.homogeneous(2.0, 2), 1.0)
    assert X[()] == 1.0
    assert X[(1, 2)] == pytest.approx(1.5)


def test_l_path_signature():
    X = path_signature(l_path(), 0.0, 2.0, PiIndex.homogeneous(2.0, 2), 1.0)
    assert X[(1, 2)] == 1.0 and X[(2, 1)] == 0.0


def test_single_segment_matches_segment_signature():
    ix = PiIndex((2.0, 1.3))
    x = PLPath([0.0, 2.0], [[0.0, 0.0], [0.7, -1.1]])
    assert path_signature(x, 0.0, 2.0, ix, 2.0).allclose(segment_signature([0.7, -1.1], ix, 2.0), 1e-15)


@pytest.mark.parametrize("seed", range(6))
def test_signature_matches_ode_oracle(seed):
    rng = np.random.default_rng(seed)
    d = 1 + seed % 3
    x = random_pl_path(rng, d, 4)
    ix = PiIndex(tuple(rng.uniform(1.0, 2.5, d)))
    X = path_signature(x, x.start, x.end, ix, 1.5)
    ref = signature_by_ode(x.times, x.values, prefix_closed(X.words))
    for w in X.words:
        assert X[w] == pytest.approx(ref[w], abs=1e-9)


def test_subinterval_between_breakpoints():
    x = PLPath([0.0, 1.0, 2.0], [[0.0], [1.0], [3.0]])
    ix = PiIndex.homogeneous(1.0, 1)
    X = path_signature(x, 0.5, 1.5, ix, 2.0)
    assert X[(1,)] == pytest.approx(1.5)
    assert X[(1, 1)] == pytest.approx(1.5**2 / 2)
    with pytest.raises(IntervalError):
        path_signature(x, 1.5, 0.5, ix, 1.0)


def test_rescale_examples():
    ix = PiIndex((2.0, 1.0))
    rng = np.random.default_rng(1)
    x = random_pl_path(rng, 2, 3)
    X = path_signature(x, x.start, x.end, ix, 2.0)
    assert rescale_signal(X, [1.0, 1.0]).allclose(X, 0)
    c = [0.3, 2.0]
    assert rescale_signal(X, c).allclose(path_signature(x.scaled(c), x.start, x.end, ix, 2.0), 1e-12)
    one = PiIndex.homogeneous(3.0, 1)
    Y = path_signature(PLPath([0, 1], [[0.0], [1.3]]), 0, 1, one, 1.0)
    Z = rescale_signal(Y, [2.0])
    for m in range(4):
        assert Z[(1,) * m] == pytest.approx(2.0**m * Y[(1,) * m])


def test_synthetic_examples():
    ix = PiIndex.homogeneous(2.0, 2)
    const = synthetic_group_path([], ix=ix, cap=1.0)
    assert const(0.0, 1.0).allclose(GroupSeries.identity(ix, 1.0), 0)
    area = GroupSeries.from_dict(ix, 1.0, {(1, 2): 1.0, (2, 1): -1.0})
    sig = synthetic_group_path([area])
    X = sig(0.0, 1.0)
    assert X[(1,)] == 0 and X[(2,)] == 0 and X[(1, 2)] == 1.0
    steps = [np.array([1.0, 0.5]), np.array([-0.3, 2.0])]
    lie = [from_letters(ix, 1.0, v) for v in steps]
    sig = synthetic_group_path(lie)
    x = PLPath([0.0, 1.0, 2.0], np.vstack(([0, 0], np.cumsum(steps, axis=0))))
    assert sig(0.0, 2.0).allclose(path_signature(x, 0.0, 2.0, ix, 1.0), 1e-12)
    bad = GroupSeries.from_dict(ix, 1.0, {(1, 1): 1.0})
    with pytest.raises(CertificationError):
        synthetic_group_path([bad])


def test_grid_signal_products():
    ix = PiIndex.homogeneous(2.0, 2)
    x = random_pl_path(np.random.default_rng(5), 2, 3)
    g = lift_on_grid(x, ix, 1.0, refine=1)
    assert isinstance(g, GridSignal)
    assert g(x.start, x.end).allclose(path_signature(x, x.start, x.end, ix, 1.0), 1e-12)


def test_csv_roundtrip():
    x = random_pl_path(np.random.default_rng(2), 3, 4)
    y = PLPath.from_csv(x.to_csv())
    assert np.array_equal(x.times, y.times) and np.array_equal(x.values, y.values)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 3), st.sampled_from([1.0, 2.0]))
def test_signature_invariants(seed, d, cap):
    rng = np.random.default_rng(seed)
    x = random_pl_path(rng, d, int(rng.integers(1, 7)))
    ix = PiIndex(tuple(float(v) for v in rng.uniform(1.0, 2.5, d)))
    X = path_signature(x, x.start, x.end, ix, cap)
    assert shuffle_defect(X) <= 1e-10
    u = float(rng.uniform(x.start, x.end))
    chen = chen_product(path_signature(x, x.start, u, ix, cap), path_signature(x, u, x.end, ix, cap))
    assert chen.max_abs_diff(X) <= 1e-12 * (1 + np.abs(X.coeffs).max())
    R = path_signature(x.reversed(), x.start, x.end, ix, cap)
    assert R.max_abs_diff(inverse(X)) <= 1e-12 * (1 + np.abs(X.coeffs).max())
