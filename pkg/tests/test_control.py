import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_force_variation
from pirough.control import ControlGrid, control_omega, split_by_control, word_variation
from pirough.errors import CellTooLargeError, GridError
from pirough.families import random_pl_path
from pirough.lift import PLPath, lift_on_grid
from pirough.words import PiIndex, degree


def lifted(times, values, ix, refine=0):
    return lift_on_grid(PLPath(times, values), ix, 1.0, refine=refine)


def test_word_variation_examples():
    one = PiIndex.homogeneous(1.0, 1)
    sig = lifted([0.0, 0.3, 1.0], [[0.0], [0.9], [2.5]], one)
    assert word_variation(sig, (1,), 0.0, 1.0) == pytest.approx(2.5)
    half = PiIndex.homogeneous(2.0, 1)
    sig = lifted([0.0, 0.5, 1.0], [[0.0], [0.5], [1.0]], half)
    assert word_variation(sig, (1,), 0.0, 1.0) == pytest.approx(1.0)
    zig = lifted([0.0, 0.5, 1.0], [[0.0], [1.0], [0.0]], half)
    assert word_variation(zig, (1,), 0.0, 1.0) == pytest.approx(2.0)
    assert ControlGrid(zig).word_partition((1,), 0.0, 1.0) == [0.0, 0.5, 1.0]
    assert ControlGrid(sig).word_partition((1,), 0.0, 1.0) == [0.0, 1.0]


def test_omega_examples():
    one = PiIndex.homogeneous(1.0, 1)
    assert control_omega(lifted([0.0, 1.0], [[0.0], [0.0]], one), 0.0, 1.0) == 0.0
    assert control_omega(lifted([0.0, 1.0], [[0.0], [2.0]], one, refine=3), 0.0, 1.0) == pytest.approx(2.0)
    with pytest.raises(GridError):
        control_omega(lifted([0.0, 1.0], [[0.0], [2.0]], one), 0.0, 0.4)


def test_split_examples():
    one = PiIndex.homogeneous(1.0, 1)
    sig = lifted([0.0, 1.0], [[0.0], [1.0]], one, refine=4)
    assert split_by_control(sig, 0.0, 1.0, 2.0) == [0.0, 1.0]
    pts = split_by_control(sig, 0.0, 1.0, 0.5)
    assert pts == [0.0, 0.5, 1.0]
    pts = split_by_control(sig, 0.0, 1.0, 0.3)
    assert len(pts) - 1 <= 1.0 / 0.3 + 1
    coarse = lifted([0.0, 1.0], [[0.0], [1.0]], one)
    with pytest.raises(CellTooLargeError):
        split_by_control(coarse, 0.0, 1.0, 0.5)


@pytest.mark.parametrize("seed", range(8))
def test_dp_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    d = 1 + seed % 2
    x = random_pl_path(rng, d, 3)
    ix = PiIndex.homogeneous(2.0, d) if seed % 3 else PiIndex((2.0, 1.0)[:d])
    sig = lift_on_grid(x, ix, 1.0, refine=1)
    cg = ControlGrid(sig)
    idx = list(range(sig.n))
    for w in cg.words:
        brute = brute_force_variation(lambda a, b: sig.between(a, b)[w], idx, 1.0 / degree(w, ix))
        assert cg.word_variation(w, x.start, x.end) == pytest.approx(brute, rel=1e-12, abs=1e-14)


@pytest.mark.parametrize("seed", range(5))
def test_refinement_is_monotone(seed):
    rng = np.random.default_rng(100 + seed)
    x = random_pl_path(rng, 2, 4)
    ix = PiIndex((2.0, 1.5))
    vals = [ControlGrid(lift_on_grid(x, ix, 1.0, refine=r)).omega(x.start, x.end) for r in range(4)]
    assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))


def test_table_matches_rows():
    x = random_pl_path(np.random.default_rng(9), 2, 3)
    cg = ControlGrid(lift_on_grid(x, PiIndex.homogeneous(2.0, 2), 1.0, refine=1))
    T = cg.table()
    for a in range(cg.n):
        assert np.allclose(T[a], cg.from_start(a), atol=1e-14)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6))
def test_superadditivity_and_trivial_bound(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(1, 4))
    x = random_pl_path(rng, d, int(rng.integers(1, 5)))
    ix = PiIndex(tuple(float(v) for v in rng.uniform(1.0, 2.5, d)))
    cg = ControlGrid(lift_on_grid(x, ix, 1.0, refine=1))
    om = cg.omega_table()
    for i, j, k in itertools.combinations(range(cg.n), 3):
        assert om[i, j] + om[j, k] <= om[i, k] + 1e-12 * max(1.0, om[i, k])
    for i, j in itertools.combinations(range(cg.n), 2):
        X = cg.signal.between(i, j)
        for w in cg.words:
            assert abs(X[w]) <= om[i, j] ** degree(w, ix) + 1e-12
