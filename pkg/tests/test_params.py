import math

import numpy as np
import pytest
from scipy.special import zeta

from pirough.errors import InadmissibleError
from pirough.params import admissible_params, beta_constant, beta_series, euler_thresholds
from pirough.words import PiIndex


def zeta_beta(p):
    q = (math.floor(p) + 1) / p
    return p * (1 + 2**q * (zeta(q) - 1))


def test_inhomogeneous_example():
    P = admissible_params(PiIndex.uniform(2.0, (1, 2)), (2.5, 1.5))
    assert P.thresholds == (2.0, 1.0)
    assert P.gamma == 2.5
    assert P.N == 2
    assert P.theta == pytest.approx(1.5)


def test_homogeneous_example():
    P = admissible_params(PiIndex.homogeneous(2.0, 2), (3.5, 3.5))
    assert P.thresholds == (2.0, 2.0)
    assert P.gamma == 3.5 and P.N == 3 and P.theta == pytest.approx(1.5)


def test_threshold_is_strict():
    with pytest.raises(InadmissibleError) as err:
        admissible_params(PiIndex.homogeneous(2.0, 2), (2.0, 3.0))
    assert [f["component"] for f in err.value.failures] == [1]
    with pytest.raises(InadmissibleError):
        admissible_params(PiIndex.homogeneous(2.0, 2), (2.0 + 1e-10, 3.0))


def test_non_uniform_gets_euler_quantities_only():
    P = admissible_params(PiIndex((2.0, 1.3)), (2.1, 1.8))
    assert P.N is None and P.beta is None
    assert P.theta > 1


def test_threshold_forms_agree():
    ix = PiIndex.uniform(3.0, (1, 2, 3))
    assert euler_thresholds(ix) == pytest.approx([3 * (1 - k / 3) + 1 for k in (1, 2, 3)])


@pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 2.5, 3.0, 4.0])
def test_beta_against_zeta(p):
    assert beta_constant(p) == pytest.approx(zeta_beta(p), rel=1e-10)
    assert beta_constant(p) > p


def test_beta_examples():
    assert beta_constant(1.0) == pytest.approx(3.579736, abs=1e-6)
    assert beta_series(2.0) == pytest.approx(4 * (math.pi**2 / 6 - 1), rel=1e-12)


def test_beta_series_decreases_in_exponent():
    qs = [1.25, 1.5, 2.0, 3.0]
    vals = [beta_series(q) for q in qs]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    # the constant itself is not monotone in p: beta(1) < beta(4)
    assert beta_constant(1.0) < beta_constant(4.0)


def test_gamma_monotone_in_indices():
    rng = np.random.default_rng(7)
    for _ in range(50):
        p = float(rng.uniform(1, 4))
        k = tuple(int(v) for v in rng.integers(1, math.floor(p) + 1, 2))
        ix = PiIndex.uniform(p, k)
        thr = euler_thresholds(ix)
        g = [t + float(rng.uniform(0.01, 2)) for t in thr]
        P = admissible_params(ix, g)
        assert P.N >= math.floor(p)
        g2 = list(g)
        g2[int(rng.integers(0, 2))] += float(rng.uniform(0, 2))
        assert admissible_params(ix, g2).N >= P.N
