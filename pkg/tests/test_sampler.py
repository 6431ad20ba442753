import numpy as np
import pytest

from hessian_lab.hessian import SlackVector, build_constraints, membership
from hessian_lab.quadratic import diameter_witness
from hessian_lab.sampler import (ChainConfig, batch_means_stderr, chord, estimate_p, lp_mass_check,
                                 sample_uniform)


def mean_zero_direction(rng, dim):
    d = rng.standard_normal(dim)
    return d - d.mean()


def test_chord_from_origin(rng):
    sys = build_constraints(4, (2, 2, 2))
    d = mean_zero_direction(rng, 16)
    lo, hi = chord(sys, np.zeros(16), d)
    ad = sys.lhs(d)
    assert lo < 0 < hi
    assert hi == pytest.approx(np.min(sys.rhs[ad > 0] / ad[ad > 0]))
    lo2, hi2 = chord(sys, np.zeros(16), -d)
    assert hi == pytest.approx(-lo2) and lo == pytest.approx(-hi2)
    assert membership(sys, hi * d).feasible and membership(sys, lo * d).feasible
    assert not membership(sys, 1.001 * hi * d).feasible


def test_chord_along_class1_functional_at_n2():
    sys = build_constraints(2, (2, 3, 5))
    d = np.array([1.0, -1.0, -1.0, 1.0]) / 2     # x00 + x11 - x10 - x01, unit norm
    lo, hi = chord(sys, np.zeros(4), d)
    assert hi * 2 == pytest.approx(3) and lo * 2 == pytest.approx(-3)


def test_chord_errors():
    sys = build_constraints(3, (2, 2, 2))
    with pytest.raises(ValueError):
        chord(sys, np.full(9, 0.0), np.ones(9))
    bad = np.zeros(9)
    bad[0], bad[1] = 50, -50
    with pytest.raises(ValueError):
        chord(sys, bad, mean_zero_direction(np.random.default_rng(0), 9))


def test_samples_feasible_mean_zero_and_reproducible():
    sys = build_constraints(5, (2, 3, 4))
    cfg = ChainConfig(seed=11, chains=3)
    X = sample_uniform(sys, 50, cfg)
    assert X.shape == (50, 25)
    assert all(membership(sys, x).feasible for x in X)
    assert np.all(np.abs(X.sum(axis=1)) < 1e-9)
    np.testing.assert_array_equal(X, sample_uniform(sys, 50, cfg))
    assert not np.array_equal(X, sample_uniform(sys, 50, ChainConfig(seed=12, chains=3)))


def test_sampler_rejects_empty_interior_and_bad_counts():
    with pytest.raises(ValueError):
        sample_uniform(build_constraints(3, (0, 2, 2)), 5)
    with pytest.raises(ValueError):
        sample_uniform(build_constraints(3, (2, 2, 2)), 0)
    with pytest.raises(ValueError):
        ChainConfig(thin=0)


def test_estimate_p_examples():
    assert estimate_p(np.zeros((10, 16)), 0.1) == (0.0, 0.0)
    w, _ = diameter_witness(4, (2, 2, 2))
    assert estimate_p(w[None, :], 0.2)[0] == 1.0
    assert estimate_p(w[None, :], 1e9)[0] == 0.0
    with pytest.raises(ValueError):
        estimate_p(np.empty((0, 16)), 0.1)


def test_batch_means_on_iid_data(rng):
    x = rng.standard_normal(20000)
    assert batch_means_stderr(x) == pytest.approx(1 / np.sqrt(20000), rel=0.4)


def test_lp_mass_on_witnesses():
    for n in (4, 6, 10):
        s = SlackVector(2, 2, 3, require_normalized=True)
        w, _ = diameter_witness(n, s)
        assert lp_mass_check(w, s).holds
    with pytest.raises(ValueError):
        lp_mass_check(np.zeros(16), (2, 2, 2))
