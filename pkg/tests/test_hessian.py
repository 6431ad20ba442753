import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from conftest import grid_field
from hessian_lab.hessian import (SlackVector, build_constraints, hessian_all, hessian_edge,
                                 membership, read_field_csv, write_field_csv)
from hessian_lab.quadratic import diameter_witness

finite = st.floats(-100, 100, allow_nan=False)


def test_constant_and_zero_fields():
    assert np.all(hessian_all(np.full(16, 3.7)) == 0)
    assert np.all(hessian_all(np.zeros(9)) == 0)


def test_bilinear_monomial_no_wrap():
    n = 8
    x = grid_field(n, lambda a, b: a * b)
    for v in [(0, 0), (2, 3), (5, 1)]:
        assert hessian_edge(x, 1, v) == -1


def test_isotropic_quadratic_has_unit_hessian():
    n = 9
    x = grid_field(n, lambda a, b: a * a - a * b + b * b)
    # anchors whose stencils stay inside [0, n)^2 (offsets reach +2)
    for r in range(3):
        for v in [(0, 0), (3, 2), (5, 5), (6, 6)]:
            assert hessian_edge(x, r, v) == 1


def test_table_matches_pointwise(rng):
    n = 5
    x = rng.standard_normal(n * n)
    H = hessian_all(x)
    for r in range(3):
        for v1 in range(n):
            for v2 in range(n):
                assert H[r, v1, v2] == pytest.approx(hessian_edge(x, r, (v1, v2)), abs=1e-12)


@given(arrays(float, 16, elements=finite), arrays(float, 16, elements=finite), finite)
def test_linearity(x, y, a):
    np.testing.assert_allclose(hessian_all(a * x + y), a * hessian_all(x) + hessian_all(y), atol=1e-8)


@given(st.integers(0, 5), st.integers(0, 5))
def test_translation_equivariance(u1, u2):
    n = 6
    x = np.random.default_rng(u1 * 7 + u2).standard_normal(n * n)
    moved = np.roll(x.reshape(n, n), (u1, u2), axis=(0, 1)).ravel()
    np.testing.assert_allclose(hessian_all(moved), np.roll(hessian_all(x), (u1, u2), axis=(1, 2)))


def test_constraint_shapes():
    sys = build_constraints(2, (2, 2, 2))
    assert sys.row_count == 12
    assert all(len(set(row)) == 4 for row in sys.idx)
    sys3 = build_constraints(3, (1, 2, 3))
    assert np.bincount(sys3.row_class).tolist() == [9, 9, 9]
    assert set(sys3.rhs[sys3.row_class == 2]) == {3.0}
    np.testing.assert_array_equal(sys3.coef.sum(axis=1), 0)
    assert np.all(np.abs(sys3.coef) == 1)


def test_incidence_lists():
    sys = build_constraints(4, (2, 2, 2))
    assert sys.incidence.shape == (16, 12)
    for v in range(16):
        assert np.all((sys.idx[sys.incidence[v]] == v).any(axis=1))


def test_pinned_cube_corners_feasible(rng):
    sys = build_constraints(3, SlackVector(2, 2, 2, require_normalized=True), "pinned")
    assert membership(sys, np.zeros(9)).feasible
    for _ in range(50):
        corner = rng.integers(0, 2, 9).astype(float)
        corner[0] = 0
        assert membership(sys, corner).feasible


def test_membership_examples():
    sys = build_constraints(4, (2, 2, 2))
    assert membership(sys, np.zeros(16)).feasible
    M = 4.0**4
    spike = np.zeros(16)
    spike[0], spike[5] = M, -M
    rep = membership(sys, spike)
    assert not rep.feasible and rep.worst_violation >= M
    assert membership(sys, diameter_witness(4, (2, 2, 2))[0]).feasible
    with pytest.raises(ValueError):
        membership(sys, np.zeros(9))


def test_translates_and_scaling_stay_feasible(rng):
    from hessian_lab.sampler import ChainConfig, sample_uniform
    sys = build_constraints(4, (2, 2, 3))
    x = sample_uniform(sys, 1, ChainConfig(seed=1))[0]
    for u in [(1, 0), (2, 3)]:
        assert membership(sys, np.roll(x.reshape(4, 4), u, axis=(0, 1)).ravel()).feasible
    assert membership(build_constraints(4, (5, 5, 7.5)), 2.5 * x).feasible


def test_slack_validation():
    with pytest.raises(ValueError):
        SlackVector(-1, 2, 2)
    with pytest.raises(ValueError):
        SlackVector(1, 2, 2, require_normalized=True)
    assert SlackVector(2, 3, 4, require_normalized=True).is_normalized_form


def test_csv_round_trip(tmp_path, rng):
    x = rng.standard_normal(25)
    path = tmp_path / "f.csv"
    write_field_csv(path, x)
    assert path.read_text().startswith("n,5\n")
    np.testing.assert_array_equal(read_field_csv(path), x)
