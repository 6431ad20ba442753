import numpy as np
import pytest
from hypothesis import given, strategies as st

from hessian_lab.torus import TorusLattice, VertexId, build_torus, rhombus_stencil


def as_set(stencil):
    return {((v.v1, v.v2), c) for v, c in stencil}


@pytest.mark.parametrize("n, verts, rhombi", [(3, 9, 27), (2, 4, 12)])
def test_counts(n, verts, rhombi):
    lat = build_torus(n)
    assert lat.vertex_count == verts
    assert lat.rhombus_count == rhombi == len(list(lat.rhombi()))


def test_rejects_degenerate_size():
    with pytest.raises(ValueError):
        build_torus(1)


def test_stencil_examples():
    lat5, lat2 = build_torus(5), build_torus(2)
    assert as_set(rhombus_stencil(lat5, 1, VertexId(0, 0))) == {
        ((1, 0), 1), ((0, 1), 1), ((0, 0), -1), ((1, 1), -1)}
    assert as_set(rhombus_stencil(lat5, 0, VertexId(0, 0))) == {
        ((1, 0), -1), ((1, 1), -1), ((0, 0), 1), ((2, 1), 1)}
    assert as_set(rhombus_stencil(lat2, 1, VertexId(1, 1))) == {
        ((0, 1), 1), ((1, 0), 1), ((1, 1), -1), ((0, 0), -1)}


@given(n=st.integers(2, 9), r=st.integers(0, 2), v1=st.integers(0, 50), v2=st.integers(0, 50))
def test_stencil_distinct_and_balanced(n, r, v1, v2):
    sten = rhombus_stencil(TorusLattice(n), r, VertexId(v1 % n, v2 % n))
    assert len({v for v, _ in sten}) == 4
    assert sum(c for _, c in sten) == 0


@given(n=st.integers(2, 9), r=st.integers(0, 2), v=st.tuples(st.integers(0, 8), st.integers(0, 8)),
       u=st.tuples(st.integers(0, 8), st.integers(0, 8)))
def test_translation_commutes(n, r, v, u):
    lat = TorusLattice(n)
    base = rhombus_stencil(lat, r, VertexId(v[0] % n, v[1] % n))
    moved = rhombus_stencil(lat, r, VertexId((v[0] + u[0]) % n, (v[1] + u[1]) % n))
    shifted = {(((p.v1 + u[0]) % n, (p.v2 + u[1]) % n), c) for p, c in base}
    assert as_set(moved) == shifted


def test_stencil_arrays_match_scalar_form():
    lat = TorusLattice(4)
    idx, signs = lat.stencil_arrays()
    for r, v in lat.rhombi():
        row = {(lat.vertex(i), int(c)) for i, c in zip(idx[r, lat.index(v.v1, v.v2)], signs[r])}
        assert row == set(rhombus_stencil(lat, r, v))
    np.testing.assert_array_equal(signs.sum(axis=1), 0)
