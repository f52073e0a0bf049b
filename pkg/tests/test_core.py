import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from surfends import models
from surfends.core import (
    Region,
    Subcomplex,
    SurfaceComplex,
    SurfaceError,
    barycentric_subdivision,
    boundary_components,
    disjoint_union,
    euler_characteristic,
    face_components,
    genus,
    is_orientable,
    orientation_conflict,
    relabel,
    validate_surface,
)

CLOSED = {
    "tetrahedron": (models.tetrahedron, 2, True, 0),
    "octahedron": (models.octahedron, 2, True, 0),
    "icosahedron": (models.icosahedron, 2, True, 0),
    "torus7": (models.torus7, 0, True, 1),
    "rp2": (models.rp2_6, 1, False, 1),
    "klein": (models.klein_bottle, 0, False, 2),
}


def test_tetrahedron_valid():
    assert validate_surface(models.tetrahedron()).valid


def test_three_faces_on_one_edge():
    cx = SurfaceComplex(5, [[0, 1, 2], [0, 1, 3], [0, 1, 4]])
    rep = validate_surface(cx)
    assert not rep.valid
    v = [x for x in rep.violations if x["kind"] == "edge_incidence"]
    assert v and v[0]["incidence"] == 3 and v[0]["edge"] == [0, 1]


def test_pinched_vertex_reported():
    # two triangles sharing only vertex 0: its link is two disjoint edges
    cx = SurfaceComplex(5, [[0, 1, 2], [0, 3, 4]])
    rep = validate_surface(cx)
    assert {"kind": "pinched_vertex", "vertex": 0} in rep.violations


def test_two_tetrahedra_wedge_is_pinched():
    t = models.tetrahedron().faces.tolist()
    faces = t + [[0 if v == 0 else v + 3 for v in f] for f in t]
    rep = validate_surface(SurfaceComplex(7, faces))
    assert rep.kinds() == {"pinched_vertex"}


def test_components():
    assert face_components(models.octahedron())[1] == 1
    both = disjoint_union(models.octahedron(), models.torus7())
    assert face_components(both)[1] == 2
    assert face_components(models.grid_disk(100, 100))[1] == 1


@pytest.mark.parametrize("cx,chi", [
    (models.tetrahedron(), 2), (models.torus7(), 0), (models.triangle(), 1),
])
def test_euler(cx, chi):
    assert euler_characteristic(cx) == chi


def test_torus7_counts():
    cx = models.torus7()
    assert (len(cx.used_vertices), cx.n_edges, cx.n_faces) == (7, 21, 14)


def test_boundary_cycles():
    tri = boundary_components(models.triangle())
    assert len(tri) == 1 and len(tri[0]) == 3
    assert len(boundary_components(models.annulus())) == 2
    assert boundary_components(models.torus7()) == []


def test_mobius_conflict_edge():
    cx = models.mobius5()
    assert cx.n_faces == 5
    assert not is_orientable(cx)
    assert orientation_conflict(cx) is not None
    assert is_orientable(models.torus7())
    assert not is_orientable(models.klein_bottle())


@pytest.mark.parametrize("name", sorted(CLOSED))
def test_closed_models(name):
    make, chi, ori, g = CLOSED[name]
    cx = make()
    assert validate_surface(cx).valid
    assert euler_characteristic(cx) == chi
    gg = genus(cx)
    assert (gg.orientable, gg.value) == (ori, g)


def test_pants():
    cx = models.pants()
    assert euler_characteristic(cx) == -1
    assert len(boundary_components(cx)) == 3
    g = genus(cx)
    assert g.orientable and g.value == 0


@pytest.mark.parametrize("ori,g,b", [(True, 0, 0), (True, 2, 1), (True, 3, 2), (False, 1, 0), (False, 2, 2), (False, 3, 1)])
def test_compact_model(ori, g, b):
    cx = models.compact_model(ori, g, b)
    assert validate_surface(cx).valid
    gg = genus(cx)
    assert (gg.orientable, gg.value, len(boundary_components(cx))) == (ori, g, b)


def test_genus_rejects_disconnected():
    with pytest.raises(SurfaceError):
        genus(disjoint_union(models.tetrahedron(), models.tetrahedron()))


def test_closure_adds_faces_of_cells():
    cx = models.octahedron()
    K, added = Subcomplex.closure(cx, faces=[0])
    assert len(K.edges) == 3 and len(K.vertices) == 3
    assert added == {"edges": 3, "vertices": 3}
    assert K.n_components() == 1


def test_region_frontier_of_star():
    cx = models.octahedron()
    star = np.flatnonzero((cx.faces == 4).any(axis=1))
    fr = Region(star).frontier(cx)
    assert sorted(fr.vertices) == [0, 1, 2, 3]
    assert len(fr.edges) == 4 and not fr.faces
    assert Region(star).is_connected(cx)


SMALL = [models.tetrahedron, models.torus7, models.rp2_6, models.mobius5, models.annulus, models.pants]


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(SMALL), st.randoms(use_true_random=False))
def test_relabel_invariance(make, rnd):
    cx = make()
    perm = list(range(cx.vertex_count))
    rnd.shuffle(perm)
    cy = relabel(cx, perm)
    assert euler_characteristic(cy) == euler_characteristic(cx)
    assert genus(cy) == genus(cx)
    assert len(boundary_components(cy)) == len(boundary_components(cx))
    assert validate_surface(cy).valid


@settings(max_examples=12, deadline=None)
@given(st.sampled_from(SMALL))
def test_subdivision_invariance(make):
    cx = make()
    sd = barycentric_subdivision(cx)
    s = sd.complex
    assert s.n_faces == 6 * cx.n_faces
    assert euler_characteristic(s) == euler_characteristic(cx)
    assert genus(s) == genus(cx)
    assert len(boundary_components(s)) == len(boundary_components(cx))
    assert np.array_equal(sd.face_parent(), np.arange(s.n_faces) // 6)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 8), st.integers(2, 8), st.data())
def test_components_partition(m, n, data):
    cx = models.grid_disk(m, n)
    blocked = data.draw(st.lists(st.booleans(), min_size=cx.n_edges, max_size=cx.n_edges))
    labels, k = face_components(cx, blocked_edges=np.asarray(blocked))
    assert labels.shape == (cx.n_faces,)
    assert set(labels.tolist()) == set(range(k))
    # unblocked interior edges never separate their two faces
    ef = cx.edge_faces
    keep = ~np.asarray(blocked) & (ef[:, 1] >= 0)
    assert np.array_equal(labels[ef[keep, 0]], labels[ef[keep, 1]])
