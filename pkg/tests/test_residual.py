import numpy as np
import pytest

from surfends import models
from surfends.builders import Cylinder, PlaneGrid, jacobs_ladder
from surfends.core import Region, Subcomplex, SurfaceError, barycentric_subdivision, genus
from surfends.exhaustion import validate_exhaustion
from surfends.residual import (
    augment,
    c18_decide,
    canonical_exhaustion,
    check_end_bound,
    domain_ends,
    frontier_components,
    region_frontier,
    relatively_compact_ends,
    residual_domains,
    union_of_impressions,
    verify_canonical,
)

EQUATOR = [(0, 1), (1, 2), (2, 3), (0, 3)]


def link(cx, v):
    out = []
    for t in cx.faces[(cx.faces == v).any(axis=1)].tolist():
        a, b = (x for x in t if x != v)
        out.append((min(a, b), max(a, b)))
    return out


@pytest.fixture
def sphere_equator():
    cx = models.octahedron()
    return cx, Subcomplex.from_edges(cx, EQUATOR)


@pytest.fixture
def sphere_two_cycles():
    # links of antipodal icosahedron vertices 0 and 3 bound a middle annulus
    cx = models.icosahedron()
    K = Subcomplex.from_edges(cx, link(cx, 0) + link(cx, 3))
    doms = residual_domains(cx, K)
    middle = max(doms, key=lambda d: len(d.faces))
    return cx, K, middle


def test_sphere_equator_two_bounded(sphere_equator):
    cx, K = sphere_equator
    doms = residual_domains(cx, K)
    assert len(doms) == 2 and all(d.bounded for d in doms)
    assert sorted(len(d.faces) for d in doms) == [4, 4]


def test_torus_meridian_one_domain():
    cx = models.grid_torus(4, 4)
    K = Subcomplex.from_edges(cx, [(j, (j + 1) % 4) for j in range(4)])
    doms = residual_domains(cx, K)
    assert len(doms) == 1
    b = check_end_bound(cx, K, doms[0])
    assert (b.count, b.bound, b.ok, b.tight) == (2, 2, True, True)


def test_plane_one_face_unbounded():
    s = PlaneGrid()
    K = Subcomplex.from_faces(s.window(2).complex, [0])
    doms = residual_domains(s, K, 6)
    assert len(doms) == 1 and not doms[0].bounded


def test_frontier_counts(sphere_equator, sphere_two_cycles):
    cx, K = sphere_equator
    d = residual_domains(cx, K)[0]
    assert len(frontier_components(cx, d, K)) == 1
    cx2, K2, mid = sphere_two_cycles
    rep = frontier_components(cx2, mid, K2)
    assert len(rep) == 2
    assert sorted(rep.end_to_piece.values()) == [0, 1]
    s = PlaneGrid()
    Kf = Subcomplex.from_faces(s.window(2).complex, [0])
    d = residual_domains(s, Kf, 6)[0]
    assert len(frontier_components(s, d, Kf, 6)) == 1


def test_canonical_plane_block():
    s = PlaneGrid()
    cx = s.window(2).complex
    K = Subcomplex.from_faces(cx, s.block(-1, -1, 2, 2))
    c = canonical_exhaustion(s, K, 0, 8)
    cl = c.claims()
    assert cl["U_minus_connected"] and cl["U_plus_components"] == 1 and cl["xi_cycles"] == 1
    assert cl["one_cycle_each"] and cl["P13_in_F0"]
    assert c.n_collars == 1
    # U_minus is an annulus: one K-side collar, one outer cycle
    assert c.p12(0)["disk_neighbourhood"]
    ends = relatively_compact_ends(c)
    assert len(ends) == 1 and ends[0].regular
    assert union_of_impressions(ends).edges == region_frontier(s, c.domain, 8).edges
    assert verify_canonical(c, 4)["ok"]


def test_canonical_cylinder_face():
    # the complement of a face is connected and runs off in both directions
    s = Cylinder()
    K = Subcomplex.from_faces(s.window(2).complex, [0])
    c = canonical_exhaustion(s, K, 0, 8)
    cl = c.claims()
    assert cl["U_plus_components"] == 2 and cl["xi_cycles"] == 2 and cl["one_cycle_each"]
    assert verify_canonical(c, 4)["ok"]


def test_canonical_cylinder_meridian_two_domains():
    s = Cylinder()
    K = Subcomplex.from_edges(s.window(2).complex, s.meridian_edges(0))
    doms = residual_domains(s, K, 8)
    assert len(doms) == 2 and not any(d.bounded for d in doms)
    for d in doms:
        c = canonical_exhaustion(s, K, d, 8)
        assert c.claims()["U_plus_components"] == 1
        assert verify_canonical(c, 4)["ok"]


def test_canonical_compact_has_no_plus(sphere_equator):
    cx, K = sphere_equator
    c = canonical_exhaustion(cx, K, 0)
    assert len(c.U_plus) == 0 and c.n0 == 0 and c.xi == []
    assert c.n_collars == 1


def test_two_cycles_impressions(sphere_two_cycles):
    cx, K, mid = sphere_two_cycles
    c = canonical_exhaustion(cx, K, mid)
    ends = relatively_compact_ends(c)
    assert len(ends) == 2
    cycles = sorted(sorted(e.impression.cells.edges) for e in ends)
    assert cycles == sorted([sorted(link(cx, 0)), sorted(link(cx, 3))])


def test_plane_face_split():
    s = PlaneGrid()
    K = Subcomplex.from_faces(s.window(2).complex, [0])
    c = canonical_exhaustion(s, K, 0, 8)
    v = verify_canonical(c, 4)
    assert v["ok"]
    assert (v["split"]["U_minus_ends"], v["split"]["U_plus_ends"]) == (1, 1)
    assert v["split"]["shared_nodes"] == 0


def test_domain_stream_is_exhaustion():
    s = jacobs_ladder()
    K = Subcomplex.from_faces(s.window(1).complex, [0, 1])
    c = canonical_exhaustion(s, K, 0, 10)
    assert validate_exhaustion(c.stream, 4).valid


def test_bounds_examples(sphere_two_cycles):
    cx, K, mid = sphere_two_cycles
    b = check_end_bound(cx, K, mid)
    assert (b.count, b.bound, b.tight) == (2, 2, True)
    t = barycentric_subdivision(models.torus7()).complex
    Kt = Subcomplex.from_edges(t, link(t, 0))
    doms = residual_domains(t, Kt)
    big = max(doms, key=lambda d: len(d.faces))
    b = check_end_bound(t, Kt, big)
    assert (b.count, b.bound, b.ok) == (1, 2, True)


def test_bound_with_boundary_contact():
    d = models.grid_disk(4, 4)
    v = int(np.flatnonzero(d.boundary_vertex_mask)[0])
    K = Subcomplex.from_faces(d, np.flatnonzero((d.faces == v).any(axis=1)))
    dom = residual_domains(d, K)[0]
    b = check_end_bound(d, K, dom)
    assert b.augmented and (b.m, b.n, b.g, b.bound) == (1, 1, 0, 2)
    assert b.ok


def test_augment_closes_surface():
    cx, holes = models.sphere_with_holes(3)
    a = augment(cx)
    assert a.n_cycles == 3
    g = genus(a.complex)
    assert g.orientable and g.value == 0
    assert not a.complex.boundary_edge_mask.any()


def test_c18(sphere_equator):
    cx, K = sphere_equator
    d = residual_domains(cx, K)[0]
    r = c18_decide(cx, d.region)
    assert r.is_residual_of_finite_K
    assert sorted(r.witness.edges) == sorted(K.edges)
    s = PlaneGrid()
    h = 8
    win = s.window(h + 1)
    upper = np.flatnonzero([s.face_square(f)[1] >= 0 for f in range(win.complex.n_faces)])
    r = c18_decide(s, Region(upper), h)
    assert not r.is_residual_of_finite_K
    assert r.evidence["reason"] == "frontier not compact at horizon"
    Kb = Subcomplex.from_faces(s.window(2).complex, s.block(-1, -1, 2, 2))
    d = residual_domains(s, Kb, h)[0]
    r = c18_decide(s, d.region, h)
    assert r.is_residual_of_finite_K


def test_k_beyond_horizon_rejected():
    s = PlaneGrid()
    far = int(np.flatnonzero(s.window(6).layer == 6)[0])
    K = Subcomplex.from_faces(s.window(6).complex, [far])
    with pytest.raises(SurfaceError):
        residual_domains(s, K, 3)


def test_domain_ends_matches_canonical(sphere_two_cycles):
    cx, K, mid = sphere_two_cycles
    info = domain_ends(cx, K)
    counts = {x["domain"].index: len(x["ends"]) for x in info}
    assert counts[mid.index] == 2 and sum(counts.values()) == 4


def test_p12_collar_against_boundary():
    # K touches the boundary, so the collar interface is an arc closed up in S*
    from surfends.builders import finite_type
    s = finite_type(1, 1, 2)
    K = Subcomplex.from_faces(s.window(1).complex, [12])
    c = domain_ends(s, K, 10)[0]["canon"]
    p = c.p12(0)
    assert p["boundary_contact"] and p["closed"] and p["genus"] == 0 and p["orientable"]
