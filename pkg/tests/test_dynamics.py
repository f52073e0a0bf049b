import numpy as np
import pytest

from surfends import models
from surfends.builders import Cylinder
from surfends.core import Subcomplex, SurfaceError
from surfends.corpus import automorphism_cases
from surfends.dynamics import (
    InvarianceError,
    SimplicialAutomorphism,
    automorphism_group,
    element_of_order,
    induced_domain_map,
    induced_end_map,
    verify_p51,
)

EQUATOR = [(0, 1), (1, 2), (2, 3), (0, 3)]


@pytest.fixture(scope="module")
def oct_group():
    return automorphism_group(models.octahedron())


def test_group_orders(oct_group):
    assert len(oct_group) == 48
    assert len(automorphism_group(models.icosahedron())) == 120
    assert len(automorphism_group(models.tetrahedron())) == 24


def test_identity():
    cx = models.octahedron()
    K = Subcomplex.from_edges(cx, EQUATOR)
    f = SimplicialAutomorphism.identity(cx)
    assert induced_domain_map(f, K).perm == [0, 1]
    assert induced_end_map(f, K).perm == [0, 1]
    r = verify_p51(f, K)
    assert r["all_periodic"] and r["orbit_lengths"] == [1, 1]


def test_equator_reflection_fixes_ends():
    cx = models.octahedron()
    K = Subcomplex.from_edges(cx, EQUATOR)
    # reflection in the equatorial plane would swap 4 and 5; this one fixes the poles
    f = SimplicialAutomorphism(cx, [0, 3, 2, 1, 4, 5])
    assert f.order() == 2
    assert induced_end_map(f, K).perm == [0, 1]


def test_pole_swap_swaps_domains():
    cx = models.octahedron()
    K = Subcomplex.from_edges(cx, EQUATOR)
    f = SimplicialAutomorphism(cx, [0, 1, 2, 3, 5, 4])
    assert induced_domain_map(f, K).perm == [1, 0]
    r = verify_p51(f, K)
    assert r["orbit_lengths"] == [2] and r["naturality"]


def test_two_blocks_transposed(oct_group):
    cx = models.octahedron()
    a, b = 0, int(cx.face_index([[2, 3, 5]])[0])
    K = Subcomplex.from_faces(cx, [a, b])
    f = next(SimplicialAutomorphism(cx, g) for g in oct_group
             if SimplicialAutomorphism(cx, g).order() == 2 and SimplicialAutomorphism(cx, g).face_map[a] == b)
    ep = induced_end_map(f, K)
    assert ep.perm == [1, 0] and ep.naturality


def test_order_three_three_cycle():
    case = next(c for c in automorphism_cases() if c["name"] == "sd2-icosahedron-order3")
    f, K = case["f"], case["K"]
    assert f.order() == 3
    dp = induced_domain_map(f, K)
    r = verify_p51(f, K)
    assert set(r["orbit_lengths"]) <= {1, 3} and r["all_periodic"] and r["naturality"]
    # three outer disks permuted cyclically, the middle domain fixed
    perm = dp.perm
    fixed = [i for i, p in enumerate(perm) if p == i]
    assert len(fixed) == 1 and len(perm) == 4


def test_cylinder_shift_periodic():
    c = Cylinder(4)
    h = 6
    K = Subcomplex.from_edges(c.window(h + 1).complex, c.meridian_edges(0))
    f = SimplicialAutomorphism.from_stream(c, "rotation-1", h)
    assert f.order() == 4 and f.preserves(K)
    r = verify_p51(f, K, h)
    assert r["all_periodic"] and r["orbit_lengths"] == [1, 1]
    flip = SimplicialAutomorphism.from_stream(c, "point-reflection", h)
    assert verify_p51(flip, K, h)["orbit_lengths"] == [2]
    ep = induced_end_map(f, K, h)
    assert "excluded" in ep.to_dict()


def test_undeclared_stream_map_rejected():
    with pytest.raises(SurfaceError):
        SimplicialAutomorphism.from_stream(Cylinder(4), "shear", 4)


def test_non_automorphism_rejected():
    cx = models.octahedron()
    with pytest.raises(SurfaceError):
        SimplicialAutomorphism(cx, [1, 0, 2, 3, 4, 5])
    with pytest.raises(SurfaceError):
        SimplicialAutomorphism(cx, [0, 0, 2, 3, 4, 5])


def test_k_not_invariant(oct_group):
    cx = models.octahedron()
    K = Subcomplex.from_faces(cx, [0])
    f = next(SimplicialAutomorphism(cx, g) for g in oct_group if SimplicialAutomorphism(cx, g).face_map[0] != 0)
    with pytest.raises(InvarianceError):
        induced_end_map(f, K)


def test_composition(oct_group):
    cx = models.octahedron()
    K = Subcomplex.from_edges(cx, EQUATOR)
    stab = [SimplicialAutomorphism(cx, g) for g in oct_group]
    stab = [f for f in stab if f.preserves(K)]
    assert len(stab) == 16
    rng = np.random.default_rng(0)
    for _ in range(10):
        i, j = rng.integers(0, len(stab), 2)
        f, g = stab[i], stab[j]
        pf, pg = induced_end_map(f, K).perm, induced_end_map(g, K).perm
        assert induced_end_map(f.compose(g), K).perm == [pf[pg[x]] for x in range(len(pg))]


def test_element_orders(oct_group):
    cx = models.octahedron()
    for k in (2, 3, 4):
        g = element_of_order(oct_group, cx, k)
        assert SimplicialAutomorphism(cx, g).order() == k
