"""Small named triangulations and compact model surfaces."""
from __future__ import annotations

import numpy as np

from .core import SurfaceComplex, barycentric_subdivision, compact

TETRAHEDRON = [(0, 1, 2), (0, 3, 1), (0, 2, 3), (1, 3, 2)]


def tetrahedron() -> SurfaceComplex:
    return SurfaceComplex(4, TETRAHEDRON)


def octahedron() -> SurfaceComplex:
    # equator 0..3, north 4, south 5
    return bipyramid(4)


def bipyramid(n: int) -> SurfaceComplex:
    """Suspension of an n-cycle: equator ``0..n-1``, apexes ``n`` and ``n+1``."""
    top, bot = n, n + 1
    faces = []
    for i in range(n):
        j = (i + 1) % n
        faces.append((i, j, top))
        faces.append((j, i, bot))
    return SurfaceComplex(n + 2, faces)


def icosahedron() -> SurfaceComplex:
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    return SurfaceComplex(12, faces)


def torus7() -> SurfaceComplex:
    """Moebius-Kantor minimal torus: 7 vertices, 21 edges, 14 faces."""
    faces = []
    for i in range(7):
        faces.append((i, (i + 1) % 7, (i + 3) % 7))
        faces.append((i, (i + 3) % 7, (i + 2) % 7))
    return SurfaceComplex(7, faces)


def rp2_6() -> SurfaceComplex:
    """Six-vertex real projective plane (hemi-icosahedron)."""
    faces = [
        (0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 5, 1),
        (1, 2, 4), (2, 3, 5), (3, 4, 1), (4, 5, 2), (5, 1, 3),
    ]
    return SurfaceComplex(6, faces)


def mobius5() -> SurfaceComplex:
    """Five-face twisted strip on five vertices."""
    return SurfaceComplex(5, [(i, (i + 1) % 5, (i + 2) % 5) for i in range(5)])


def triangle() -> SurfaceComplex:
    return SurfaceComplex(3, [(0, 1, 2)])


def annulus(n: int = 3) -> SurfaceComplex:
    """Strip between an inner cycle ``0..n-1`` and an outer cycle ``n..2n-1``."""
    faces = []
    for i in range(n):
        j = (i + 1) % n
        faces.append((i, j, n + i))
        faces.append((j, n + j, n + i))
    return SurfaceComplex(2 * n, faces)


def grid_torus(m: int, n: int) -> SurfaceComplex:
    """m x n square grid on the torus, each square split along its diagonal."""
    if m < 3 or n < 3:
        raise ValueError("grid torus needs m, n >= 3")
    vid = lambda i, j: (i % m) * n + (j % n)
    faces = []
    for i in range(m):
        for j in range(n):
            a, b, c, d = vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)
            faces.append((a, b, c))
            faces.append((a, c, d))
    return SurfaceComplex(m * n, faces)


def grid_disk(m: int, n: int) -> SurfaceComplex:
    """m x n squares on the plane; 2mn faces."""
    vid = lambda i, j: i * (n + 1) + j
    faces = []
    for i in range(m):
        for j in range(n):
            a, b, c, d = vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)
            faces.append((a, b, c))
            faces.append((a, c, d))
    return SurfaceComplex((m + 1) * (n + 1), faces)


def connected_sum(a: SurfaceComplex, b: SurfaceComplex, fa: int = 0, fb: int = 0) -> SurfaceComplex:
    """Remove face ``fa`` of ``a`` and ``fb`` of ``b`` and glue the holes.

    The hole boundaries are identified with opposite orientations so the sum
    of orientable pieces stays coherently oriented.
    """
    ta = a.faces[fa]
    tb = b.faces[fb]
    nb = b.vertex_count
    vmap = np.arange(nb) + a.vertex_count
    vmap[tb[0]], vmap[tb[1]], vmap[tb[2]] = ta[0], ta[2], ta[1]
    keep_b = np.delete(b.faces, fb, axis=0)
    faces = np.concatenate([np.delete(a.faces, fa, axis=0), vmap[keep_b]])
    out, _ = compact(SurfaceComplex(a.vertex_count + nb, faces))
    return out


def disjoint_faces(cx: SurfaceComplex, k: int, avoid=()) -> list[int] | None:
    """Greedy choice of ``k`` pairwise vertex-disjoint faces."""
    used = set(avoid)
    chosen = []
    for f, tri in enumerate(cx.faces.tolist()):
        if len(chosen) == k:
            break
        if used.isdisjoint(tri):
            chosen.append(f)
            used.update(tri)
    return chosen if len(chosen) == k else None


def puncture(cx: SurfaceComplex, k: int, avoid=()) -> tuple[SurfaceComplex, list[tuple]]:
    """Remove ``k`` vertex-disjoint faces; returns the complex and hole cycles.

    Subdivides until enough disjoint faces exist.
    """
    while True:
        chosen = disjoint_faces(cx, k, avoid)
        if chosen is not None:
            break
        cx = barycentric_subdivision(cx).complex
    holes = [tuple(cx.faces[f].tolist()) for f in chosen]
    return SurfaceComplex(cx.vertex_count, np.delete(cx.faces, chosen, axis=0)), holes


def sphere_with_holes(k: int) -> tuple[SurfaceComplex, list[tuple]]:
    return puncture(icosahedron(), k)


def compact_model(orientable: bool, genus: int, boundary: int = 0) -> SurfaceComplex:
    """Sphere plus ``genus`` handles (orientable) or crosscaps, minus disks."""
    cx = icosahedron()
    piece = torus7 if orientable else rp2_6
    for _ in range(genus):
        cx = connected_sum(cx, piece(), fa=cx.n_faces - 1)
    if boundary:
        cx, _ = puncture(cx, boundary)
    return cx


def klein_bottle() -> SurfaceComplex:
    return compact_model(False, 2)


def pants() -> SurfaceComplex:
    return sphere_with_holes(3)[0]
