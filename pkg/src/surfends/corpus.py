"""Seeded test corpus: model surfaces, builder streams and random K."""
from __future__ import annotations

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import shortest_path

from .core import Subcomplex, SurfaceComplex, barycentric_subdivision, boundary_components
from . import models

STREAM_MANIFESTS = [
    {"kind": "builder", "name": "plane-grid", "params": {}},
    {"kind": "builder", "name": "cylinder", "params": {"width": 4}},
    {"kind": "builder", "name": "flute", "params": {}},
    {"kind": "builder", "name": "jacobs-ladder", "params": {}},
    {"kind": "builder", "name": "crosscap-strip", "params": {}},
    {"kind": "builder", "name": "binary-tree", "params": {}},
    {"kind": "builder", "name": "finite-type", "params": {"genus": 1, "boundary": 1, "ends": 2, "orientable": True}},
]

# declared signatures; None where the end space is not a finite set
STREAM_SIGNATURES = {
    "plane-grid": ("orientable", 0, 0, (1, 0, 0)),
    "cylinder": ("orientable", 0, 0, (2, 0, 0)),
    "flute": None,
    "jacobs-ladder": ("orientable", "infinite", 0, (2, 2, 0)),
    "crosscap-strip": ("infinitely-nonorientable", "infinite", 0, (1, 1, 1)),
    "binary-tree": None,
    "finite-type": ("orientable", 1, 1, (2, 0, 0)),
}


def model_grid(max_genus: int = 2, max_boundary: int = 2):
    """(orientable, genus value, boundary) triples.

    Non-orientable entries use crosscap number g + 1 so each orientable
    genus has a partner.
    """
    out = []
    for ori in (True, False):
        for g in range(max_genus + 1):
            for b in range(max_boundary + 1):
                out.append((ori, g if ori else g + 1, b))
    return out


def model_name(ori: bool, g: int, b: int) -> str:
    return f"{'O' if ori else 'N'}{g}b{b}"


def vertex_distances(cx: SurfaceComplex) -> np.ndarray:
    e = cx.edges
    n = cx.vertex_count
    g = sparse.coo_matrix((np.ones(len(e)), (e[:, 0], e[:, 1])), shape=(n, n))
    return shortest_path(g, directed=False, unweighted=True)


def random_k(cx: SurfaceComplex, rng: np.random.Generator, m: int, touch_boundary: bool = False,
             kinds=("vertex", "link", "star", "edge")) -> Subcomplex | None:
    """K with ``m`` components placed around far-apart vertices.

    Each component is a vertex, the link cycle of a vertex, its closed star
    or one edge.  With ``touch_boundary`` the first centre is a boundary
    vertex (so K meets the boundary); otherwise K avoids the boundary.
    """
    dist = vertex_distances(cx)
    bv = cx.boundary_vertex_mask
    used = cx.used_vertices
    # keep away from the boundary unless asked to touch it
    if bv.any():
        dmin = dist[:, bv].min(axis=1)
    else:
        dmin = np.full(cx.vertex_count, np.inf)
    interior = used[dmin[used] >= 2]
    centres = []
    if touch_boundary:
        cand = used[bv[used]]
        if not len(cand):
            return None
        centres.append(int(rng.choice(cand)))
    pool = list(rng.permutation(interior))
    for v in pool:
        if len(centres) >= m:
            break
        if all(dist[v, c] >= 4 for c in centres):
            centres.append(int(v))
    if len(centres) < m:
        return None
    faces, edges, verts = [], [], []
    for i, c in enumerate(centres):
        kind = "star" if (touch_boundary and i == 0) else str(rng.choice(list(kinds)))
        star = np.flatnonzero((cx.faces == c).any(axis=1))
        if kind == "vertex":
            verts.append(c)
        elif kind == "star":
            faces += star.tolist()
        elif kind == "edge":
            nbr = sorted({int(x) for x in cx.faces[star].reshape(-1) if x != c})
            edges.append((c, int(rng.choice(nbr))))
        else:
            tri = cx.faces[star]
            for t in tri.tolist():
                o = [x for x in t if x != c]
                edges.append((min(o), max(o)))
    return Subcomplex.closure(cx, faces, edges, verts)[0]


def compact_corpus(seed: int, max_genus: int = 2, max_boundary: int = 2, subdivide: bool = True):
    """Finite models with one random K each."""
    rng = np.random.default_rng(seed)
    out = []
    for ori, g, b in model_grid(max_genus, max_boundary):
        cx = models.compact_model(ori, g, b)
        if subdivide:
            cx = barycentric_subdivision(cx).complex
        m = int(rng.integers(1, 4))
        K = None
        while K is None and m >= 1:
            K = random_k(cx, rng, m)
            m -= 0 if K is not None else 1
        out.append({"name": model_name(ori, g, b), "surface": cx, "K": K, "m": m,
                    "signature": {"orientability_class": "orientable" if ori else ("nonorientable-odd" if g % 2 else "nonorientable-even"),
                                  "genus": g, "boundary_circles": b, "end_data": [0, 0, 0]}})
    return out


def corpus_files(seed: int, max_genus: int = 2, max_boundary: int = 2) -> dict:
    """Relative path -> JSON object for every corpus artifact plus a manifest."""
    files = {}
    entries = []
    for item in compact_corpus(seed, max_genus, max_boundary):
        name = item["name"]
        files[f"models/{name}.json"] = item["surface"].to_dict()
        kpath = None
        if item["K"] is not None:
            kpath = f"k/{name}.json"
            files[kpath] = item["K"].to_dict()
        entries.append({"name": name, "kind": "surface", "path": f"models/{name}.json", "k": kpath,
                        "expected_signature": item["signature"]})
    for man in STREAM_MANIFESTS:
        name = man["name"]
        files[f"streams/{name}.json"] = man
        sig = STREAM_SIGNATURES[name]
        exp = None if sig is None else {"orientability_class": sig[0], "genus": sig[1],
                                        "boundary_circles": sig[2], "end_data": list(sig[3])}
        entries.append({"name": name, "kind": "stream", "path": f"streams/{name}.json", "expected_signature": exp})
    files["manifest.json"] = {"seed": seed, "grid": {"max_genus": max_genus, "max_boundary": max_boundary},
                              "artifacts": entries,
                              "counts": {"models": sum(e["kind"] == "surface" for e in entries),
                                         "streams": sum(e["kind"] == "stream" for e in entries)}}
    return files


def fine_model(ori: bool, g: int, b: int, min_vertices: int = 60) -> SurfaceComplex:
    """Compact model subdivided until it has room for several K pieces."""
    cx = models.compact_model(ori, g, b)
    while len(cx.used_vertices) < min_vertices:
        cx = barycentric_subdivision(cx).complex
    return cx


def bound_cases(seed: int, count: int = 200, max_genus: int = 3, max_m: int = 4, touch_boundary: bool = False):
    """Random (surface, K, m) triples for the end-count bounds.

    With ``touch_boundary`` only bordered models are used and K always
    meets the boundary.
    """
    rng = np.random.default_rng(seed)
    grid = [(o, g, b) for o in (True, False) for g in range(0 if o else 1, max_genus + 1)
            for b in range(1 if touch_boundary else 0, 3)]
    cache = {}
    out = []
    i = 0
    while len(out) < count:
        ori, g, b = grid[i % len(grid)]
        i += 1
        key = (ori, g, b)
        if key not in cache:
            cache[key] = fine_model(ori, g, b)
        cx = cache[key]
        m = int(rng.integers(1, max_m + 1))
        K = random_k(cx, rng, m, touch_boundary=touch_boundary)
        if K is None or K.empty:
            continue
        out.append({"name": f"{model_name(ori, g, b)}-{len(out)}", "surface": cx, "K": K,
                    "orientable": ori, "genus": g, "boundary": b})
    return out


def stream_cases(seed: int, per_stream: int = 2):
    """(stream, K) pairs: K is a random face or closed vertex star inside F_1."""
    from .builders import Cylinder, stream_from_manifest
    rng = np.random.default_rng(seed)
    out = []
    for man in STREAM_MANIFESTS:
        for j in range(per_stream):
            s = stream_from_manifest(man)
            win = s.window(1)
            cx = win.complex
            f1 = np.flatnonzero(win.layer <= 1)
            if j % 2 == 0:
                K = Subcomplex.from_faces(cx, [int(rng.choice(f1))])
            else:
                inner = [v for v in np.unique(cx.faces[f1]).tolist() if not cx.boundary_vertex_mask[v]]
                inner = inner or np.unique(cx.faces[f1]).tolist()
                v = int(rng.choice(inner))
                K = Subcomplex.from_faces(cx, np.flatnonzero((cx.faces == v).any(axis=1)).tolist())
            out.append({"name": f"{man['name']}-{j}", "stream": s, "K": K})
    cyl = Cylinder(4)
    cx = cyl.window(2).complex
    out.append({"name": "cylinder-meridian", "stream": cyl,
                "K": Subcomplex.from_edges(cx, cyl.meridian_edges(0))})
    return out


def _link_edges(cx: SurfaceComplex, v: int) -> list:
    out = []
    for t in cx.faces[(cx.faces == v).any(axis=1)].tolist():
        a, b = (x for x in t if x != v)
        out.append((min(a, b), max(a, b)))
    return out


def automorphism_cases(horizon: int = 6):
    """(name, map, K, horizon) cases: finite symmetry groups plus declared stream maps."""
    from .builders import Cylinder, PlaneGrid
    from .dynamics import SimplicialAutomorphism, automorphism_group, element_of_order
    out = []
    oc = models.octahedron()
    group = automorphism_group(oc)
    for name, K in (("equator", Subcomplex.from_edges(oc, [(0, 1), (1, 2), (2, 3), (0, 3)])),
                    ("poles", Subcomplex.closure(oc, vertices=[4, 5])[0])):
        for i, g in enumerate(group):
            f = SimplicialAutomorphism(oc, g, name=f"oct-{i}")
            if f.preserves(K):
                out.append({"name": f"octahedron-{name}-{i}", "f": f, "K": K, "horizon": None})
    ico = models.icosahedron()
    gi = automorphism_group(ico)
    g5 = element_of_order(gi, ico, 5)
    fixed = [v for v in range(12) if g5[v] == v]
    K5 = Subcomplex.closure(ico, vertices=fixed)[0]
    f5 = SimplicialAutomorphism(ico, g5, name="ico-5")
    out.append({"name": "icosahedron-order5", "f": f5, "K": K5, "horizon": None})
    g3 = element_of_order(gi, ico, 3)
    sd1 = barycentric_subdivision(ico)
    sd2 = barycentric_subdivision(sd1.complex)
    S = sd2.complex
    orb = [0]
    while len(orb) < 3:
        orb.append(int(g3[orb[-1]]))
    K3 = Subcomplex.from_edges(S, [e for v in orb for e in _link_edges(S, v)])
    f3 = SimplicialAutomorphism(S, sd2.lift_vertex_map(sd1.lift_vertex_map(g3)), name="sd2-ico-3")
    out.append({"name": "sd2-icosahedron-order3", "f": f3, "K": K3, "horizon": None})
    out.append({"name": "sd2-icosahedron-order3-squared", "f": f3.compose(f3), "K": K3, "horizon": None})
    cyl = Cylinder(4)
    win = cyl.window(horizon + 1).complex
    Km = Subcomplex.from_edges(win, cyl.meridian_edges(0))
    for nm in sorted(cyl.automorphisms()):
        out.append({"name": f"cylinder-{nm}", "f": SimplicialAutomorphism.from_stream(cyl, nm, horizon),
                    "K": Km, "horizon": horizon})
    pl = PlaneGrid()
    win = pl.window(horizon + 1).complex
    Kb = Subcomplex.from_faces(win, pl.centered_block(2))
    for nm in sorted(pl.automorphisms()):
        out.append({"name": f"plane-{nm}", "f": SimplicialAutomorphism.from_stream(pl, nm, horizon),
                    "K": Kb, "horizon": horizon})
    return out
