"""Finite triangulated surfaces with boundary.

A :class:`SurfaceComplex` is an abstract simplicial 2-complex given by a
vertex count and a list of oriented triangles.  Everything here is
vectorised over numpy arrays so that meshes with millions of faces stay
cheap; connected components go through ``scipy.sparse.csgraph``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components

__all__ = [
    "SurfaceComplex",
    "Subcomplex",
    "Region",
    "ValidationReport",
    "Genus",
    "BoundaryCycle",
    "Subdivision",
    "SurfaceError",
    "validate_surface",
    "connected_components_of",
    "euler_characteristic",
    "boundary_components",
    "orientability",
    "genus",
    "barycentric_subdivision",
    "relabel",
    "disjoint_union",
    "face_components",
    "group_by_label",
    "is_orientable",
    "orientation_conflict",
    "coherent_orientation",
    "compact",
    "sub_complex",
    "surface_genus_of_faces",
]


class SurfaceError(ValueError):
    """Raised when an operation's precondition on a complex fails."""


def _edge_keys(u: np.ndarray, v: np.ndarray, n: int) -> np.ndarray:
    lo = np.minimum(u, v).astype(np.int64)
    hi = np.maximum(u, v).astype(np.int64)
    return lo * max(n, 1) + hi


class SurfaceComplex:
    """Triangulated surface, immutable after construction.

    Local edge ``i`` of face ``f`` joins ``faces[f, i]`` and
    ``faces[f, (i + 1) % 3]``.
    """

    def __init__(self, vertex_count: int, faces):
        faces = np.asarray(faces, dtype=np.int64).reshape(-1, 3)
        self.vertex_count = int(vertex_count)
        self.faces = faces
        self.faces.setflags(write=False)

    def __repr__(self) -> str:
        return f"SurfaceComplex(V={self.vertex_count}, F={self.n_faces})"

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    # -- edge table -----------------------------------------------------
    @cached_property
    def _edge_table(self):
        f = self.faces
        a = f.reshape(-1)
        b = np.roll(f, -1, axis=1).reshape(-1)
        keys = _edge_keys(a, b, self.vertex_count)
        ukeys, inverse = np.unique(keys, return_inverse=True)
        face_edges = inverse.reshape(-1, 3)
        n = max(self.vertex_count, 1)
        edges = np.stack([ukeys // n, ukeys % n], axis=1)
        counts = np.bincount(inverse, minlength=len(ukeys))
        order = np.argsort(inverse, kind="stable")
        starts = np.concatenate([[0], np.cumsum(counts)[:-1]])
        slot_face = order // 3
        ef = np.full((len(ukeys), 2), -1, dtype=np.int64)
        ef[:, 0] = slot_face[starts] if len(ukeys) else ef[:, 0]
        two = counts >= 2
        ef[two, 1] = slot_face[starts[two] + 1]
        return ukeys, edges, face_edges, counts, ef

    @property
    def edge_keys(self) -> np.ndarray:
        return self._edge_table[0]

    @property
    def edges(self) -> np.ndarray:
        """``(E, 2)`` array of sorted vertex pairs, lexicographically ordered."""
        return self._edge_table[1]

    @property
    def face_edges(self) -> np.ndarray:
        return self._edge_table[2]

    @property
    def edge_face_count(self) -> np.ndarray:
        return self._edge_table[3]

    @property
    def edge_faces(self) -> np.ndarray:
        """``(E, 2)`` incident faces per edge, ``-1`` where absent."""
        return self._edge_table[4]

    @property
    def n_edges(self) -> int:
        return len(self.edge_keys)

    def edge_index(self, u, v) -> np.ndarray:
        """Edge ids for vertex pairs; ``-1`` when the pair is not an edge."""
        u = np.atleast_1d(np.asarray(u, dtype=np.int64))
        v = np.atleast_1d(np.asarray(v, dtype=np.int64))
        keys = _edge_keys(u, v, self.vertex_count)
        pos = np.searchsorted(self.edge_keys, keys)
        pos = np.minimum(pos, max(self.n_edges - 1, 0))
        ok = (self.n_edges > 0) & (self.edge_keys[pos] == keys) if self.n_edges else np.zeros(len(keys), bool)
        return np.where(ok, pos, -1)

    def edge_id(self, u: int, v: int) -> int:
        """Single edge id, ``-1`` when ``uv`` is not an edge."""
        return int(self.edge_index(u, v)[0])

    @cached_property
    def used_vertices(self) -> np.ndarray:
        return np.unique(self.faces)

    @cached_property
    def boundary_edge_mask(self) -> np.ndarray:
        return self.edge_face_count == 1

    @cached_property
    def boundary_vertex_mask(self) -> np.ndarray:
        mask = np.zeros(self.vertex_count, dtype=bool)
        mask[self.edges[self.boundary_edge_mask].reshape(-1)] = True
        return mask

    @cached_property
    def adjacency_pairs(self) -> np.ndarray:
        """Face pairs sharing an edge, one row per interior edge."""
        ef = self.edge_faces
        return ef[self.edge_face_count == 2]

    @cached_property
    def interior_edge_ids(self) -> np.ndarray:
        return np.flatnonzero(self.edge_face_count == 2)

    def face_keys(self) -> np.ndarray:
        s = np.sort(self.faces, axis=1)
        n = max(self.vertex_count, 1)
        return (s[:, 0] * n + s[:, 1]) * n + s[:, 2]

    @cached_property
    def _face_lookup(self):
        keys = self.face_keys()
        order = np.argsort(keys, kind="stable")
        return keys[order], order

    def face_index(self, triples) -> np.ndarray:
        """Face ids for vertex triples (any order); ``-1`` if absent."""
        t = np.sort(np.asarray(triples, dtype=np.int64).reshape(-1, 3), axis=1)
        n = max(self.vertex_count, 1)
        keys = (t[:, 0] * n + t[:, 1]) * n + t[:, 2]
        skeys, order = self._face_lookup
        pos = np.minimum(np.searchsorted(skeys, keys), max(len(skeys) - 1, 0))
        if not len(skeys):
            return np.full(len(keys), -1)
        return np.where(skeys[pos] == keys, order[pos], -1)

    def vertex_faces(self) -> sparse.csr_matrix:
        """Vertex-by-face incidence matrix."""
        f = self.faces
        rows = f.reshape(-1)
        cols = np.repeat(np.arange(len(f)), 3)
        return sparse.csr_matrix(
            (np.ones(len(rows), dtype=np.int8), (rows, cols)),
            shape=(self.vertex_count, len(f)),
        )

    def to_dict(self) -> dict:
        return {"vertices": self.vertex_count, "faces": self.faces.tolist()}


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.violations

    def kinds(self) -> set:
        return {v["kind"] for v in self.violations}

    def to_dict(self) -> dict:
        return {"valid": self.valid, "violations": self.violations, "warnings": self.warnings}


def validate_surface(cx: SurfaceComplex) -> ValidationReport:
    """List every violated surface axiom with the offending cells."""
    rep = ValidationReport()
    f = cx.faces
    if len(f) and (f.min() < 0 or f.max() >= cx.vertex_count):
        bad = np.flatnonzero((f < 0).any(1) | (f >= cx.vertex_count).any(1))
        rep.violations.append({"kind": "vertex_out_of_range", "faces": bad.tolist()})
        return rep
    degenerate = (f[:, 0] == f[:, 1]) | (f[:, 1] == f[:, 2]) | (f[:, 0] == f[:, 2])
    if degenerate.any():
        rep.violations.append({"kind": "degenerate_face", "faces": np.flatnonzero(degenerate).tolist()})
        return rep

    keys = cx.face_keys()
    uk, first, cnt = np.unique(keys, return_index=True, return_counts=True)
    for k in np.flatnonzero(cnt > 1):
        dup = np.flatnonzero(keys == uk[k])
        rep.violations.append({"kind": "duplicate_face", "faces": dup.tolist()})

    over = np.flatnonzero(cx.edge_face_count > 2)
    for e in over:
        faces_on = np.flatnonzero((cx.face_edges == e).any(1))
        rep.violations.append({
            "kind": "edge_incidence",
            "edge": cx.edges[e].tolist(),
            "incidence": int(cx.edge_face_count[e]),
            "faces": faces_on.tolist(),
        })

    isolated = np.setdiff1d(np.arange(cx.vertex_count), cx.used_vertices)
    if len(isolated):
        rep.violations.append({"kind": "isolated_vertex", "vertices": isolated.tolist()})

    if not over.size:
        for v in _pinched_vertices(cx):
            rep.violations.append({"kind": "pinched_vertex", "vertex": int(v)})
    return rep


def _corner_index(cx: SurfaceComplex, face_ids: np.ndarray, verts: np.ndarray) -> np.ndarray:
    pos = np.argmax(cx.faces[face_ids] == verts[:, None], axis=1)
    return face_ids * 3 + pos


def _pinched_vertices(cx: SurfaceComplex) -> np.ndarray:
    """Vertices whose faces do not form a single fan (link not one path/cycle)."""
    if not cx.n_faces:
        return np.zeros(0, dtype=np.int64)
    ids = cx.interior_edge_ids
    ef = cx.edge_faces[ids]
    ev = cx.edges[ids]
    rows, cols = [], []
    for k in range(2):
        v = ev[:, k]
        rows.append(_corner_index(cx, ef[:, 0], v))
        cols.append(_corner_index(cx, ef[:, 1], v))
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    n = 3 * cx.n_faces
    g = sparse.coo_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(n, n))
    _, lab = connected_components(g, directed=False)
    corner_vertex = cx.faces.reshape(-1)
    pairs = np.unique(corner_vertex.astype(np.int64) * n + lab)
    per_vertex = np.bincount(pairs // n, minlength=cx.vertex_count)
    return np.flatnonzero(per_vertex > 1)


def face_components(
    cx: SurfaceComplex,
    face_mask: np.ndarray | None = None,
    blocked_edges: np.ndarray | None = None,
) -> tuple[np.ndarray, int]:
    """Label faces by edge-connected component.

    Faces outside ``face_mask`` get label -1; adjacency never crosses an
    edge flagged in ``blocked_edges``.  Labels are ordered by smallest
    contained face id.
    """
    nf = cx.n_faces
    if face_mask is None:
        face_mask = np.ones(nf, dtype=bool)
    ids = cx.interior_edge_ids
    if blocked_edges is not None:
        ids = ids[~blocked_edges[ids]]
    pairs = cx.edge_faces[ids]
    keep = face_mask[pairs[:, 0]] & face_mask[pairs[:, 1]]
    pairs = pairs[keep]
    g = sparse.coo_matrix(
        (np.ones(len(pairs), dtype=np.int8), (pairs[:, 0], pairs[:, 1])), shape=(nf, nf)
    )
    _, lab = connected_components(g, directed=False)
    lab = np.where(face_mask, lab, -1)
    present = lab[face_mask]
    if not len(present):
        return lab, 0
    # canonical order: by smallest face id in each component
    uniq, first = np.unique(present, return_index=True)
    order = np.argsort(np.flatnonzero(face_mask)[first])
    remap = np.full(lab.max() + 1, -1, dtype=np.int64)
    remap[uniq[order]] = np.arange(len(uniq))
    out = np.full(nf, -1, dtype=np.int64)
    out[face_mask] = remap[present]
    return out, len(uniq)


def group_by_label(labels: np.ndarray, n: int) -> list[np.ndarray]:
    """Face-id arrays per label 0..n-1 (ascending ids)."""
    sel = np.flatnonzero(labels >= 0)
    lab = labels[sel]
    order = np.argsort(lab, kind="stable")
    counts = np.bincount(lab, minlength=n)
    return np.split(sel[order], np.cumsum(counts)[:-1])


def connected_components_of(cx: SurfaceComplex) -> list["Region"]:
    lab, n = face_components(cx)
    return [Region(faces) for faces in group_by_label(lab, n)]


def euler_characteristic(cx: SurfaceComplex) -> int:
    return int(len(cx.used_vertices) - cx.n_edges + cx.n_faces)


@dataclass(frozen=True)
class BoundaryCycle:
    vertices: tuple  # closed walk, first vertex not repeated at the end
    edges: tuple     # edge ids along the walk

    def __len__(self) -> int:
        return len(self.edges)


def boundary_components(cx: SurfaceComplex) -> list[BoundaryCycle]:
    """Closed walks of boundary edges, sorted by smallest incident face id."""
    bid = np.flatnonzero(cx.boundary_edge_mask)
    if not len(bid):
        return []
    nbrs: dict[int, list[tuple[int, int]]] = {}
    for e, (u, v) in zip(bid.tolist(), cx.edges[bid].tolist()):
        nbrs.setdefault(u, []).append((v, e))
        nbrs.setdefault(v, []).append((u, e))
    used: set[int] = set()
    cycles = []
    for start in sorted(nbrs):
        for _, e0 in sorted(nbrs[start]):
            if e0 in used:
                continue
            walk_v, walk_e = [start], []
            cur, e = start, e0
            while True:
                used.add(e)
                walk_e.append(e)
                a, b = cx.edges[e]
                nxt = int(b if a == cur else a)
                if nxt == start:
                    break
                walk_v.append(nxt)
                cands = [x for x in sorted(nbrs[nxt]) if x[1] not in used]
                if not cands:
                    break
                cur, e = nxt, cands[0][1]
            cycles.append(BoundaryCycle(tuple(walk_v), tuple(walk_e)))
    ef = cx.edge_faces[:, 0]
    cycles.sort(key=lambda c: min(ef[list(c.edges)]))
    return cycles


def _orientation_cover(cx: SurfaceComplex, face_mask=None, blocked_edges=None):
    """Labels of the orientation double cover: node ``f`` and ``f + F``."""
    nf = cx.n_faces
    ids = cx.interior_edge_ids
    if blocked_edges is not None:
        ids = ids[~blocked_edges[ids]]
    ef = cx.edge_faces[ids]
    if face_mask is not None:
        keep = face_mask[ef[:, 0]] & face_mask[ef[:, 1]]
        ids, ef = ids[keep], ef[keep]
    u = cx.edges[ids, 0]
    # +1 if the face traverses u -> v in its cyclic order
    def direction(fid):
        tri = cx.faces[fid]
        pos = np.argmax(tri == u[:, None], axis=1)
        nxt = tri[np.arange(len(fid)), (pos + 1) % 3]
        return np.where(nxt == cx.edges[ids, 1], 1, -1)

    same = direction(ef[:, 0]) == direction(ef[:, 1])
    f0, f1 = ef[:, 0], ef[:, 1]
    # coherent neighbours traverse the shared edge in opposite directions
    rows = np.concatenate([f0, f0 + nf])
    cols = np.concatenate([np.where(same, f1 + nf, f1), np.where(same, f1, f1 + nf)])
    g = sparse.coo_matrix((np.ones(len(rows), np.int8), (rows, cols)), shape=(2 * nf, 2 * nf))
    _, lab = connected_components(g, directed=False)
    return lab


def orientability(cx: SurfaceComplex) -> list[bool]:
    """Per connected component (canonical order): True iff orientable."""
    lab, n = face_components(cx)
    cover = _orientation_cover(cx)
    nf = cx.n_faces
    twisted = cover[:nf] == cover[nf:]
    out = np.ones(n, dtype=bool)
    np.logical_and.at(out, lab, ~twisted)
    return out.tolist()


def is_orientable(cx: SurfaceComplex, face_mask=None, blocked_edges=None) -> bool:
    cover = _orientation_cover(cx, face_mask, blocked_edges)
    nf = cx.n_faces
    sel = np.ones(nf, bool) if face_mask is None else face_mask
    return not bool((cover[:nf] == cover[nf:])[sel].any())


def coherent_orientation(cx: SurfaceComplex) -> np.ndarray | None:
    """+1/-1 per face giving a coherent orientation, or None if impossible."""
    lab, n = face_components(cx)
    cover = _orientation_cover(cx)
    nf = cx.n_faces
    if (cover[:nf] == cover[nf:]).any():
        return None
    reps = np.zeros(n, dtype=np.int64)
    first = np.unique(lab, return_index=True)[1]
    reps[lab[first]] = cover[first]
    return np.where(cover[:nf] == reps[lab], 1, -1)


def orientation_conflict(cx: SurfaceComplex) -> tuple | None:
    """An edge (u, v) where face-by-face orientation propagation fails."""
    sign = {}
    adj: dict[int, list[int]] = {}
    for e in cx.interior_edge_ids.tolist():
        a, b = cx.edge_faces[e].tolist()
        adj.setdefault(a, []).append(e)
        adj.setdefault(b, []).append(e)

    def traverses(fid, u, v):
        t = cx.faces[fid].tolist()
        i = t.index(u)
        return t[(i + 1) % 3] == v

    for root in range(cx.n_faces):
        if root in sign:
            continue
        sign[root] = 1
        stack = [root]
        while stack:
            f = stack.pop()
            for e in adj.get(f, []):
                u, v = cx.edges[e].tolist()
                a, b = cx.edge_faces[e].tolist()
                g = b if a == f else a
                want = -sign[f] * (1 if traverses(f, u, v) else -1) * (1 if traverses(g, u, v) else -1)
                if g not in sign:
                    sign[g] = want
                    stack.append(g)
                elif sign[g] != want:
                    return (u, v)
    return None


@dataclass(frozen=True)
class Genus:
    """Genus tagged by orientability.

    Orientable surfaces carry the handle count g (chi = 2 - 2g - b);
    non-orientable ones the crosscap number k (chi = 2 - k - b).
    """
    orientable: bool
    value: int

    @property
    def tag(self) -> str:
        return "orientable" if self.orientable else "nonorientable"

    def to_dict(self) -> dict:
        key = "g" if self.orientable else "k"
        return {"orientability": self.tag, key: self.value}


def genus(cx: SurfaceComplex) -> Genus:
    if len(connected_components_of(cx)) != 1:
        raise SurfaceError("genus requires a connected complex")
    chi = euler_characteristic(cx)
    b = len(boundary_components(cx))
    if orientability(cx)[0]:
        return Genus(True, (2 - chi - b) // 2)
    return Genus(False, 2 - chi - b)


@dataclass(frozen=True)
class Subcomplex:
    """Closed set of cells: sorted face ids, edge vertex-pairs, vertex ids."""
    faces: tuple = ()
    edges: tuple = ()
    vertices: tuple = ()

    @classmethod
    def closure(cls, cx: SurfaceComplex, faces=(), edges=(), vertices=()):
        """Close a cell list under taking faces; returns ``(K, added)``."""
        faces = np.unique(np.asarray(list(faces), dtype=np.int64))
        given_e = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        given_e = np.sort(given_e, axis=1)
        fe = cx.faces[faces]
        face_e = np.sort(np.concatenate([fe[:, [0, 1]], fe[:, [1, 2]], fe[:, [2, 0]]]), axis=1)
        all_e = np.unique(np.concatenate([given_e, face_e]), axis=0)
        given_v = np.asarray(list(vertices), dtype=np.int64)
        all_v = np.unique(np.concatenate([given_v, all_e.reshape(-1)]))
        added = {
            "edges": len(all_e) - len(np.unique(given_e, axis=0)),
            "vertices": len(all_v) - len(np.unique(given_v)),
        }
        k = cls(tuple(faces.tolist()), tuple(map(tuple, all_e.tolist())), tuple(all_v.tolist()))
        return k, added

    @classmethod
    def from_faces(cls, cx: SurfaceComplex, faces) -> "Subcomplex":
        return cls.closure(cx, faces=faces)[0]

    @classmethod
    def from_edges(cls, cx: SurfaceComplex, edges) -> "Subcomplex":
        return cls.closure(cx, edges=edges)[0]

    @property
    def empty(self) -> bool:
        return not (self.faces or self.edges or self.vertices)

    def masks(self, cx: SurfaceComplex):
        """Boolean (face, edge, vertex) masks over ``cx``; unknown cells raise."""
        fm = np.zeros(cx.n_faces, dtype=bool)
        em = np.zeros(cx.n_edges, dtype=bool)
        vm = np.zeros(cx.vertex_count, dtype=bool)
        if self.faces:
            fid = np.asarray(self.faces)
            if fid.max() >= cx.n_faces:
                raise SurfaceError("subcomplex face outside the complex")
            fm[fid] = True
        if self.edges:
            e = np.asarray(self.edges)
            eid = cx.edge_index(e[:, 0], e[:, 1])
            if (eid < 0).any():
                raise SurfaceError(f"subcomplex edge {e[eid < 0][0].tolist()} is not an edge of the complex")
            em[eid] = True
        if self.vertices:
            v = np.asarray(self.vertices)
            if v.max() >= cx.vertex_count:
                raise SurfaceError("subcomplex vertex outside the complex")
            vm[v] = True
        return fm, em, vm

    def components(self) -> list["Subcomplex"]:
        """Connected components (through shared vertices), ordered by min vertex."""
        if not self.vertices:
            return []
        verts = np.asarray(self.vertices)
        idx = {v: i for i, v in enumerate(verts.tolist())}
        e = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        r = np.array([idx[a] for a in e[:, 0].tolist()], dtype=np.int64)
        c = np.array([idx[b] for b in e[:, 1].tolist()], dtype=np.int64)
        n = len(verts)
        g = sparse.coo_matrix((np.ones(len(r), np.int8), (r, c)), shape=(n, n))
        ncomp, lab = connected_components(g, directed=False)
        out = []
        for l in range(ncomp):
            vs = set(verts[lab == l].tolist())
            es = tuple(x for x in self.edges if x[0] in vs)
            out.append((min(vs), vs, es))
        out.sort()
        res = []
        for _, vs, es in out:
            res.append(Subcomplex((), es, tuple(sorted(vs))))
        return res

    def with_faces(self, cx: SurfaceComplex) -> list["Subcomplex"]:
        """Components including their faces."""
        comps = self.components()
        fv = {f: set(cx.faces[f].tolist()) for f in self.faces}
        out = []
        for c in comps:
            vs = set(c.vertices)
            fs = tuple(f for f in self.faces if fv[f] <= vs)
            out.append(Subcomplex(fs, c.edges, c.vertices))
        return out

    def n_components(self) -> int:
        return len(self.components())

    def to_dict(self) -> dict:
        return {"faces": list(self.faces), "edges": [list(e) for e in self.edges], "vertices": list(self.vertices)}


@dataclass(frozen=True)
class Region:
    """Open set spanned by a set of faces (see module docs for the convention)."""
    faces: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "faces", np.unique(np.asarray(self.faces, dtype=np.int64)))

    def __len__(self) -> int:
        return len(self.faces)

    def mask(self, n_faces: int) -> np.ndarray:
        m = np.zeros(n_faces, dtype=bool)
        m[self.faces] = True
        return m

    def frontier(self, cx: SurfaceComplex) -> Subcomplex:
        """Cells in the closure of the faces whose star leaves the region."""
        m = self.mask(cx.n_faces)
        fe = np.unique(cx.face_edges[self.faces])
        ef = cx.edge_faces[fe]
        inside = np.where(ef >= 0, m[np.maximum(ef, 0)], True).all(axis=1)
        fr_edges = fe[~inside]
        verts = np.unique(cx.faces[self.faces])
        inc = cx.vertex_faces()[verts]
        outside = np.asarray(inc[:, ~m].sum(axis=1)).ravel() > 0 if (~m).any() else np.zeros(len(verts), bool)
        fr_verts = verts[outside]
        e = cx.edges[fr_edges]
        return Subcomplex((), tuple(map(tuple, e.tolist())), tuple(fr_verts.tolist()))

    def is_connected(self, cx: SurfaceComplex, blocked_edges=None) -> bool:
        _, n = face_components(cx, self.mask(cx.n_faces), blocked_edges)
        return n == 1


@dataclass
class Subdivision:
    """Barycentric subdivision with provenance.

    New vertex ids: original vertices first, then one per edge, then one per
    face.  ``carrier_dim``/``carrier_id`` give the open cell of the input each
    new vertex sits in; sub-face ``6f + j`` lies in input face ``f``.
    """
    complex: SurfaceComplex
    parent: SurfaceComplex
    carrier_dim: np.ndarray
    carrier_id: np.ndarray

    def face_parent(self) -> np.ndarray:
        return np.arange(self.complex.n_faces) // 6

    def vertex_of_edge(self, e) -> np.ndarray:
        return self.parent.vertex_count + np.asarray(e)

    def vertex_of_face(self, f) -> np.ndarray:
        return self.parent.vertex_count + self.parent.n_edges + np.asarray(f)

    def carrier_in_mask(self, fm, em, vm) -> np.ndarray:
        d, i = self.carrier_dim, self.carrier_id
        out = np.zeros(len(d), dtype=bool)
        out[d == 0] = vm[i[d == 0]]
        out[d == 1] = em[i[d == 1]]
        out[d == 2] = fm[i[d == 2]]
        return out

    def subdivide_subcomplex(self, k: Subcomplex) -> Subcomplex:
        fm, em, vm = k.masks(self.parent)
        return self.subdivide_masks(fm, em, vm)

    def subdivide_masks(self, fm, em, vm) -> Subcomplex:
        cx = self.complex
        vin = self.carrier_in_mask(fm, em, vm)
        faces = np.flatnonzero(fm[self.face_parent()])
        e = cx.edges
        ein = vin[e[:, 0]] & vin[e[:, 1]]
        return Subcomplex(tuple(faces.tolist()), tuple(map(tuple, e[ein].tolist())), tuple(np.flatnonzero(vin).tolist()))

    def lift_vertex_map(self, vmap: np.ndarray) -> np.ndarray:
        """Extend a simplicial automorphism's vertex map to the subdivision."""
        p = self.parent
        vmap = np.asarray(vmap, dtype=np.int64)
        e = p.edges
        eimg = p.edge_index(vmap[e[:, 0]], vmap[e[:, 1]])
        fimg = p.face_index(vmap[p.faces])
        if (eimg < 0).any() or (fimg < 0).any():
            raise SurfaceError("vertex map is not simplicial")
        return np.concatenate([vmap, p.vertex_count + eimg, p.vertex_count + p.n_edges + fimg])


def barycentric_subdivision(cx: SurfaceComplex) -> Subdivision:
    V, E, F = cx.vertex_count, cx.n_edges, cx.n_faces
    f = cx.faces
    fe = cx.face_edges
    mid = V + fe  # midpoint of local edge i (between vertex i and i+1)
    ctr = V + E + np.arange(F)
    a, b, c = f[:, 0], f[:, 1], f[:, 2]
    m0, m1, m2 = mid[:, 0], mid[:, 1], mid[:, 2]
    sub = np.stack([
        np.stack([a, m0, ctr], 1),
        np.stack([m0, b, ctr], 1),
        np.stack([b, m1, ctr], 1),
        np.stack([m1, c, ctr], 1),
        np.stack([c, m2, ctr], 1),
        np.stack([m2, a, ctr], 1),
    ], axis=1).reshape(-1, 3)
    dim = np.concatenate([np.zeros(V, np.int8), np.ones(E, np.int8), np.full(F, 2, np.int8)])
    cid = np.concatenate([np.arange(V), np.arange(E), np.arange(F)])
    return Subdivision(SurfaceComplex(V + E + F, sub), cx, dim, cid)


def relabel(cx: SurfaceComplex, perm: Sequence[int]) -> SurfaceComplex:
    """Apply a vertex permutation (``new = perm[old]``); face order kept."""
    perm = np.asarray(perm, dtype=np.int64)
    return SurfaceComplex(cx.vertex_count, perm[cx.faces])


def disjoint_union(*parts: SurfaceComplex) -> SurfaceComplex:
    offs, faces, n = [], [], 0
    for p in parts:
        faces.append(p.faces + n)
        n += p.vertex_count
    return SurfaceComplex(n, np.concatenate(faces) if faces else np.zeros((0, 3), np.int64))


def compact(cx: SurfaceComplex) -> tuple[SurfaceComplex, np.ndarray]:
    """Drop unused vertices; returns the complex and new->old vertex ids."""
    used = cx.used_vertices
    remap = np.full(cx.vertex_count, -1, dtype=np.int64)
    remap[used] = np.arange(len(used))
    return SurfaceComplex(len(used), remap[cx.faces]), used


def sub_complex(cx: SurfaceComplex, face_ids) -> SurfaceComplex:
    """Complex spanned by a subset of faces, vertex ids compacted."""
    return compact(SurfaceComplex(cx.vertex_count, cx.faces[np.asarray(face_ids, dtype=np.int64)]))[0]


def surface_genus_of_faces(cx: SurfaceComplex, face_ids, open_ends: int = 0) -> tuple[int, bool]:
    """(genus value, orientable) of the closed subsurface spanned by faces."""
    sc = sub_complex(cx, face_ids)
    chi = euler_characteristic(sc)
    b = len(boundary_components(sc))
    ori = is_orientable(sc)
    if ori:
        return (2 - chi - b - open_ends) // 2, True
    return 2 - chi - b - open_ends, False
