"""Residual domains of a compact subcomplex K and the ends they create.

Ends of a domain U that converge to K are read off a derived
neighbourhood: after two barycentric subdivisions the closed star N of the
subdivided K is a regular neighbourhood, and every component of N - K
inside U (a *collar*) is a half-open annulus carrying exactly one end.
The collar's impression is the set of K-cells it abuts.

The canonical exhaustion models U as ``core + collars`` on the compact
side and the ambient exhaustion on the far side: E_n is the core with
n - 1 annular rings grown along each collar, and
G_n = E_n + (U_plus inside F_{n0+n}).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .core import (
    Region,
    Subcomplex,
    SurfaceComplex,
    SurfaceError,
    Subdivision,
    barycentric_subdivision,
    boundary_components,
    face_components,
    genus,
    group_by_label,
    is_orientable,
)
from .exhaustion import EndTree, ExhaustionStream, Window, end_tree, ends as stream_ends


def _is_stream(ambient) -> bool:
    return isinstance(ambient, ExhaustionStream)


def _edge_set(edges) -> set:
    return {(min(a, b), max(a, b)) for a, b in np.asarray(edges, dtype=np.int64).reshape(-1, 2).tolist()}


# ---------------------------------------------------------------------------
# locating K

def subcomplex_depth(win: Window, K: Subcomplex) -> int:
    """Smallest depth n with every cell of K in F_n (window-limited)."""
    cx = win.complex
    depth = 1
    if K.faces:
        f = np.asarray(K.faces)
        if f.max() >= cx.n_faces:
            raise SurfaceError(f"K not contained in any F_n up to depth {win.depth}")
        depth = max(depth, int(win.layer[f].max()))
    if K.edges:
        e = np.asarray(K.edges)
        eid = cx.edge_index(e[:, 0], e[:, 1])
        if (eid < 0).any():
            raise SurfaceError(f"K not contained in any F_n up to depth {win.depth}")
        ef = cx.edge_faces[eid]
        lay = np.where(ef >= 0, win.layer[np.maximum(ef, 0)], np.iinfo(np.int64).max)
        depth = max(depth, int(lay.min(axis=1).max()))
    on_edges = set(np.asarray(K.edges).reshape(-1).tolist())
    lone = [v for v in K.vertices if v not in on_edges]
    if lone:
        lone = np.asarray(lone)
        if lone.max() >= cx.vertex_count:
            raise SurfaceError(f"K not contained in any F_n up to depth {win.depth}")
        hit = np.isin(cx.faces, lone)
        rows = np.flatnonzero(hit.any(axis=1))
        found = np.unique(cx.faces[rows][hit[rows]])
        if len(found) < len(lone):
            raise SurfaceError(f"K not contained in any F_n up to depth {win.depth}")
        for v in lone.tolist():
            r = rows[(cx.faces[rows] == v).any(axis=1)][0]
            depth = max(depth, int(win.layer[r]))
    return depth


def _nonambient_boundary_vertices(cx: SurfaceComplex, amb: set) -> np.ndarray:
    be = cx.edges[cx.boundary_edge_mask]
    if amb:
        keep = np.array([tuple(e) not in amb for e in be.tolist()], dtype=bool)
        be = be[keep] if len(be) else be
    m = np.zeros(cx.vertex_count, bool)
    m[be.reshape(-1)] = True
    return m


# ---------------------------------------------------------------------------
# residual domains

@dataclass
class ResidualDomain:
    index: int
    region: Region
    bounded: bool
    frontier: Subcomplex
    horizon: int | None = None
    depth_of_K: int | None = None

    @property
    def faces(self) -> np.ndarray:
        return self.region.faces

    def to_dict(self) -> dict:
        d = {
            "index": self.index,
            "faces": int(len(self.region)),
            "bounded": self.bounded,
            "frontier": {"edges": len(self.frontier.edges), "vertices": len(self.frontier.vertices)},
        }
        if self.horizon is not None:
            d["qualifier"] = f"at horizon {self.horizon}"
        return d


@dataclass
class Ambient:
    """Finite complex the computations run on (the window for streams)."""
    complex: SurfaceComplex
    layer: np.ndarray | None
    horizon: int | None
    k: int
    stream: ExhaustionStream | None = None

    @classmethod
    def of(cls, ambient, K: Subcomplex, horizon: int | None = None) -> "Ambient":
        if _is_stream(ambient):
            h = 8 if horizon is None else horizon
            win = ambient.window(h + 1)
            k = subcomplex_depth(win, K)
            if k > h:
                raise SurfaceError(f"K not contained in any F_n up to horizon {h}")
            return cls(win.complex, win.layer, h, k, ambient)
        if not isinstance(ambient, SurfaceComplex):
            raise TypeError("ambient must be a SurfaceComplex or an ExhaustionStream")
        K.masks(ambient)
        return cls(ambient, None, None, 0, None)

    @cached_property
    def ambient_edges(self) -> set:
        if self.stream is None:
            return set()
        return _edge_set(self.stream.ambient_boundary_edges)


def _domain_frontiers(cx: SurfaceComplex, labels: np.ndarray, n: int, em, vm) -> list[Subcomplex]:
    sel = np.flatnonzero(labels >= 0)
    lab = labels[sel]
    fe = cx.face_edges[sel]
    fv = cx.faces[sel]
    le = np.repeat(lab, 3)
    e = fe.reshape(-1)
    v = fv.reshape(-1)
    ke = em[e]
    kv = vm[v]
    E = max(cx.n_edges, 1)
    V = max(cx.vertex_count, 1)
    pe = np.unique(le[ke] * E + e[ke])
    pv = np.unique(le[kv] * V + v[kv])
    out = []
    eb = np.searchsorted(pe // E, np.arange(n + 1))
    vb = np.searchsorted(pv // V, np.arange(n + 1))
    for i in range(n):
        ee = cx.edges[pe[eb[i]:eb[i + 1]] % E]
        vv = pv[vb[i]:vb[i + 1]] % V
        ee = ee[np.lexsort((ee[:, 1], ee[:, 0]))] if len(ee) else ee
        out.append(Subcomplex((), tuple(map(tuple, ee.tolist())), tuple(vv.tolist())))
    return out


def residual_domains(ambient, K: Subcomplex, horizon: int | None = None) -> list[ResidualDomain]:
    """Components of S - K, tagged bounded/unbounded (streams: at horizon)."""
    amb = Ambient.of(ambient, K, horizon)
    cx = amb.complex
    fm, em, vm = K.masks(cx)
    labels, n = face_components(cx, ~fm, em)
    fronts = _domain_frontiers(cx, labels, n, em, vm)
    out = []
    for i, faces in enumerate(group_by_label(labels, n)):
        if amb.layer is None:
            bounded = True
        else:
            bounded = bool(amb.layer[faces].max() <= amb.k)
        out.append(ResidualDomain(i, Region(faces), bounded, fronts[i], amb.horizon, amb.k if amb.layer is not None else None))
    return out


def domain_of(domains: list[ResidualDomain], face: int) -> ResidualDomain:
    for d in domains:
        i = np.searchsorted(d.faces, face)
        if i < len(d.faces) and d.faces[i] == face:
            return d
    raise KeyError(f"face {face} lies in K")


# ---------------------------------------------------------------------------
# derived neighbourhood

class DerivedNeighbourhood:
    """Second derived neighbourhood of K in a finite base complex."""

    def __init__(self, base: SurfaceComplex, K: Subcomplex):
        self.base = base
        self.K = K
        self.sd1 = barycentric_subdivision(base)
        self.sd2 = barycentric_subdivision(self.sd1.complex)
        self.S2 = self.sd2.complex
        K1 = self.sd1.subdivide_subcomplex(K)
        self.K2 = self.sd2.subdivide_subcomplex(K1)
        self.fm2, self.em2, self.vm2 = self.K2.masks(self.S2)
        touch = self.vm2[self.S2.faces].any(axis=1)
        self.collar_mask = touch & ~self.fm2
        self.collar_labels, self.n_collars = face_components(self.S2, self.collar_mask, self.em2)
        self.face_parent = np.arange(self.S2.n_faces) // 36

    @cached_property
    def vertex_carrier(self) -> tuple[np.ndarray, np.ndarray]:
        """(dim, id) of the open base cell containing each S2 vertex."""
        d2, i2 = self.sd2.carrier_dim, self.sd2.carrier_id
        d1, i1 = self.sd1.carrier_dim, self.sd1.carrier_id
        dim = np.empty(len(d2), dtype=np.int8)
        cid = np.empty(len(d2), dtype=np.int64)
        s = d2 == 0
        dim[s], cid[s] = d1[i2[s]], i1[i2[s]]
        s = d2 == 2
        dim[s], cid[s] = 2, i2[s] // 6
        s = d2 == 1
        ends_ = self.sd1.complex.edges[i2[s]]
        da, db = d1[ends_[:, 0]], d1[ends_[:, 1]]
        pick = np.where(da >= db, ends_[:, 0], ends_[:, 1])
        dim[s], cid[s] = d1[pick], i1[pick]
        return dim, cid

    @cached_property
    def collars(self) -> list[np.ndarray]:
        return group_by_label(self.collar_labels, self.n_collars)

    def collar_domain_face(self, c: int) -> int:
        """A base face carrying collar c."""
        return int(self.face_parent[self.collars[c][0]])

    def impression(self, c: int) -> Subcomplex:
        faces = self.collars[c]
        v = np.unique(self.S2.faces[faces])
        v = v[self.vm2[v]]
        dim, cid = self.vertex_carrier
        verts = np.unique(cid[v][dim[v] == 0])
        eids = np.unique(cid[v][dim[v] == 1])
        e = self.base.edges[eids]
        e = e[np.lexsort((e[:, 1], e[:, 0]))] if len(e) else e
        fids = np.unique(cid[v][dim[v] == 2])
        return Subcomplex(tuple(fids.tolist()), tuple(map(tuple, e.tolist())), tuple(verts.tolist()))

    def interface(self, c: int, core_mask: np.ndarray) -> list[tuple]:
        """Vertex walks of the edges between collar c and the core."""
        S2 = self.S2
        ef = S2.edge_faces
        lab = self.collar_labels
        ok = (ef >= 0).all(axis=1)
        a, b = ef[:, 0], ef[:, 1]
        la = np.where(ok, lab[np.maximum(a, 0)], -1)
        lb = np.where(ok, lab[np.maximum(b, 0)], -1)
        ca = np.where(ok, core_mask[np.maximum(a, 0)], False)
        cb = np.where(ok, core_mask[np.maximum(b, 0)], False)
        sel = ((la == c) & cb) | ((lb == c) & ca)
        return _walk(S2.edges[sel])

    def open_euler(self, c: int) -> int:
        faces = self.collars[c]
        S2 = self.S2
        v = np.unique(S2.faces[faces])
        e = np.unique(S2.face_edges[faces])
        return int((~self.vm2[v]).sum() - (~self.em2[e]).sum() + len(faces))


def _walk(edges: np.ndarray) -> list[tuple]:
    """Split an edge set of max degree 2 into cycles and paths."""
    adj: dict[int, list[int]] = {}
    for u, v in edges.tolist():
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    if any(len(x) > 2 for x in adj.values()):
        raise SurfaceError("collar interface is not a 1-manifold")
    seen: set = set()
    out = []
    starts = sorted(v for v, x in adj.items() if len(x) == 1) + sorted(adj)
    for s in starts:
        if s in seen:
            continue
        path = [s]
        seen.add(s)
        prev, cur = None, s
        while True:
            nxt = [w for w in adj[cur] if w != prev and w not in seen]
            if not nxt:
                break
            prev, cur = cur, min(nxt)
            path.append(cur)
            seen.add(cur)
        closed = len(adj[s]) == 2 and s in adj[cur] and len(path) > 2
        out.append((tuple(path), closed))
    return out


# ---------------------------------------------------------------------------
# canonical exhaustion

@dataclass
class Impression:
    end: int
    cells: Subcomplex

    @property
    def regular(self) -> bool:
        return len(self.cells.edges) > 0

    def to_dict(self) -> dict:
        return {"end": self.end, "regular": self.regular, **self.cells.to_dict()}


@dataclass
class RelEnd:
    """Relatively compact end of a residual domain."""
    index: int
    domain: int
    collar: int
    impression: Impression

    @property
    def regular(self) -> bool:
        return self.impression.regular

    def to_dict(self) -> dict:
        return {"index": self.index, "domain": self.domain, "regular": self.regular, "impression": self.impression.to_dict()}


class CanonicalExhaustion:
    """U = U_plus + U_minus with the exhaustion G_n (see module docstring)."""

    def __init__(self, ambient, K: Subcomplex, domain: ResidualDomain | int, horizon: int | None = None,
                 domains: list | None = None):
        self.ambient = ambient
        self.K = K
        amb = Ambient.of(ambient, K, horizon)
        self.amb = amb
        self.horizon = amb.horizon
        if domains is None:
            domains = residual_domains(ambient, K, horizon)
        if isinstance(domain, int):
            domain = domains[domain]
        self.domain = domain
        self.domains = domains
        cx = amb.complex
        if amb.layer is None:
            self.n0 = 0
            base = cx
            u_minus = domain.faces
            u_plus = np.zeros(0, dtype=np.int64)
        else:
            self.n0 = self._choose_n0(domains)
            if self.n0 > amb.horizon:
                raise SurfaceError(f"horizon {amb.horizon} too shallow: F_0 needs depth {self.n0}")
            k = int(np.searchsorted(amb.layer, self.n0, side="right"))
            base = SurfaceComplex(cx.vertex_count, cx.faces[:k])
            u_minus = domain.faces[domain.faces < k]
            u_plus = domain.faces[domain.faces >= k]
        self.base = base
        self.U_minus = Region(u_minus)
        self.U_plus = Region(u_plus)
        self.nb = DerivedNeighbourhood(base, K)
        nb = self.nb
        in_u = np.zeros(base.n_faces, dtype=bool)
        in_u[u_minus] = True
        s2_in_u = in_u[nb.face_parent]
        self.s2_domain_mask = s2_in_u
        self.core_mask = s2_in_u & ~nb.collar_mask
        cids = np.unique(nb.collar_labels[s2_in_u & nb.collar_mask])
        self.collar_ids = [int(c) for c in cids]
        self.xi = self._xi()

    def _choose_n0(self, domains) -> int:
        amb = self.amb
        n = max(amb.k, 1)
        bounded = [d for d in domains if d.bounded]
        for d in bounded:
            n = max(n, int(amb.layer[d.faces].max()))
        kv = np.asarray(self.K.vertices, dtype=np.int64)
        while n <= amb.horizon:
            k = int(np.searchsorted(amb.layer, n, side="right"))
            fn = SurfaceComplex(amb.complex.vertex_count, amb.complex.faces[:k])
            bad = _nonambient_boundary_vertices(fn, amb.ambient_edges)
            if not len(kv) or not bad[kv].any():
                return n
            n += 1
        return n

    def _xi(self) -> list[tuple]:
        if self.amb.layer is None or not len(self.U_plus):
            return []
        amb_e = self.amb.ambient_edges
        cyc = []
        u = self.domain.region.mask(self.amb.complex.n_faces)
        for c in boundary_components(self.base):
            keys = [tuple(self.base.edges[e].tolist()) for e in c.edges]
            if amb_e and all(k in amb_e for k in keys):
                continue
            # the face across the cycle lies in U_plus iff the cycle is in U
            e0 = self.amb.complex.edge_id(*keys[0])
            fs = self.amb.complex.edge_faces[e0]
            if any(f >= 0 and u[f] for f in fs.tolist()):
                cyc.append(c.vertices)
        return cyc

    # -- derived quantities ------------------------------------------------
    @property
    def n_collars(self) -> int:
        return len(self.collar_ids)

    def collar_faces(self, i: int) -> np.ndarray:
        return self.nb.collars[self.collar_ids[i]]

    def impression(self, i: int) -> Subcomplex:
        return self.nb.impression(self.collar_ids[i])

    def interface(self, i: int) -> list[tuple]:
        return self.nb.interface(self.collar_ids[i], self.core_mask)

    @cached_property
    def ambient_tree(self) -> EndTree | None:
        if self.amb.stream is None:
            return None
        return end_tree(self.amb.stream, self.horizon)

    def u_plus_nodes(self, n: int) -> list[np.ndarray]:
        """Components of S - F_n inside U (window faces), for n >= n0."""
        tree = self.ambient_tree
        if tree is None:
            return []
        fn = tree.face_nodes_at(n)
        u = self.domain.region.mask(len(fn))
        nodes = np.unique(fn[u & (fn >= 0)])
        return [np.flatnonzero(fn == x) for x in nodes.tolist()]

    def claims(self) -> dict:
        """Connectivity of U_minus and the one-cycle-per-component claim."""
        base = self.base
        fm, em, _ = self.K.masks(base)
        m = np.zeros(base.n_faces, dtype=bool)
        m[self.U_minus.faces] = True
        _, ncomp = face_components(base, m, em)
        out = {"U_minus_connected": ncomp == 1, "xi_cycles": len(self.xi)}
        if self.ambient_tree is not None and len(self.U_plus):
            comps = self.u_plus_nodes(self.n0)
            xi_keys = [set(zip(c, c[1:] + c[:1])) for c in self.xi]
            per = []
            cx = self.amb.complex
            for faces in comps:
                ek = {tuple(cx.edges[e].tolist()) for e in np.unique(cx.face_edges[faces]).tolist()}
                hits = 0
                for ks in xi_keys:
                    if all((min(a, b), max(a, b)) in ek for a, b in ks):
                        hits += 1
                per.append(hits)
            out["U_plus_components"] = len(comps)
            out["one_cycle_each"] = all(h == 1 for h in per)
        else:
            out["U_plus_components"] = 0
            out["one_cycle_each"] = True
        if self.amb.layer is not None:
            kf = np.asarray(self.K.faces, dtype=np.int64)
            bd = np.concatenate([d.faces for d in self.domains if d.bounded] + [kf])
            out["P13_in_F0"] = bool(len(bd) == 0 or self.amb.layer[bd].max() <= self.n0)
        else:
            out["P13_in_F0"] = True
        return out

    def p12(self, i: int) -> dict:
        nb = self.nb
        c = self.collar_ids[i]
        faces = nb.collars[c]
        walks = self.interface(i)
        chi = nb.open_euler(c)
        m = np.zeros(nb.S2.n_faces, dtype=bool)
        m[faces] = True
        ori = is_orientable(nb.S2, m, nb.em2)
        # an arc ending on the boundary of S closes up once S is capped (S*)
        contact = len(walks) == 1 and not walks[0][1] and bool(
            nb.S2.boundary_vertex_mask[[walks[0][0][0], walks[0][0][-1]]].all())
        closed = len(walks) == 1 and (walks[0][1] or contact)
        g = -chi // 2 if closed else None
        return {
            "open_euler": chi,
            "interface_cycles": len(walks),
            "closed": closed,
            "boundary_contact": contact,
            "orientable": ori,
            "genus": g,
            "disk_neighbourhood": bool(closed and ori and chi == 0),
        }

    @cached_property
    def stream(self) -> "DomainStream":
        return DomainStream(self)

    def to_dict(self) -> dict:
        return {
            "domain": self.domain.index,
            "n0": self.n0,
            "U_minus_faces": int(len(self.U_minus)),
            "U_plus_faces": int(len(self.U_plus)),
            "xi": len(self.xi),
            "collars": self.n_collars,
            "claims": self.claims(),
        }


def canonical_exhaustion(ambient, K: Subcomplex, U, horizon: int | None = None) -> CanonicalExhaustion:
    return CanonicalExhaustion(ambient, K, U, horizon)


class DomainStream(ExhaustionStream):
    """Exhaustion G_n of a residual domain, as a stream in its own ids.

    Face kinds: 0 core, 1 zipper (fine-to-coarse strip along xi),
    2 U_plus face, 3 virtual collar ring, 4 real collar face (only in
    :meth:`real_complex`).
    """

    name = "domain"

    def __init__(self, canon: CanonicalExhaustion):
        super().__init__(domain=canon.domain.index)
        self.canon = canon
        self.finite_type = canon.amb.stream is None or bool(canon.amb.stream.finite_type)
        self.stabilization_depth = 1
        nb = canon.nb
        self._VF = nb.S2.vertex_count
        self._rings = [canon.interface(i) for i in range(canon.n_collars)]
        # a collar ending on the ambient boundary gives U non-compact boundary
        self.boundary_compact = all(closed for walks in self._rings for _, closed in walks)

    # id namespaces: fine S2 ids, coarse window ids, virtual ring ids
    def _coarse(self, v):
        return self._VF + np.asarray(v, dtype=np.int64)

    def _virtual_base(self) -> int:
        canon = self.canon
        return self._VF + canon.amb.complex.vertex_count

    def _pieces(self, depth: int, real_collars: bool = False):
        canon = self.canon
        nb = canon.nb
        S2 = nb.S2
        faces, layer, kind, src = [], [], [], []
        core = np.flatnonzero(canon.core_mask)
        faces.append(S2.faces[core]); layer.append(np.ones(len(core), np.int64))
        kind.append(np.zeros(len(core), np.int64)); src.append(core)
        if real_collars:
            cf = np.flatnonzero(canon.s2_domain_mask & nb.collar_mask)
            faces.append(S2.faces[cf]); layer.append(np.ones(len(cf), np.int64))
            kind.append(np.full(len(cf), 4, np.int64)); src.append(cf)
        if len(canon.U_plus):
            zf = self._zipper()
            faces.append(zf); layer.append(np.ones(len(zf), np.int64))
            kind.append(np.ones(len(zf), np.int64)); src.append(np.full(len(zf), -1))
            amb = canon.amb
            stream = amb.stream
            win = stream.window(canon.n0 + depth)
            up = canon.domain.faces
            up = up[(up < win.complex.n_faces)]
            up = up[win.layer[up] > canon.n0]
            faces.append(self._coarse(win.complex.faces[up]))
            layer.append(np.maximum(win.layer[up] - canon.n0, 1))
            kind.append(np.full(len(up), 2, np.int64)); src.append(up)
        vamb = []
        if not real_collars:
            vb = self._virtual_base()
            off = 0
            for walks in self._rings:
                for path, closed in walks:
                    L = len(path)
                    prev = np.asarray(path, dtype=np.int64)
                    for i in range(1, depth):
                        cur = vb + off + np.arange(L)
                        off += L
                        idx = np.arange(L if closed else L - 1)
                        nxt = (idx + 1) % L
                        f1 = np.stack([prev[idx], prev[nxt], cur[idx]], 1)
                        f2 = np.stack([prev[nxt], cur[nxt], cur[idx]], 1)
                        ff = np.empty((2 * len(idx), 3), np.int64)
                        ff[0::2], ff[1::2] = f1, f2
                        faces.append(ff); layer.append(np.full(len(ff), i + 1, np.int64))
                        kind.append(np.full(len(ff), 3, np.int64)); src.append(np.full(len(ff), -1))
                        if not closed:
                            vamb += [(int(prev[0]), int(cur[0])), (int(prev[-1]), int(cur[-1]))]
                        prev = cur
        self._vamb = vamb
        F = np.concatenate(faces)
        Lr = np.concatenate(layer)
        Kd = np.concatenate(kind)
        Sr = np.concatenate(src)
        order = np.argsort(Lr, kind="stable")
        return F[order], Lr[order], Kd[order], Sr[order]

    def _zipper(self) -> np.ndarray:
        canon = self.canon
        nb = canon.nb
        sd1, sd2 = nb.sd1, nb.sd2
        base = canon.base
        out = []
        for cyc in canon.xi:
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                m = int(sd1.vertex_of_edge(base.edge_id(a, b)))
                x1 = int(sd2.vertex_of_edge(sd1.complex.edge_id(a, m)))
                x2 = int(sd2.vertex_of_edge(sd1.complex.edge_id(m, b)))
                A, B = int(self._coarse(a)), int(self._coarse(b))
                out += [(A, a, x1), (A, x1, m), (A, m, B), (B, m, x2), (B, x2, b)]
        return np.asarray(out, dtype=np.int64).reshape(-1, 3)

    def _relabel(self, F):
        flat = F.reshape(-1)
        uniq, first = np.unique(flat, return_index=True)
        order = np.argsort(first)
        newid = np.empty(len(uniq), dtype=np.int64)
        newid[order] = np.arange(len(uniq))
        ids = newid[np.searchsorted(uniq, flat)].reshape(F.shape)
        return ids, uniq[order]

    def _generate(self, depth):
        F, L, Kd, Sr = self._pieces(depth)
        ids, old = self._relabel(F)
        self._kind, self._src, self._old = Kd, Sr, old
        return len(old), ids, L

    def face_kind(self, depth: int) -> np.ndarray:
        self.window(depth)
        return self._kind[: self.window(depth).complex.n_faces]

    @property
    def ambient_boundary_edges(self) -> np.ndarray:
        """Edges of the ambient's boundary that lie in U (in stream ids)."""
        if self._full is None:
            self.window(1)
        canon = self.canon
        nb = canon.nb
        old = self._old
        pos = {int(v): i for i, v in enumerate(old.tolist())}
        out = []
        dim, cid = nb.vertex_carrier
        base = canon.base
        amb_e = canon.amb.ambient_edges
        finite = canon.amb.layer is None
        S2 = nb.S2
        for u, v in S2.edges[S2.boundary_edge_mask].tolist():
            if u not in pos or v not in pos:
                continue
            w = u if dim[u] >= dim[v] else v
            e = tuple(base.edges[cid[w]].tolist())
            if finite or e in amb_e:
                out.append((min(pos[u], pos[v]), max(pos[u], pos[v])))
        for a, b in getattr(self, "_vamb", []):
            if a in pos and b in pos:
                out.append((min(pos[a], pos[b]), max(pos[a], pos[b])))
        if canon.amb.layer is not None and amb_e:
            for a, b in amb_e:
                A, B = int(self._coarse(a)), int(self._coarse(b))
                if A in pos and B in pos:
                    out.append((min(pos[A], pos[B]), max(pos[A], pos[B])))
        return np.asarray(sorted(set(out)), dtype=np.int64).reshape(-1, 2)

    def real_complex(self, depth: int):
        """U_minus at S2 resolution plus U_plus up to F_{n0+depth}.

        Returns (complex, kind, source, blocked_edge_mask).
        """
        F, L, Kd, Sr = self._pieces(depth, real_collars=True)
        ids, old = self._relabel(F)
        cx = SurfaceComplex(len(old), ids)
        fine = old < self._VF
        is_k2 = np.zeros(len(old), bool)
        is_k2[fine] = self.canon.nb.vm2[old[fine]]
        e = cx.edges
        blocked = is_k2[e[:, 0]] & is_k2[e[:, 1]]
        if blocked.any():
            eo = old[e[blocked]]
            eid = self.canon.nb.S2.edge_index(eo[:, 0], eo[:, 1])
            sub = np.zeros(len(eid), bool)
            sub[eid >= 0] = self.canon.nb.em2[eid[eid >= 0]]
            idx = np.flatnonzero(blocked)
            blocked[idx[~sub]] = False
        return cx, Kd, Sr, blocked


# ---------------------------------------------------------------------------
# verification of the canonical exhaustion

def verify_l16(canon: CanonicalExhaustion, n: int) -> dict:
    """Recompute the components of U - G_n from scratch and classify them."""
    ds = canon.stream
    depth = n + 1
    cx, kind, src, blocked = ds.real_complex(depth)
    if canon.amb.layer is not None:
        lay = np.zeros(len(kind), dtype=np.int64)
        up = kind == 2
        lay[up] = canon.amb.layer[src[up]]
        outside = (kind == 4) | (up & (lay > canon.n0 + n))
    else:
        outside = kind == 4
    lab, k = face_components(cx, outside, blocked)
    comps = group_by_label(lab, k)
    minus, plus, mixed = [], [], 0
    for c in comps:
        kk = set(kind[c].tolist())
        if kk == {4}:
            minus.append(frozenset(src[c].tolist()))
        elif kk == {2}:
            plus.append(frozenset(src[c].tolist()))
        else:
            mixed += 1
    expect_minus = {frozenset(canon.collar_faces(i).tolist()) for i in range(canon.n_collars)}
    ok_minus = set(minus) == expect_minus and len(minus) == len(expect_minus)
    ok_plus = True
    if canon.amb.layer is not None and len(canon.U_plus):
        if canon.n0 + n <= canon.horizon:
            win_n = canon.amb.stream.window(canon.n0 + depth).complex.n_faces
            exp = set()
            for faces in canon.u_plus_nodes(canon.n0 + n):
                exp.add(frozenset(faces[faces < win_n].tolist()))
            ok_plus = set(plus) == exp
    return {"depth": n, "components": k, "in_U_minus": len(minus), "in_U_plus": len(plus),
            "mixed": mixed, "ok": mixed == 0 and ok_minus and ok_plus}


def verify_canonical(canon: CanonicalExhaustion, horizon: int | None = None) -> dict:
    """Every check of the canonical-exhaustion suite, up to ``horizon``."""
    from .exhaustion import validate_exhaustion
    h = horizon or canon.horizon or 4
    if canon.horizon is not None:
        h = min(h, canon.horizon - canon.n0)
    h = max(h, 1)
    ds = canon.stream
    rep = validate_exhaustion(ds, h)
    l16 = [verify_l16(canon, n) for n in range(1, h + 1)]
    split = verify_split(canon, h)
    claims = canon.claims()
    ok = (claims["U_minus_connected"] and claims["one_cycle_each"] and claims["P13_in_F0"]
          and rep.valid and all(x["ok"] for x in l16) and split["ok"])
    return {"ok": ok, "claims": claims, "G_valid": rep.valid, "G_violations": rep.violations[:5],
            "l16": l16, "split": split, "depths": h}


def verify_split(canon: CanonicalExhaustion, h: int) -> dict:
    """b(U) = b(U_plus) + b(U_minus) on the end tree of G_n."""
    ds = canon.stream
    tree = end_tree(ds, h)
    kind = ds.face_kind(h + 1)
    leaves = tree.leaves()
    n_virtual = n_plus = mixed = 0
    for l in leaves.tolist():
        ks = set(kind[tree.node_faces(l)].tolist())
        if ks == {3}:
            n_virtual += 1
        elif ks == {2}:
            n_plus += 1
        else:
            mixed += 1
    # shared nodes: a U_plus branch and a U_minus branch never meet below the root
    shared = 0
    for n in range(1, h + 1):
        for node in tree.nodes_at(n).tolist():
            ks = set(kind[tree.node_faces(node)].tolist())
            if 3 in ks and 2 in ks:
                shared += 1
    exp_plus = len(canon.u_plus_nodes(canon.n0 + h)) if canon.ambient_tree is not None and len(canon.U_plus) else 0
    ok = mixed == 0 and shared == 0 and n_virtual == canon.n_collars and n_plus == exp_plus
    return {"ok": ok, "U_minus_ends": n_virtual, "U_plus_ends": n_plus, "expected_U_plus": exp_plus,
            "shared_nodes": shared}


# ---------------------------------------------------------------------------
# ends with impressions

def relatively_compact_ends(canon: CanonicalExhaustion, horizon: int | None = None) -> list[RelEnd]:
    out = []
    for i in range(canon.n_collars):
        out.append(RelEnd(i, canon.domain.index, canon.collar_ids[i], Impression(i, canon.impression(i))))
    return out


def union_of_impressions(ends_: list[RelEnd]) -> Subcomplex:
    e, v, f = set(), set(), set()
    for r in ends_:
        e.update(r.impression.cells.edges)
        v.update(r.impression.cells.vertices)
        f.update(r.impression.cells.faces)
    return Subcomplex(tuple(sorted(f)), tuple(sorted(e)), tuple(sorted(v)))


def domain_ends(ambient, K: Subcomplex, horizon: int | None = None) -> list[dict]:
    """Relatively compact ends of every residual domain, in one pass."""
    domains = residual_domains(ambient, K, horizon)
    out = []
    canon0 = None
    for d in domains:
        canon = CanonicalExhaustion(ambient, K, d, horizon, domains) if canon0 is None else _reuse(canon0, d)
        canon0 = canon
        out.append({"domain": d, "canon": canon, "ends": relatively_compact_ends(canon)})
    return out


def _reuse(canon: CanonicalExhaustion, domain: ResidualDomain) -> CanonicalExhaustion:
    """Same ambient and K, another domain; shares the derived neighbourhood."""
    c = object.__new__(CanonicalExhaustion)
    c.ambient, c.K, c.amb, c.horizon = canon.ambient, canon.K, canon.amb, canon.horizon
    c.domains, c.domain, c.n0, c.base, c.nb = canon.domains, domain, canon.n0, canon.base, canon.nb
    k = canon.base.n_faces
    if canon.amb.layer is None:
        um, upl = domain.faces, np.zeros(0, np.int64)
    else:
        um, upl = domain.faces[domain.faces < k], domain.faces[domain.faces >= k]
    c.U_minus, c.U_plus = Region(um), Region(upl)
    in_u = np.zeros(k, dtype=bool)
    in_u[um] = True
    s2 = in_u[c.nb.face_parent]
    c.s2_domain_mask = s2
    c.core_mask = s2 & ~c.nb.collar_mask
    c.collar_ids = [int(x) for x in np.unique(c.nb.collar_labels[s2 & c.nb.collar_mask])]
    c.xi = c._xi()
    return c


# ---------------------------------------------------------------------------
# frontier components and Corollary-18 decision

@dataclass
class FrontierReport:
    pieces: list
    end_to_piece: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.pieces)

    def to_dict(self) -> dict:
        return {"count": len(self.pieces), "pieces": [p.to_dict() for p in self.pieces],
                "end_to_piece": {str(k): v for k, v in sorted(self.end_to_piece.items())}}


def region_frontier(ambient, U, horizon: int | None = None) -> Subcomplex:
    """fr U.  A ResidualDomain keeps the K-cells it touches, including
    dangling edges and isolated vertices that no face of S - U meets."""
    if isinstance(U, ResidualDomain):
        return U.frontier
    cx = ambient.window((horizon or 8) + 1).complex if _is_stream(ambient) else ambient
    reg = U.region if isinstance(U, ResidualDomain) else (U if isinstance(U, Region) else Region(U))
    return reg.frontier(cx)


def frontier_components(ambient, U, K: Subcomplex | None = None, horizon: int | None = None) -> FrontierReport:
    if isinstance(U, ResidualDomain):
        fr = U.frontier
    else:
        fr = region_frontier(ambient, U, horizon)
    pieces = fr.components()
    rep = FrontierReport(pieces)
    if K is not None and isinstance(U, ResidualDomain):
        canon = CanonicalExhaustion(ambient, K, U, horizon)
        vpiece = {}
        for i, p in enumerate(pieces):
            for v in p.vertices:
                vpiece[v] = i
        for r in relatively_compact_ends(canon):
            vs = set(r.impression.cells.vertices)
            ps = {vpiece[v] for v in vs if v in vpiece}
            rep.end_to_piece[r.index] = sorted(ps)[0] if len(ps) == 1 else sorted(ps)
    return rep


@dataclass
class C18Result:
    is_residual_of_finite_K: bool
    witness: Subcomplex | None
    components: int | None
    evidence: dict

    def to_dict(self) -> dict:
        return {"is_residual_of_finite_K": self.is_residual_of_finite_K,
                "witness": self.witness.to_dict() if self.witness is not None else None,
                "components": self.components, "evidence": self.evidence}


def c18_decide(ambient, U, horizon: int | None = None) -> C18Result:
    reg = U.region if isinstance(U, ResidualDomain) else (U if isinstance(U, Region) else Region(U))
    fr = region_frontier(ambient, U if isinstance(U, ResidualDomain) else reg, horizon)
    if _is_stream(ambient):
        h = horizon or 8
        win = ambient.window(h + 1)
        try:
            d = subcomplex_depth(win, fr)
        except SurfaceError:
            d = h + 1
        if d > h:
            return C18Result(False, None, None, {"reason": "frontier not compact at horizon",
                                                  "frontier_depth": d, "qualifier": f"at horizon {h}",
                                                  "frontier_cells": len(fr.edges) + len(fr.vertices)})
    K = fr
    comps = len(K.components())
    try:
        doms = residual_domains(ambient, K, horizon)
    except SurfaceError as exc:
        return C18Result(False, None, comps, {"reason": str(exc)})
    target = set(reg.faces.tolist())
    for d in doms:
        if set(d.faces.tolist()) == target:
            return C18Result(True, K, comps, {"domain": d.index})
    return C18Result(False, K, comps, {"reason": "U is not a component of S - fr U"})


# ---------------------------------------------------------------------------
# bounds

@dataclass
class Augmented:
    complex: SurfaceComplex
    cone_vertices: list
    cone_faces: np.ndarray
    n_cycles: int


def augment(cx: SurfaceComplex) -> Augmented:
    """Cap every boundary cycle with a cone (the closed surface S*)."""
    cyc = boundary_components(cx)
    faces = [cx.faces]
    nv = cx.vertex_count
    apex = []
    for c in cyc:
        vs = list(c.vertices)
        # orient each cone face opposite to the adjacent face across the edge
        tri = []
        for a, b in zip(vs, vs[1:] + vs[:1]):
            e = cx.edge_id(a, b)
            f = int(cx.edge_faces[e, 0])
            row = cx.faces[f].tolist()
            i = row.index(a)
            if row[(i + 1) % 3] == b:
                tri.append((b, a, nv))
            else:
                tri.append((a, b, nv))
        faces.append(np.asarray(tri, dtype=np.int64))
        apex.append(nv)
        nv += 1
    out = SurfaceComplex(nv, np.concatenate(faces))
    return Augmented(out, apex, np.arange(cx.n_faces, out.n_faces), len(cyc))


@dataclass
class BoundCheck:
    count: int
    bound: int
    ok: bool
    m: int
    n: int
    g: int
    augmented: bool

    @property
    def tight(self) -> bool:
        return self.count == self.bound

    def to_dict(self) -> dict:
        return {"count": self.count, "bound": self.bound, "ok": self.ok, "m": self.m, "n": self.n,
                "g": self.g, "augmented": self.augmented, "tight": self.tight}


def check_end_bound(cx: SurfaceComplex, K: Subcomplex, U) -> BoundCheck:
    if _is_stream(cx) or not isinstance(cx, SurfaceComplex):
        raise SurfaceError("ambient not compact: bound checks need a finite complex")
    g = genus(cx)
    m = K.n_components()
    fm, em, vm = K.masks(cx)
    touches = bool(vm[cx.boundary_vertex_mask].any()) if cx.boundary_vertex_mask.any() else False
    face = int(U.faces[0] if isinstance(U, (ResidualDomain, Region)) else U)
    if touches:
        aug = augment(cx)
        K2 = Subcomplex.closure(aug.complex, faces=list(K.faces) + aug.cone_faces.tolist(),
                                edges=K.edges, vertices=K.vertices)[0]
        doms = residual_domains(aug.complex, K2)
        dom = domain_of(doms, face)
        canon = CanonicalExhaustion(aug.complex, K2, dom)
        n = aug.n_cycles
        bound = (m + n) * (g.value + 1)
        return BoundCheck(canon.n_collars, bound, canon.n_collars <= bound, m, n, g.value, True)
    doms = residual_domains(cx, K)
    dom = domain_of(doms, face)
    canon = CanonicalExhaustion(cx, K, dom)
    bound = m * (g.value + 1)
    return BoundCheck(canon.n_collars, bound, canon.n_collars <= bound, m, 0, g.value, False)


# ---------------------------------------------------------------------------
# end embedding under deletion

@dataclass
class EndEmbedding:
    mapping: dict
    ends_after: list
    injective: bool
    swallow_depth: int
    horizon: int

    @property
    def new_ends(self) -> int:
        return len(self.ends_after) - len(self.mapping)

    def to_dict(self) -> dict:
        return {"mapping": {str(k): v for k, v in sorted(self.mapping.items())}, "ends_after": self.ends_after,
                "injective": self.injective, "new_relatively_compact": self.new_ends,
                "swallow_depth": self.swallow_depth, "qualifier": f"at horizon {self.horizon}"}


def end_embedding(stream: ExhaustionStream, K: Subcomplex, horizon: int) -> EndEmbedding:
    amb = Ambient.of(stream, K, horizon)
    res = stream_ends(stream, horizon)
    tree = res.tree
    if K.empty:
        after = [{"kind": "stream", "leaf": e.leaf, "domain": 0} for e in res.ends]
        mapping = {e.leaf: i for i, e in enumerate(res.ends)}
        return EndEmbedding(mapping, after, True, 0, horizon)
    if amb.k >= horizon:
        raise SurfaceError(f"K not swallowed before horizon {horizon}")
    info = domain_ends(stream, K, horizon)
    after, mapping = [], {}
    leaves_by_domain = {}
    for e in res.ends:
        f = int(tree.node_faces(e.leaf)[0])
        d = domain_of([x["domain"] for x in info], f)
        leaves_by_domain.setdefault(d.index, []).append(e.leaf)
    for x in info:
        d = x["domain"]
        for leaf in leaves_by_domain.get(d.index, []):
            mapping[leaf] = len(after)
            after.append({"kind": "stream", "leaf": leaf, "domain": d.index})
        for r in x["ends"]:
            after.append({"kind": "relatively-compact", "domain": d.index, "collar": r.collar,
                          "regular": r.regular})
    injective = len(set(mapping.values())) == len(mapping)
    return EndEmbedding(mapping, after, injective, amb.k, horizon)
