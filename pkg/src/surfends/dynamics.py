"""Maps induced by K-preserving simplicial automorphisms.

Face count plays the role of area: a simplicial bijection preserves it
exactly, so residual domains are permuted with their sizes, and the
relatively compact ends of S - K (one per collar) are permuted too.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .core import Subcomplex, SurfaceComplex, SurfaceError, barycentric_subdivision
from .exhaustion import ExhaustionStream
from .residual import ResidualDomain, domain_ends, residual_domains


class InvarianceError(SurfaceError):
    pass


class SimplicialAutomorphism:
    """Vertex bijection of a complex that maps faces onto faces.

    ``domain`` restricts the map to a sub-complex (face ids); the map must
    permute those faces.  For streams the complex is the window F_{h+1} of a
    builder-declared, window-preserving map.
    """

    def __init__(self, cx: SurfaceComplex, vertex_map, domain=None, name: str = "f"):
        self.complex = cx
        self.vertex_map = np.asarray(vertex_map, dtype=np.int64)
        self.name = name
        if len(self.vertex_map) != cx.vertex_count:
            raise SurfaceError("vertex map length must equal vertex count")
        used = cx.used_vertices
        if len(np.unique(self.vertex_map[used])) != len(used):
            raise SurfaceError("vertex map is not injective")
        self.domain = None if domain is None or domain == "all" else np.unique(np.asarray(domain, dtype=np.int64))
        faces = np.arange(cx.n_faces) if self.domain is None else self.domain
        img = cx.face_index(self.vertex_map[cx.faces[faces]])
        if (img < 0).any():
            bad = faces[img < 0][0]
            raise SurfaceError(f"face {int(bad)} is not mapped onto a face")
        if not np.array_equal(np.sort(img), faces):
            raise SurfaceError("map does not permute the faces of its domain")
        self.face_map = np.full(cx.n_faces, -1, dtype=np.int64)
        self.face_map[faces] = img

    @classmethod
    def identity(cls, cx: SurfaceComplex) -> "SimplicialAutomorphism":
        return cls(cx, np.arange(cx.vertex_count), name="id")

    @classmethod
    def from_stream(cls, stream: ExhaustionStream, name: str, horizon: int) -> "SimplicialAutomorphism":
        maps = getattr(stream, "automorphisms", None)
        if maps is None or name not in maps():
            raise SurfaceError(f"stream declares no automorphism {name!r}")
        vm = stream.map_vertices(maps()[name], horizon + 1)
        f = cls(stream.window(horizon + 1).complex, vm, name=name)
        f.stream = stream
        f.horizon = horizon
        return f

    def compose(self, other: "SimplicialAutomorphism") -> "SimplicialAutomorphism":
        """self after other."""
        if self.complex is not other.complex and self.complex.vertex_count != other.complex.vertex_count:
            raise SurfaceError("maps act on different complexes")
        out = SimplicialAutomorphism(self.complex, self.vertex_map[other.vertex_map],
                                     None if self.domain is None else self.domain,
                                     name=f"{self.name}*{other.name}")
        for attr in ("stream", "horizon"):
            if hasattr(self, attr):
                setattr(out, attr, getattr(self, attr))
        return out

    def order(self, limit: int = 1000) -> int:
        v = self.vertex_map
        cur = v.copy()
        ident = np.arange(len(v))
        used = self.complex.used_vertices
        for k in range(1, limit + 1):
            if np.array_equal(cur[used], ident[used]):
                return k
            cur = v[cur]
        raise SurfaceError("order exceeds limit")

    def image_of(self, K: Subcomplex) -> Subcomplex:
        v = self.vertex_map
        faces = tuple(sorted(self.face_map[list(K.faces)].tolist())) if K.faces else ()
        edges = tuple(sorted((min(a, b), max(a, b)) for a, b in (v[np.asarray(K.edges, dtype=np.int64).reshape(-1, 2)]).tolist()))
        verts = tuple(sorted(v[list(K.vertices)].tolist())) if K.vertices else ()
        return Subcomplex(faces, edges, verts)

    def preserves(self, K: Subcomplex) -> bool:
        img = self.image_of(K)
        return (set(img.faces) == set(K.faces) and set(img.edges) == set(map(tuple, K.edges))
                and set(img.vertices) == set(K.vertices))

    def to_dict(self) -> dict:
        return {"vertex_map": self.vertex_map.tolist(),
                "domain": "all" if self.domain is None else {"faces": self.domain.tolist()}}


def _ambient_of(f: SimplicialAutomorphism):
    stream = getattr(f, "stream", None)
    if stream is not None:
        return stream, f.horizon
    if f.domain is not None:
        return SurfaceComplex(f.complex.vertex_count, f.complex.faces[f.domain]), None
    return f.complex, None


def _face_map_on(f: SimplicialAutomorphism, cx: SurfaceComplex) -> np.ndarray:
    if cx is f.complex:
        return f.face_map
    return cx.face_index(f.vertex_map[cx.faces])


@dataclass
class DomainPermutation:
    perm: list
    sizes: list
    bounded: list
    measure_preserved: bool

    def to_dict(self) -> dict:
        return {"perm": self.perm, "sizes": self.sizes, "bounded": self.bounded,
                "measure_preserved": self.measure_preserved}


def induced_domain_map(f: SimplicialAutomorphism, K: Subcomplex, horizon: int | None = None) -> DomainPermutation:
    if not f.preserves(K):
        raise InvarianceError("invariance certificate fails: f(K) != K")
    amb, h = _ambient_of(f)
    doms = residual_domains(amb, K, h if horizon is None else horizon)
    cx = amb.window((h if horizon is None else horizon) + 1).complex if isinstance(amb, ExhaustionStream) else amb
    fmap = _face_map_on(f, cx)
    owner = np.full(cx.n_faces, -1, dtype=np.int64)
    for d in doms:
        owner[d.faces] = d.index
    perm = []
    for d in doms:
        img = fmap[d.faces]
        tgt = np.unique(owner[img])
        if len(tgt) != 1 or tgt[0] < 0:
            raise SurfaceError(f"domain {d.index} is not mapped into a single domain")
        perm.append(int(tgt[0]))
    sizes = [len(d.faces) for d in doms]
    ok = all(sizes[i] == sizes[j] for i, j in enumerate(perm)) and sorted(perm) == list(range(len(doms)))
    bounded_ok = all(doms[i].bounded == doms[j].bounded for i, j in enumerate(perm))
    return DomainPermutation(perm, sizes, [d.bounded for d in doms], ok and bounded_ok)


@dataclass
class EndPermutation:
    perm: list
    domain_of_end: list
    impressions: list
    naturality: bool
    commutes: bool
    excluded: str | None = None

    def orbits(self) -> list[list[int]]:
        seen, out = set(), []
        for s in range(len(self.perm)):
            if s in seen:
                continue
            orb, x = [], s
            while x not in seen:
                seen.add(x)
                orb.append(x)
                x = self.perm[x]
            out.append(orb)
        return out

    @property
    def injective(self) -> bool:
        return len(set(self.perm)) == len(self.perm)

    def to_dict(self) -> dict:
        d = {"perm": self.perm, "orbits": self.orbits(), "injective": self.injective,
             "naturality": self.naturality, "commutes_with_domains": self.commutes}
        if self.excluded:
            d["excluded"] = self.excluded
        return d


def _lift_twice(f: SimplicialAutomorphism, base: SurfaceComplex, nb) -> np.ndarray:
    vm = f.vertex_map[: base.vertex_count]
    img = base.face_index(vm[base.faces])
    if (img < 0).any():
        raise SurfaceError("map does not preserve F_0")
    return nb.sd2.lift_vertex_map(nb.sd1.lift_vertex_map(vm))


def induced_end_map(f: SimplicialAutomorphism, K: Subcomplex, horizon: int | None = None) -> EndPermutation:
    dperm = induced_domain_map(f, K, horizon)
    amb, h = _ambient_of(f)
    h = h if horizon is None else horizon
    info = domain_ends(amb, K, h)
    ends, dom_of, owner_collar = [], [], {}
    for x in info:
        for r in x["ends"]:
            owner_collar[r.collar] = len(ends)
            ends.append(r)
            dom_of.append(x["domain"].index)
    if not info:
        return EndPermutation([], [], [], True, True)
    nb = info[0]["canon"].nb
    S2 = nb.S2
    v2 = _lift_twice(f, nb.base, nb)
    fimg = S2.face_index(v2[S2.faces])
    perm = []
    for r in ends:
        faces = nb.collars[r.collar]
        tgt = np.unique(nb.collar_labels[fimg[faces]])
        if len(tgt) != 1 or int(tgt[0]) not in owner_collar:
            raise SurfaceError("collar image is not a collar")
        if len(nb.collars[int(tgt[0])]) != len(faces):
            raise SurfaceError("collar mapped onto a proper part of a collar")
        perm.append(owner_collar[int(tgt[0])])
    vm = f.vertex_map
    natural = True
    for i, r in enumerate(ends):
        z = r.impression.cells
        img_v = sorted(vm[list(z.vertices)].tolist()) if z.vertices else []
        img_e = sorted((min(a, b), max(a, b)) for a, b in vm[np.asarray(z.edges, dtype=np.int64).reshape(-1, 2)].tolist())
        zt = ends[perm[i]].impression.cells
        if img_v != sorted(zt.vertices) or img_e != sorted(map(tuple, zt.edges)):
            natural = False
    commutes = all(dperm.perm[dom_of[i]] == dom_of[perm[i]] for i in range(len(ends)))
    excluded = "ends outside the map's domain sub-complex" if f.domain is not None else None
    if isinstance(amb, ExhaustionStream):
        excluded = "stream ends (not relatively compact) are outside the domain of f*"
    return EndPermutation(perm, dom_of, [r.impression.cells for r in ends], natural, commutes, excluded)


def verify_p51(f: SimplicialAutomorphism, K: Subcomplex, horizon: int | None = None) -> dict:
    ep = induced_end_map(f, K, horizon)
    orbits = ep.orbits()
    periodic = ep.injective and all(len(o) >= 1 for o in orbits)
    # a point is periodic iff iterating returns to it
    for s in range(len(ep.perm)):
        x, steps = ep.perm[s], 1
        while x != s and steps <= len(ep.perm):
            x, steps = ep.perm[x], steps + 1
        if x != s:
            periodic = False
    return {"all_periodic": periodic, "orbit_lengths": sorted(len(o) for o in orbits),
            "orbits": orbits, "naturality": ep.naturality, "ends": len(ep.perm),
            "permutation": ep.to_dict()}


# ---------------------------------------------------------------------------
# automorphism search for small complexes (test-case generation)

def automorphism_group(cx: SurfaceComplex, limit: int | None = None) -> list[np.ndarray]:
    """All simplicial automorphisms of a small connected closed-or-bordered complex."""
    F = cx.n_faces
    ef = cx.edge_faces
    fe = cx.face_edges
    faces = cx.faces
    out = []
    a0 = faces[0]
    perms = [(0, 1, 2), (1, 2, 0), (2, 0, 1), (0, 2, 1), (2, 1, 0), (1, 0, 2)]
    for t in range(F):
        for p in perms:
            vm = np.full(cx.vertex_count, -1, dtype=np.int64)
            tgt = faces[t][list(p)]
            ok = True
            for i in range(3):
                vm[a0[i]] = tgt[i]
            fm = np.full(F, -1, dtype=np.int64)
            fm[0] = t
            q = deque([0])
            while q and ok:
                f = q.popleft()
                for e in fe[f].tolist():
                    g = ef[e][0] if ef[e][0] != f else ef[e][1]
                    if g < 0:
                        continue
                    u, v = cx.edges[e]
                    ie = cx.edge_id(vm[u], vm[v]) if vm[u] >= 0 and vm[v] >= 0 else -1
                    if ie < 0:
                        ok = False
                        break
                    pair = cx.edge_faces[ie]
                    h = pair[0] if pair[0] != fm[f] else pair[1]
                    if h < 0:
                        ok = False
                        break
                    w = [x for x in faces[g].tolist() if x != u and x != v][0]
                    wi = [x for x in faces[h].tolist() if x != vm[u] and x != vm[v]][0]
                    if vm[w] == -1:
                        vm[w] = wi
                    elif vm[w] != wi:
                        ok = False
                        break
                    if fm[g] == -1:
                        fm[g] = h
                        q.append(g)
                    elif fm[g] != h:
                        ok = False
                        break
            if ok and (fm >= 0).all() and len(np.unique(fm)) == F:
                used = cx.used_vertices
                if len(np.unique(vm[used])) == len(used):
                    out.append(vm)
                    if limit and len(out) >= limit:
                        return out
    return out


def element_of_order(group: list[np.ndarray], cx: SurfaceComplex, k: int) -> np.ndarray | None:
    for vm in group:
        f = SimplicialAutomorphism(cx, vm)
        if f.order() == k:
            return vm
    return None
