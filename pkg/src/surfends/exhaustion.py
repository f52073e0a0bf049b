"""Exhaustion streams of non-compact surfaces and their ends.

A stream presents a surface as nested compact complexes F_1 c F_2 c ...
using global ids: the faces of F_n are a prefix of the faces of F_{n+1}
and vertex ids never change, so the inclusion maps are identities.  Each
face carries its *layer*, the smallest n with the face in F_n.

Ends are read off the tree of complement components: a node at depth n
is a component of F_{h+1} - F_n for horizon h, and an end is a branch
from depth 1 down to a leaf at depth h.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components, shortest_path

from .core import (
    SurfaceComplex,
    Subcomplex,
    ValidationReport,
    boundary_components,
    face_components,
    surface_genus_of_faces,
    validate_surface,
)

TRUST_NOTE = "trusted: exhaustive producer"


class StreamError(RuntimeError):
    """Producer failure or invalid stream."""


class NotEscaping(ValueError):
    pass


@dataclass
class Window:
    """F_depth with the layer of every face."""
    complex: SurfaceComplex
    layer: np.ndarray
    depth: int

    def faces_upto(self, n: int) -> np.ndarray:
        return np.flatnonzero(self.layer <= n)

    def sub(self, n: int) -> SurfaceComplex:
        """F_n as a complex on the same global vertex ids."""
        k = int(np.searchsorted(self.layer, n, side="right"))
        return SurfaceComplex(self.complex.vertex_count, self.complex.faces[:k])


class ExhaustionStream:
    """Base producer.  Subclasses implement :meth:`_generate`.

    ``_generate(depth)`` returns ``(vertex_count, faces, layer)`` for F_depth
    and must be prefix-stable across depths.
    """

    name = "stream"
    finite_type = False
    stabilization_depth: int | None = None
    declared_ends: tuple | None = None
    max_depth: int | None = None

    def __init__(self, **params):
        self.params = params
        self._windows: dict[int, Window] = {}
        self._full: tuple | None = None

    def __repr__(self):
        return f"{type(self).__name__}({self.params})"

    def _generate(self, depth: int):
        raise NotImplementedError

    def window(self, depth: int) -> Window:
        if depth < 1:
            raise ValueError("depth starts at 1")
        if depth in self._windows:
            return self._windows[depth]
        if self.max_depth is not None and depth > self.max_depth:
            raise StreamError(f"producer failure at depth {depth}: only {self.max_depth} depths available")
        if self._full is None or self._full[0] < depth:
            try:
                nv, faces, layer = self._generate(depth)
            except StreamError:
                raise
            except Exception as exc:  # producer bug, surfaced with its depth
                raise StreamError(f"producer failure at depth {depth}: {exc}") from exc
            self._full = (depth, nv, np.asarray(faces, np.int64), np.asarray(layer, np.int64))
        _, nv, faces, layer = self._full
        k = int(np.searchsorted(layer, depth, side="right"))
        used_max = int(faces[:k].max()) + 1 if k else 0
        win = Window(SurfaceComplex(used_max, faces[:k]), layer[:k], depth)
        self._windows[depth] = win
        return win

    def complex_at(self, n: int) -> SurfaceComplex:
        return self.window(n).complex

    @property
    def ambient_boundary_edges(self) -> np.ndarray:
        return np.zeros((0, 2), dtype=np.int64)

    def declared_defect(self, face_ids) -> str | None:
        """Builder promise about handles/crosscaps beyond the given faces."""
        return None

    def manifest(self) -> dict:
        return {"kind": "builder", "name": self.name, "params": self.params}



class Subsampled(ExhaustionStream):
    """The stream F_step, F_2step, ... of another stream."""

    def __init__(self, base: ExhaustionStream, step: int = 2):
        super().__init__(step=step)
        self.base = base
        self.step = step
        self.name = f"{base.name}/every-{step}"
        self.declared_ends = base.declared_ends
        self.finite_type = base.finite_type

    def _generate(self, depth):
        w = self.base.window(depth * self.step)
        return w.complex.vertex_count, w.complex.faces, -(-w.layer // self.step)

    @property
    def ambient_boundary_edges(self) -> np.ndarray:
        return self.base.ambient_boundary_edges

    def declared_defect(self, face_ids):
        return self.base.declared_defect(face_ids)

# ---------------------------------------------------------------------------
# validation

def validate_exhaustion(stream: ExhaustionStream, depth: int) -> ValidationReport:
    """Check axioms (a) and (c) and the boundary condition up to ``depth``."""
    rep = ValidationReport(warnings=[TRUST_NOTE])
    win = stream.window(depth + 1)  # StreamError propagates, citing the depth
    amb = np.sort(stream.ambient_boundary_edges, axis=1) if len(stream.ambient_boundary_edges) else np.zeros((0, 2), np.int64)
    for n in range(1, depth + 1):
        fn = win.sub(n)
        fn1 = win.sub(n + 1)
        base = validate_surface_compacted(fn)
        for v in base.violations:
            rep.violations.append({"kind": "surface", "depth": n, "detail": v})
        comps = face_components(fn)[1]
        if comps != 1:
            rep.violations.append({"kind": "disconnected", "depth": n, "components": comps})
        # axiom (a): F_n inside the interior of F_{n+1}
        verts = fn.used_vertices
        bmask = fn1.boundary_vertex_mask
        on_bd = verts[bmask[verts]]
        if len(on_bd):
            bad = on_bd
            if len(amb):
                be = fn1.edges[fn1.boundary_edge_mask]
                eid_amb = set(map(tuple, amb.tolist()))
                nonamb = np.array([tuple(e) not in eid_amb for e in be.tolist()], dtype=bool)
                touched = np.zeros(fn1.vertex_count, bool)
                touched[be[nonamb].reshape(-1)] = True
                bad = on_bd[touched[on_bd]]
            if len(bad):
                rep.violations.append({"kind": "axiom_a", "depth": n, "vertices": bad[:20].tolist(), "count": int(len(bad))})
        # axiom (c): each component of F_{n+1} - int F_n meets one cycle of dF_n
        cycles = [c for c in boundary_components(fn) if not _is_ambient_cycle(fn, c, amb)]
        lab, k = face_components(win.complex, (win.layer == n + 1))
        cyc_of_edge = {}
        for i, c in enumerate(cycles):
            for e in c.edges:
                cyc_of_edge[tuple(fn.edges[e].tolist())] = i
        new_faces = np.flatnonzero(win.layer == n + 1)
        hit = [set() for _ in range(k)]
        fe = win.complex.faces[new_faces]
        for f, tri in zip(new_faces.tolist(), fe.tolist()):
            for a, b in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])):
                c = cyc_of_edge.get((min(a, b), max(a, b)))
                if c is not None:
                    hit[lab[f]].add(c)
        for i, h in enumerate(hit):
            if len(h) != 1:
                rep.violations.append({"kind": "axiom_c", "depth": n, "component": i, "cycles_met": sorted(h)})
    if len(amb) and not getattr(stream, "boundary_compact", True):
        rep.warnings.append("non-compact boundary: ambient boundary not required inside F_1")
    elif len(amb):
        f1 = win.sub(1)
        eid = f1.edge_index(amb[:, 0], amb[:, 1])
        if (eid < 0).any():
            rep.violations.append({"kind": "boundary_not_in_F1", "edges": amb[eid < 0][:10].tolist()})
    return rep


def validate_surface_compacted(cx: SurfaceComplex) -> ValidationReport:
    from .core import compact
    return validate_surface(compact(cx)[0])


def _is_ambient_cycle(cx, cycle, amb) -> bool:
    if not len(amb):
        return False
    s = set(map(tuple, amb.tolist()))
    return all(tuple(cx.edges[e].tolist()) in s for e in cycle.edges)


# ---------------------------------------------------------------------------
# end tree

class EndTree:
    """Tree of complement components F_{h+1} - F_n, n = 1..h.

    Node 0 is the root (the whole surface).  Nodes at each depth are ordered
    by smallest contained face id.
    """

    def __init__(self, stream: ExhaustionStream, horizon: int, window: Window | None = None):
        self.stream = stream
        self.horizon = horizon
        self.window = window if window is not None else stream.window(horizon + 1)
        self._build()

    def _build(self):
        win = self.window
        L = win.layer
        h = self.horizon
        pairs = win.complex.adjacency_pairs
        tmin = np.minimum(L[pairs[:, 0]], L[pairs[:, 1]])
        order = np.argsort(tmin, kind="stable")
        pairs, tmin = pairs[order], tmin[order]
        bounds = np.searchsorted(tmin, np.arange(h + 3))
        face_starts = np.searchsorted(L, np.arange(h + 3))

        depth = [0]
        parent = [-1]
        minface = [-1]
        first_node = np.full(len(L), -1, dtype=np.int64)
        prev_nodes = np.zeros(0, dtype=np.int64)
        level_nodes: dict[int, np.ndarray] = {}

        for n in range(h, 0, -1):
            new = np.arange(face_starts[n + 1], face_starts[n + 2])
            k = len(new)
            m = len(prev_nodes)
            p = pairs[bounds[n + 1]:bounds[n + 2]]
            # orient pairs so column 0 is a layer n+1 face
            swap = L[p[:, 0]] != n + 1
            p = np.where(swap[:, None], p[:, ::-1], p)
            a = p[:, 0] - face_starts[n + 1]
            g = p[:, 1]
            deep = L[g] > n + 1
            b = np.empty(len(g), dtype=np.int64)
            b[~deep] = g[~deep] - face_starts[n + 1]
            if deep.any():
                anc = first_node[g[deep]]
                dep = np.asarray(depth)
                par = np.asarray(parent)
                while True:
                    up = dep[anc] > n + 1
                    if not up.any():
                        break
                    anc = np.where(up, par[anc], anc)
                pos = np.searchsorted(prev_nodes, anc)
                b[deep] = k + pos
            size = k + m
            gr = sparse.coo_matrix((np.ones(len(a), np.int8), (a, b)), shape=(size, size))
            ncomp, lab = connected_components(gr, directed=False)
            mins = np.full(ncomp, np.iinfo(np.int64).max)
            np.minimum.at(mins, lab[:k], new)
            if m:
                np.minimum.at(mins, lab[k:], np.asarray(minface)[prev_nodes])
            rank = np.argsort(np.argsort(mins))
            base = len(depth)
            ids = base + rank
            depth.extend([n] * ncomp)
            parent.extend([0] * ncomp)
            mf = np.empty(ncomp, dtype=np.int64)
            mf[rank] = mins
            minface.extend(mf.tolist())
            first_node[new] = ids[lab[:k]]
            par_arr = np.asarray(parent)
            if m:
                par_arr[prev_nodes] = ids[lab[k:]]
            parent = par_arr.tolist()
            prev_nodes = base + np.arange(ncomp)
            level_nodes[n] = prev_nodes
        self.node_depth = np.asarray(depth, dtype=np.int64)
        self.node_parent = np.asarray(parent, dtype=np.int64)
        self.node_minface = np.asarray(minface, dtype=np.int64)
        self.first_node = first_node
        self._levels = level_nodes

    # -- queries ----------------------------------------------------------
    def nodes_at(self, n: int) -> np.ndarray:
        return self._levels.get(n, np.zeros(0, np.int64))

    def leaves(self) -> np.ndarray:
        return self.nodes_at(self.horizon)

    def leaf_counts(self) -> list[int]:
        return [len(self.nodes_at(n)) for n in range(1, self.horizon + 1)]

    def children(self, node: int) -> np.ndarray:
        return np.flatnonzero(self.node_parent == node)

    def path(self, node: int) -> tuple:
        out = []
        while node > 0:
            out.append(int(node))
            node = int(self.node_parent[node])
        return tuple(reversed(out))

    def ancestor_at(self, node: int, n: int) -> int:
        while self.node_depth[node] > n:
            node = int(self.node_parent[node])
        return node

    def face_nodes_at(self, n: int) -> np.ndarray:
        """Node at depth n of every face (-1 for faces in F_n)."""
        L = self.window.layer
        out = np.full(len(L), -1, dtype=np.int64)
        sel = np.flatnonzero(L > n)
        anc = self.first_node[sel]
        while True:
            up = self.node_depth[anc] > n
            if not up.any():
                break
            anc = np.where(up, self.node_parent[anc], anc)
        out[sel] = anc
        return out

    def node_faces(self, node: int) -> np.ndarray:
        if node == 0:
            return np.arange(len(self.window.layer))
        n = int(self.node_depth[node])
        return np.flatnonzero(self.face_nodes_at(n) == node)

    def node_genus(self, node: int) -> tuple[int, bool]:
        """(genus-so-far, orientable-so-far) of the node's closed complex."""
        return surface_genus_of_faces(self.window.complex, self.node_faces(node))

    def node_attached_cycle(self, node: int) -> tuple:
        """Boundary cycle of F_n (as vertex tuple) the node attaches along."""
        n = int(self.node_depth[node])
        fn = self.window.sub(n)
        cx = self.window.complex
        fe = set(cx.face_edges[self.node_faces(node)].reshape(-1).tolist())
        keys = {tuple(cx.edges[e].tolist()) for e in fe}
        out = []
        for c in boundary_components(fn):
            if any(tuple(fn.edges[e].tolist()) in keys for e in c.edges):
                out.append(c.vertices)
        return tuple(out)

    def payload(self, node: int) -> dict:
        g, ori = self.node_genus(node)
        return {
            "depth": int(self.node_depth[node]),
            "faces": int(len(self.node_faces(node))),
            "genus_so_far": g,
            "orientable_so_far": ori,
            "attached_cycles": len(self.node_attached_cycle(node)),
        }

    def to_dict(self) -> dict:
        return {
            "horizon": self.horizon,
            "leaf_counts": self.leaf_counts(),
            "nodes": [
                {"id": int(i), "depth": int(self.node_depth[i]), "parent": int(self.node_parent[i]), "min_face": int(self.node_minface[i])}
                for i in range(len(self.node_depth))
            ],
        }


def end_tree(stream: ExhaustionStream, horizon: int) -> EndTree:
    return EndTree(stream, horizon)


@dataclass
class End:
    """Branch of an end tree, truncated at the horizon."""
    leaf: int
    path: tuple
    horizon: int
    tags: dict = field(default_factory=dict)

    def node(self, n: int) -> int:
        return self.path[n - 1]

    def to_dict(self) -> dict:
        return {"leaf": self.leaf, "path": list(self.path), "horizon": self.horizon, **self.tags}


@dataclass
class EndsResult:
    ends: list
    stabilized: bool
    leaf_counts: list
    exact: bool
    tree: EndTree

    def __len__(self):
        return len(self.ends)

    def to_dict(self) -> dict:
        return {
            "count": len(self.ends),
            "stabilized": self.stabilized,
            "exact": self.exact,
            "leaf_counts": self.leaf_counts,
            "qualifier": f"at horizon {self.tree.horizon}",
            "ends": [e.to_dict() for e in self.ends],
        }


def stabilized_counts(counts: list[int]) -> bool:
    h = len(counts)
    w = max(2, h // 4)
    if h < w:
        return False
    tail = counts[-w:]
    return len(set(tail)) == 1


def ends(stream: ExhaustionStream, horizon: int, tree: EndTree | None = None) -> EndsResult:
    tree = tree or end_tree(stream, horizon)
    counts = tree.leaf_counts()
    stab = stabilized_counts(counts)
    exact = bool(stab and stream.finite_type and (stream.stabilization_depth or 1) <= horizon)
    out = [End(int(l), tree.path(int(l)), horizon) for l in tree.leaves()]
    return EndsResult(out, stab, counts, exact, tree)


@dataclass
class Planarity:
    planar: bool
    kind: str            # "planar", "b'" (non-planar) or "b''" (non-orientable)
    first_depth: int | None
    deepest_genus: int
    deepest_orientable: bool
    declared: str | None = None

    def to_dict(self) -> dict:
        return {
            "planar": self.planar,
            "class": self.kind,
            "first_depth": self.first_depth,
            "deepest_genus": self.deepest_genus,
            "deepest_orientable": self.deepest_orientable,
            "declared": self.declared,
            "verdict": "planar" if self.planar else "nonplanar-so-far",
        }


def end_is_planar(end: End, stream: ExhaustionStream, horizon: int, tree: EndTree | None = None) -> Planarity:
    tree = tree or end_tree(stream, horizon)
    if end.leaf >= len(tree.node_depth) or tree.node_depth[end.leaf] != horizon or tree.path(end.leaf) != end.path:
        raise KeyError("end not in tree")
    leaf_faces = tree.node_faces(end.leaf)
    g, ori = surface_genus_of_faces(tree.window.complex, leaf_faces)
    declared = stream.declared_defect(leaf_faces)
    planar = g == 0 and ori and declared is None
    if planar:
        return Planarity(True, "planar", None, g, ori, None)
    nonori = (not ori) or declared == "crosscap"
    first = None
    for n in range(1, horizon + 1):
        gn, on = tree.node_genus(end.path[n - 1])
        if (nonori and not on) or (not nonori and gn > 0) or (nonori and on is False):
            first = n
            break
    if first is None:
        first = horizon
    return Planarity(False, "b''" if nonori else "b'", first, g, ori, declared)


def classify_ray(stream: ExhaustionStream, ray, horizon: int, tree: EndTree | None = None) -> End:
    """End containing an escaping edge-path of faces."""
    tree = tree or end_tree(stream, horizon)
    win = tree.window
    cx = win.complex
    prev = None
    last = None
    for f in ray:
        f = int(f)
        if f < 0 or f >= cx.n_faces:
            raise NotEscaping("not escaping: ray leaves the materialised window before depth %d" % (horizon + 1))
        if prev is not None and not _adjacent(cx, prev, f):
            raise ValueError(f"ray faces {prev} and {f} do not share an edge")
        prev = f
        if win.layer[f] > horizon:
            last = f
            break
    if last is None:
        raise NotEscaping("not escaping: ray stays in F_%d" % horizon)
    leaf = int(tree.first_node[last])
    leaf = tree.ancestor_at(leaf, horizon)
    return End(leaf, tree.path(leaf), horizon)


def _adjacent(cx: SurfaceComplex, f: int, g: int) -> bool:
    return len(set(cx.faces[f].tolist()) & set(cx.faces[g].tolist())) == 2


def escaping_ray(stream: ExhaustionStream, horizon: int, target_face: int, start_face: int = 0) -> list[int]:
    """Shortest face path from ``start_face`` to ``target_face`` in F_{h+1}."""
    cx = stream.window(horizon + 1).complex
    p = cx.adjacency_pairs
    n = cx.n_faces
    g = sparse.coo_matrix((np.ones(len(p)), (p[:, 0], p[:, 1])), shape=(n, n)).tocsr()
    _, pred = shortest_path(g, directed=False, unweighted=True, indices=start_face, return_predecessors=True)
    path = [int(target_face)]
    while path[-1] != start_face:
        nxt = pred[path[-1]]
        if nxt < 0:
            raise ValueError("target not reachable")
        path.append(int(nxt))
    return path[::-1]


def embed_ends_after_deletion(stream: ExhaustionStream, K: Subcomplex, horizon: int):
    """Inject the ends of S into the ends of S - K (see residual module)."""
    from .residual import end_embedding
    return end_embedding(stream, K, horizon)
