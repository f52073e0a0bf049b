"""Concrete exhaustion streams.

Grid streams (plane, cylinder) are vectorised and scale to millions of
faces.  Block streams glue small surfaces along triangular ports: each
open port of F_n receives one block in F_{n+1}, and the block's own ports
inherit a lineage that decides what grows there next.
"""
from __future__ import annotations

import json
import os

import numpy as np

from .core import SurfaceComplex, compact
from .exhaustion import ExhaustionStream, StreamError
from . import models


# ---------------------------------------------------------------------------
# grids

class _GridStream(ExhaustionStream):
    finite_type = True
    stabilization_depth = 1

    def _squares(self, depth):
        raise NotImplementedError

    def _vertex_coords(self, depth):
        raise NotImplementedError

    def _generate(self, depth):
        vx, vy, vring = self._vertex_coords(depth)
        vorder = np.lexsort((vx, vy, vring)) if self._vertex_key == "yx" else np.lexsort((vy, vx, vring))
        vid = np.empty(len(vorder), dtype=np.int64)
        vid[vorder] = np.arange(len(vorder))
        sx, sy, slayer = self._squares(depth)
        a = vid[self._vindex(sx, sy, depth)]
        b = vid[self._vindex(sx + 1, sy, depth)]
        c = vid[self._vindex(sx + 1, sy + 1, depth)]
        d = vid[self._vindex(sx, sy + 1, depth)]
        ns = len(sx)
        faces = np.empty((2 * ns, 3), dtype=np.int64)
        faces[0::2] = np.stack([a, b, c], 1)
        faces[1::2] = np.stack([a, c, d], 1)
        layer = np.repeat(slayer, 2)
        fx = np.repeat(sx, 2)
        fy = np.repeat(sy, 2)
        ft = np.tile([0, 1], ns)
        forder = np.lexsort((ft, fy, fx, layer)) if self._vertex_key == "xy" else np.lexsort((ft, fx, fy, layer))
        self._face_sq = np.stack([fx[forder], fy[forder], ft[forder]], 1)
        self._vid_sorted = (vx[vorder], vy[vorder])
        self._gen_depth = depth
        return len(vorder), faces[forder], layer[forder]

    # coordinate helpers --------------------------------------------------
    def _ensure(self, depth):
        self.window(depth)
        if getattr(self, "_gen_depth", 0) < depth:
            self._full = None
            self._windows.clear()
            self.window(depth)

    def face_square(self, fid):
        """(x, y, t) of a face: lower-left corner and which triangle."""
        return tuple(int(v) for v in self._face_sq[fid])

    def vertex_xy(self, vid):
        return int(self._vid_sorted[0][vid]), int(self._vid_sorted[1][vid])

    def faces_of_squares(self, squares, depth=None) -> np.ndarray:
        sq = np.asarray(squares, dtype=np.int64).reshape(-1, 2)
        need = depth or int(self._square_layer(sq[:, 0], sq[:, 1]).max())
        self._ensure(max(need, 1))
        key = self._sq_key(self._face_sq[:, 0], self._face_sq[:, 1])
        order = np.argsort(key, kind="stable")
        want = self._sq_key(sq[:, 0], sq[:, 1])
        pos = np.searchsorted(key[order], want)
        if (pos >= len(key)).any() or (key[order][np.minimum(pos, len(key) - 1)] != want).any():
            raise KeyError("square outside generated window")
        return np.sort(np.concatenate([order[pos], order[pos + 1]]))

    def vertex_at(self, x, y) -> int:
        vx, vy = self._vid_sorted
        hit = np.flatnonzero((vx == self._norm_x(x)) & (vy == y))
        if not len(hit):
            raise KeyError((x, y))
        return int(hit[0])

    def _norm_x(self, x):
        return x

    def _sq_key(self, x, y):
        return (np.asarray(x) + (1 << 20)) * (1 << 21) + np.asarray(y) + (1 << 20)

    def map_vertices(self, fn, depth: int) -> np.ndarray:
        """Vertex map of the window F_depth induced by a coordinate map."""
        self._ensure(depth)
        win = self.window(depth)
        vx, vy = self._vid_sorted
        n = win.complex.vertex_count
        x, y = fn(vx[:n], vy[:n])
        x = self._norm_x(x)
        key = self._sq_key(vx[:n], vy[:n])
        order = np.argsort(key)
        tgt = np.searchsorted(key[order], self._sq_key(x, y))
        return order[tgt]


class PlaneGrid(_GridStream):
    """Plane, F_n = squares in [-n, n]^2 (8 n^2 faces)."""

    name = "plane-grid"
    declared_ends = (1, 0, 0)
    _vertex_key = "xy"

    def __init__(self):
        super().__init__()

    def _vertex_coords(self, depth):
        c = np.arange(-depth, depth + 1)
        X, Y = np.meshgrid(c, c, indexing="ij")
        x, y = X.ravel(), Y.ravel()
        return x, y, np.maximum(np.abs(x), np.abs(y))

    def _vindex(self, x, y, depth):
        return (x + depth) * (2 * depth + 1) + (y + depth)

    @staticmethod
    def _square_layer(sx, sy):
        return np.maximum(np.maximum(np.abs(sx), np.abs(sx + 1)), np.maximum(np.abs(sy), np.abs(sy + 1)))

    def _squares(self, depth):
        c = np.arange(-depth, depth)
        X, Y = np.meshgrid(c, c, indexing="ij")
        sx, sy = X.ravel(), Y.ravel()
        return sx, sy, self._square_layer(sx, sy)

    def block(self, x0, y0, w, h) -> np.ndarray:
        """Faces of the w x h block of squares with lower-left corner (x0, y0)."""
        sq = [(x, y) for x in range(x0, x0 + w) for y in range(y0, y0 + h)]
        return self.faces_of_squares(sq)

    def centered_block(self, side: int) -> np.ndarray:
        lo = -(side // 2)
        return self.block(lo, lo, side, side)

    def automorphisms(self) -> dict:
        return {
            "point-reflection": lambda x, y: (-x, -y),
            "diagonal-reflection": lambda x, y: (y, x),
            "antidiagonal-reflection": lambda x, y: (-y, -x),
        }


class Cylinder(_GridStream):
    """(Z/w) x Z with rows |y| <= n in F_n (4 n w faces)."""

    name = "cylinder"
    declared_ends = (2, 0, 0)
    _vertex_key = "yx"

    def __init__(self, width: int = 4):
        if width < 3:
            raise ValueError("cylinder width must be >= 3")
        super().__init__(width=width)
        self.width = width

    def _norm_x(self, x):
        return np.mod(x, self.width)

    def _vertex_coords(self, depth):
        X, Y = np.meshgrid(np.arange(self.width), np.arange(-depth, depth + 1), indexing="ij")
        x, y = X.ravel(), Y.ravel()
        return x, y, np.abs(y)

    def _vindex(self, x, y, depth):
        return np.mod(x, self.width) * (2 * depth + 1) + (y + depth)

    @staticmethod
    def _square_layer(sx, sy):
        return np.maximum(np.abs(sy), np.abs(sy + 1))

    def _squares(self, depth):
        X, Y = np.meshgrid(np.arange(self.width), np.arange(-depth, depth), indexing="ij")
        sx, sy = X.ravel(), Y.ravel()
        return sx, sy, self._square_layer(sx, sy)

    def row(self, y: int) -> np.ndarray:
        return self.faces_of_squares([(x, y) for x in range(self.width)])

    def meridian_edges(self, y: int = 0) -> list:
        return [(self.vertex_at(x, y), self.vertex_at(x + 1, y)) for x in range(self.width)]

    def automorphisms(self) -> dict:
        w = self.width
        out = {f"rotation-{k}": (lambda k: lambda x, y: (np.mod(x + k, w), y))(k) for k in range(1, w)}
        out["point-reflection"] = lambda x, y: (np.mod(-x, w), -y)
        return out


# ---------------------------------------------------------------------------
# block streams

def port_orientation(cx: SurfaceComplex, tri) -> tuple:
    """Orient a triangular hole so a face filling it would be coherent."""
    u, v, w = (int(t) for t in tri)
    for f in cx.faces.tolist():
        if u in f and v in f:
            i = f.index(u)
            if f[(i + 1) % 3] == v:
                return (v, u, w)
            return (u, v, w)
    raise ValueError("hole edge not found")


def cap_hole(cx: SurfaceComplex, hole, piece: SurfaceComplex) -> SurfaceComplex:
    """Glue ``piece`` minus its first face into a triangular hole."""
    tri = port_orientation(cx, hole)
    filled = SurfaceComplex(cx.vertex_count, np.vstack([cx.faces, [tri]]))
    return models.connected_sum(filled, piece, fa=filled.n_faces - 1, fb=0)


class Block:
    def __init__(self, cx: SurfaceComplex, inport, outports, kind: str):
        self.complex = cx
        self.inport = port_orientation(cx, inport)
        self.outports = [port_orientation(cx, p) for p in outports]
        self.kind = kind


def _holed(k):
    return models.sphere_with_holes(k)


def make_block(kind: str) -> Block:
    if kind == "tube":
        return Block(models.annulus(3), (0, 1, 2), [(3, 4, 5)], "tube")
    if kind == "pants":
        cx, holes = _holed(3)
        return Block(cx, holes[0], holes[1:], "pants")
    if kind in ("handle", "crosscap"):
        cx, holes = _holed(3)
        cx = cap_hole(cx, holes[2], models.torus7() if kind == "handle" else models.rp2_6())
        return Block(cx, holes[0], [holes[1]], kind)
    raise ValueError(f"unknown block kind {kind!r}")


# lineage -> (block kind, lineages of the block's out ports)
LINEAGES = {
    "tube": ("tube", ["tube"]),
    "handle": ("handle", ["handle"]),
    "crosscap": ("crosscap", ["crosscap"]),
    "tree": ("pants", ["tree", "tree"]),
    "flute": ("pants", ["flute", "tube"]),
}


class BlockStream(ExhaustionStream):
    """Core complex plus blocks glued at ports, one generation per depth."""

    name = "blocks"

    def __init__(self, core: SurfaceComplex, ports, ambient_holes=(), **params):
        super().__init__(**params)
        self.core = core
        self.core_ports = [(port_orientation(core, p), lin) for p, lin in ports]
        for _, lin in self.core_ports:
            if lin not in LINEAGES:
                raise ValueError(f"unknown lineage {lin!r}")
        self.ambient_holes = [tuple(int(v) for v in h) for h in ambient_holes]
        self._blocks = {k: make_block(k) for k in ("tube", "pants", "handle", "crosscap")}
        self._reset()

    def _reset(self):
        self._faces = [self.core.faces]
        self._layers = [np.ones(self.core.n_faces, dtype=np.int64)]
        self._kinds = [np.full(self.core.n_faces, "core", dtype=object)]
        self._nv = self.core.vertex_count
        self._open = list(self.core_ports)
        self._built = 1

    def _grow(self):
        n = self._built + 1
        nxt = []
        for port, lin in self._open:
            bkind, child_lins = LINEAGES[lin]
            blk = self._blocks[bkind]
            bc = blk.complex
            vmap = np.arange(bc.vertex_count, dtype=np.int64) + self._nv
            i0, i1, i2 = blk.inport
            vmap[i0], vmap[i1], vmap[i2] = port[0], port[2], port[1]
            fresh = np.ones(bc.vertex_count, bool)
            fresh[[i0, i1, i2]] = False
            # compact the fresh vertex ids
            vmap[fresh] = self._nv + np.arange(int(fresh.sum()))
            self._nv += int(fresh.sum())
            self._faces.append(vmap[bc.faces])
            self._layers.append(np.full(bc.n_faces, n, dtype=np.int64))
            self._kinds.append(np.full(bc.n_faces, bkind, dtype=object))
            for op, cl in zip(blk.outports, child_lins):
                nxt.append((tuple(int(vmap[v]) for v in op), cl))
        self._open = nxt
        self._built = n

    def _generate(self, depth):
        while self._built < depth:
            self._grow()
        faces = np.concatenate(self._faces)
        layer = np.concatenate(self._layers)
        k = int(np.searchsorted(layer, depth, side="right"))
        self._kind_arr = np.concatenate(self._kinds)
        return self._nv, faces[:k], layer[:k]

    def face_kinds(self, depth) -> np.ndarray:
        self.window(depth)
        return self._kind_arr[: self.window(depth).complex.n_faces]

    @property
    def ambient_boundary_edges(self) -> np.ndarray:
        out = []
        for h in self.ambient_holes:
            for a, b in ((h[0], h[1]), (h[1], h[2]), (h[2], h[0])):
                out.append((min(a, b), max(a, b)))
        return np.asarray(out, dtype=np.int64).reshape(-1, 2)

    def declared_defect(self, face_ids) -> str | None:
        face_ids = np.asarray(face_ids, dtype=np.int64)
        if not len(face_ids):
            return None
        kinds = set(self._kind_arr[face_ids].tolist())
        if "crosscap" in kinds:
            return "crosscap"
        if "handle" in kinds:
            return "handle"
        return None

    def manifest(self) -> dict:
        return {"kind": "builder", "name": self.name, "params": dict(self.params)}


def _disk_core():
    cx, holes = models.sphere_with_holes(1)
    return cx, holes


def flute() -> BlockStream:
    cx, holes = _disk_core()
    s = BlockStream(cx, [(holes[0], "flute")])
    s.name = "flute"
    return s


def jacobs_ladder() -> BlockStream:
    cx, holes = models.sphere_with_holes(2)
    s = BlockStream(cx, [(holes[0], "handle"), (holes[1], "handle")])
    s.name = "jacobs-ladder"
    s.declared_ends = (2, 2, 0)
    return s


def crosscap_strip() -> BlockStream:
    cx, holes = _disk_core()
    s = BlockStream(cx, [(holes[0], "crosscap")])
    s.name = "crosscap-strip"
    s.declared_ends = (1, 1, 1)
    return s


def binary_tree() -> BlockStream:
    cx, holes = models.sphere_with_holes(2)
    s = BlockStream(cx, [(holes[0], "tree"), (holes[1], "tree")])
    s.name = "binary-tree"
    return s


def model_stream(orientable: bool = True, genus: int = 0, boundary: int = 0,
                 lineages=("tube",), name: str | None = None) -> BlockStream:
    """Compact model with ``boundary`` ambient holes plus ports of given lineages."""
    lineages = list(lineages)
    if not lineages:
        raise ValueError("a stream needs at least one port")
    base = models.compact_model(orientable, genus, 0)
    cx, holes = models.puncture(base, boundary + len(lineages))
    ports = list(zip(holes[boundary:], lineages))
    s = BlockStream(cx, ports, ambient_holes=holes[:boundary], orientable=orientable,
                    genus=genus, boundary=boundary, lineages=lineages)
    s.name = name or "model"
    e = len(lineages)
    e1 = sum(l in ("handle", "crosscap") for l in lineages)
    e2 = sum(l == "crosscap" for l in lineages)
    if all(l in ("tube", "handle", "crosscap") for l in lineages):
        s.declared_ends = (e, e1, e2)
    if all(l == "tube" for l in lineages):
        s.finite_type = True
        s.stabilization_depth = 1
    return s


def finite_type(genus: int = 0, boundary: int = 0, ends: int = 1, orientable: bool = True) -> BlockStream:
    s = model_stream(orientable, genus, boundary, ["tube"] * ends, name="finite-type")
    return s


# ---------------------------------------------------------------------------
# chunks and manifests

class ChunkStream(ExhaustionStream):
    """Stream read from per-depth surface files plus inclusion maps.

    Inclusion file n maps vertex ids of F_n to vertex ids of F_{n+1}
    (``{"vertex_map": [...]}``).  Faces of F_n must map onto faces of F_{n+1}.
    """

    name = "chunks"

    def __init__(self, files, inclusions, base_dir="."):
        super().__init__(files=list(files), inclusions=list(inclusions))
        self.files = [os.path.join(base_dir, f) for f in files]
        self.inclusions = [os.path.join(base_dir, f) for f in inclusions]
        if len(self.inclusions) < len(self.files) - 1:
            raise StreamError("need one inclusion per consecutive pair of chunks")
        self.max_depth = len(self.files)
        self._glob = None

    def _load(self):
        from .io import read_surface
        faces_out, layer_out = [], []
        cur = read_surface(self.files[0])
        to_global = np.arange(cur.vertex_count, dtype=np.int64)
        nv = cur.vertex_count
        faces_out.append(cur.faces)
        layer_out.append(np.ones(cur.n_faces, dtype=np.int64))
        seen = {tuple(sorted(t)) for t in cur.faces.tolist()}
        for n in range(1, len(self.files)):
            try:
                nxt = read_surface(self.files[n])
                with open(self.inclusions[n - 1]) as fh:
                    vmap = np.asarray(json.load(fh)["vertex_map"], dtype=np.int64)
            except Exception as exc:
                raise StreamError(f"producer failure at depth {n + 1}: {exc}") from exc
            if len(vmap) != cur.vertex_count or len(np.unique(vmap)) != len(vmap):
                raise StreamError(f"producer failure at depth {n + 1}: inclusion map not injective")
            new_global = np.full(nxt.vertex_count, -1, dtype=np.int64)
            new_global[vmap] = to_global
            fresh = new_global < 0
            new_global[fresh] = nv + np.arange(int(fresh.sum()))
            nv += int(fresh.sum())
            g = new_global[nxt.faces]
            keys = [tuple(sorted(t)) for t in g.tolist()]
            if not seen.issubset(keys):
                raise StreamError(f"producer failure at depth {n + 1}: faces of F_{n} missing from F_{n + 1}")
            new = np.array([k not in seen for k in keys], dtype=bool)
            faces_out.append(g[new])
            layer_out.append(np.full(int(new.sum()), n + 1, dtype=np.int64))
            seen.update(k for k, m in zip(keys, new) if m)
            cur, to_global = nxt, new_global
        self._glob = (nv, np.concatenate(faces_out), np.concatenate(layer_out))

    def _generate(self, depth):
        if self._glob is None:
            self._load()
        nv, faces, layer = self._glob
        k = int(np.searchsorted(layer, depth, side="right"))
        return nv, faces[:k], layer[:k]

    def manifest(self) -> dict:
        return {"kind": "chunks", "files": self.params["files"], "inclusions": self.params["inclusions"]}


BUILDERS = {
    "plane-grid": lambda **p: PlaneGrid(),
    "cylinder": lambda width=4: Cylinder(width),
    "flute": lambda: flute(),
    "jacobs-ladder": lambda: jacobs_ladder(),
    "crosscap-strip": lambda: crosscap_strip(),
    "binary-tree": lambda: binary_tree(),
    "finite-type": lambda genus=0, boundary=0, ends=1, orientable=True: finite_type(genus, boundary, ends, orientable),
    "model": lambda orientable=True, genus=0, boundary=0, lineages=("tube",): model_stream(orientable, genus, boundary, lineages),
}


def stream_from_manifest(manifest: dict, base_dir: str = ".") -> ExhaustionStream:
    kind = manifest.get("kind")
    if kind == "builder":
        name = manifest.get("name")
        if name not in BUILDERS:
            raise ValueError(f"unknown builder {name!r}; known: {sorted(BUILDERS)}")
        s = BUILDERS[name](**manifest.get("params", {}))
        if name == "plane-grid":
            s.params = {}
        return s
    if kind == "chunks":
        return ChunkStream(manifest["files"], manifest.get("inclusions", []), base_dir)
    raise ValueError(f"unknown stream kind {kind!r}")
