"""Classification signatures, homeomorphism decisions, models and doubles."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import (
    SurfaceComplex,
    SurfaceError,
    barycentric_subdivision,
    boundary_components,
    face_components,
    genus as genus_of,
    is_orientable,
    surface_genus_of_faces,
)
from .exhaustion import ExhaustionStream, end_is_planar, ends as stream_ends
from . import models

CLASSES = ("orientable", "nonorientable-odd", "nonorientable-even", "infinitely-nonorientable")
INFINITE = "infinite"


@dataclass(frozen=True)
class ClassificationSignature:
    orientability_class: str
    genus: object  # int or "infinite"
    boundary_circles: int
    end_data: tuple = (0, 0, 0)
    exact: bool = True
    qualifier: str | None = None
    leaf_counts: tuple = field(default=(), compare=False)

    def key(self) -> tuple:
        return (self.orientability_class, self.genus, self.boundary_circles, tuple(self.end_data))

    def __eq__(self, other):
        if not isinstance(other, ClassificationSignature):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def consistency_errors(self) -> list[str]:
        errs = []
        e, e1, e2 = self.end_data
        if self.orientability_class not in CLASSES:
            errs.append(f"unknown orientability class {self.orientability_class!r}")
        if not (0 <= e2 <= e1 <= e):
            errs.append("end counts must satisfy b'' <= b' <= b")
        inf = self.genus == INFINITE
        if not inf and (not isinstance(self.genus, (int, np.integer)) or self.genus < 0):
            errs.append("genus must be a non-negative integer or 'infinite'")
        if inf != (e1 >= 1):
            errs.append("genus is infinite iff some end is non-planar")
        if (self.orientability_class == "infinitely-nonorientable") != (e2 >= 1):
            errs.append("infinitely non-orientable iff some end is non-orientable")
        if not inf and isinstance(self.genus, (int, np.integer)):
            if self.orientability_class == "nonorientable-odd" and self.genus % 2 != 1:
                errs.append("odd type needs an odd crosscap number")
            if self.orientability_class == "nonorientable-even" and (self.genus % 2 != 0 or self.genus == 0):
                errs.append("even type needs a positive even crosscap number")
        if self.boundary_circles < 0:
            errs.append("boundary count must be non-negative")
        return errs

    @property
    def finite_type(self) -> bool:
        return self.genus != INFINITE and self.exact

    def to_dict(self) -> dict:
        d = {
            "orientability_class": self.orientability_class,
            "genus": self.genus if self.genus == INFINITE else int(self.genus),
            "boundary_circles": int(self.boundary_circles),
            "end_data": [int(x) for x in self.end_data],
            "exact": self.exact,
        }
        if self.qualifier:
            d["qualifier"] = self.qualifier
        if self.leaf_counts:
            d["leaf_counts"] = list(self.leaf_counts)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ClassificationSignature":
        g = d["genus"]
        return cls(d["orientability_class"], g if g == INFINITE else int(g), int(d.get("boundary_circles", 0)),
                   tuple(int(x) for x in d.get("end_data", (0, 0, 0))), bool(d.get("exact", True)))


def _class_of(orientable: bool, k: int) -> str:
    if orientable:
        return "orientable"
    return "nonorientable-odd" if k % 2 else "nonorientable-even"


def signature(ambient, horizon: int | None = None) -> ClassificationSignature:
    if isinstance(ambient, ExhaustionStream):
        return _stream_signature(ambient, 8 if horizon is None else horizon)
    _, n = face_components(ambient)
    if n != 1:
        raise SurfaceError(f"signature needs a connected surface ({n} components)")
    g = genus_of(ambient)
    b = len(boundary_components(ambient))
    return ClassificationSignature(_class_of(g.orientable, g.value), int(g.value), b, (0, 0, 0), True)


def _stream_signature(stream: ExhaustionStream, h: int) -> ClassificationSignature:
    res = stream_ends(stream, h)
    tree = res.tree
    win = tree.window
    _, n = face_components(win.sub(1))
    if n != 1:
        raise SurfaceError("signature needs a connected surface")
    e = len(res.ends)
    e1 = e2 = 0
    for end in res.ends:
        p = end_is_planar(end, stream, h, tree)
        if not p.planar:
            e1 += 1
            if p.kind == "b''":
                e2 += 1
    gval, ori = surface_genus_of_faces(win.complex, np.arange(win.complex.n_faces))
    amb = {(min(a, b), max(a, b)) for a, b in np.asarray(stream.ambient_boundary_edges).reshape(-1, 2).tolist()}
    nb = 0
    if amb:
        cx = win.complex
        for c in boundary_components(cx):
            if all(tuple(cx.edges[x].tolist()) in amb for x in c.edges):
                nb += 1
    if e2:
        cls = "infinitely-nonorientable"
    else:
        cls = _class_of(ori, gval)
    g = INFINITE if e1 else int(gval)
    exact = bool(res.exact) or (stream.declared_ends is not None and tuple(stream.declared_ends) == (e, e1, e2) and res.stabilized)
    return ClassificationSignature(cls, g, nb, (e, e1, e2), exact, f"at horizon {h}", tuple(res.leaf_counts))


def homeomorphic(a, b, horizon: int | None = None) -> str:
    """'yes', 'no' or 'undecided-at-horizon'."""
    sa = a if isinstance(a, ClassificationSignature) else signature(a, horizon)
    sb = b if isinstance(b, ClassificationSignature) else signature(b, horizon)
    if sa.exact and sb.exact:
        return "yes" if sa == sb else "no"
    # invariants that no deeper horizon can change
    if sa.boundary_circles != sb.boundary_circles:
        return "no"
    compact_a = sa.exact and sa.end_data[0] == 0
    compact_b = sb.exact and sb.end_data[0] == 0
    if compact_a != compact_b and (compact_a or compact_b):
        return "no"
    nonori_a = sa.orientability_class != "orientable"
    nonori_b = sb.orientability_class != "orientable"
    if (nonori_a and sb.exact and not nonori_b) or (nonori_b and sa.exact and not nonori_a):
        return "no"
    return "undecided-at-horizon"


def generate_model(sig) -> SurfaceComplex | ExhaustionStream:
    """A surface or builder stream realising a consistent signature."""
    from .builders import model_stream
    if isinstance(sig, dict):
        sig = ClassificationSignature.from_dict(sig)
    errs = sig.consistency_errors()
    if errs:
        raise ValueError("inconsistent signature: " + "; ".join(errs))
    e, e1, e2 = sig.end_data
    cls = sig.orientability_class
    if sig.genus == INFINITE:
        core_ori = cls in ("orientable", "infinitely-nonorientable")
        core_g = {"orientable": 0, "infinitely-nonorientable": 0, "nonorientable-odd": 1, "nonorientable-even": 2}[cls]
    else:
        core_ori = cls == "orientable"
        core_g = int(sig.genus)
    if e == 0:
        return models.compact_model(core_ori, core_g, sig.boundary_circles)
    lineages = ["crosscap"] * e2 + ["handle"] * (e1 - e2) + ["tube"] * (e - e1)
    return model_stream(core_ori, core_g, sig.boundary_circles, lineages)


@dataclass
class Double:
    complex: SurfaceComplex
    vertex_origin: np.ndarray  # vertex of the (possibly subdivided) input
    vertex_copy: np.ndarray    # 0, 1, or -1 for glued boundary vertices
    source: SurfaceComplex     # the input actually doubled
    subdivided: bool

    def to_dict(self) -> dict:
        return {"complex": self.complex.to_dict(), "subdivided": self.subdivided,
                "provenance": [[int(o), int(c)] for o, c in zip(self.vertex_origin, self.vertex_copy)]}


def _needs_subdivision(cx: SurfaceComplex) -> bool:
    bv = cx.boundary_vertex_mask
    e = cx.edges[~cx.boundary_edge_mask]
    if len(e) and (bv[e[:, 0]] & bv[e[:, 1]]).any():
        return True
    return bool(bv[cx.faces].all(axis=1).any())


def double(s: SurfaceComplex) -> Double:
    """Glue two copies along the boundary, the second copy mirrored."""
    sub = _needs_subdivision(s)
    cx = barycentric_subdivision(s).complex if sub else s
    n = cx.vertex_count
    bv = cx.boundary_vertex_mask
    interior = np.flatnonzero(~bv)
    second = np.arange(n, dtype=np.int64)
    second[interior] = n + np.arange(len(interior))
    f1 = second[cx.faces][:, ::-1]
    faces = np.concatenate([cx.faces, f1])
    out = SurfaceComplex(n + len(interior), faces)
    origin = np.concatenate([np.arange(n), interior])
    copy = np.concatenate([np.where(bv, -1, 0), np.ones(len(interior), np.int64)])
    return Double(out, origin, copy, cx, sub)
