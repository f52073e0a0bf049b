"""File formats and atomic JSON output."""
from __future__ import annotations

import hashlib
import json
import os
import tempfile

import numpy as np

from .core import Subcomplex, SurfaceComplex


class InputError(OSError):
    """Unreadable or ill-formed input file."""


def threads() -> int:
    """Worker cap from SURFACE_ENDS_THREADS (default 1)."""
    try:
        return max(1, int(os.environ.get("SURFACE_ENDS_THREADS", "1")))
    except ValueError:
        return 1


def read_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror or exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def digest(path: str) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def surface_from_dict(d, where: str = "<surface>") -> SurfaceComplex:
    if not isinstance(d, dict) or "faces" not in d:
        raise InputError(f"{where}: expected an object with 'vertices' and 'faces'")
    faces = d["faces"]
    if not isinstance(faces, list) or any(not isinstance(f, list) or len(f) != 3 for f in faces):
        raise InputError(f"{where}: 'faces' must be a list of vertex triples")
    try:
        arr = np.asarray(faces, dtype=np.int64).reshape(-1, 3)
    except (TypeError, ValueError) as exc:
        raise InputError(f"{where}: face entries must be integers") from exc
    n = d.get("vertices")
    if n is None:
        n = int(arr.max()) + 1 if len(arr) else 0
    if not isinstance(n, int) or n < 0:
        raise InputError(f"{where}: 'vertices' must be a non-negative integer")
    if len(arr) and (arr.min() < 0 or arr.max() >= n):
        raise InputError(f"{where}: vertex id out of range")
    return SurfaceComplex(n, arr)


def read_surface(path: str) -> SurfaceComplex:
    return surface_from_dict(read_json(path), path)


def read_subcomplex(path: str, cx: SurfaceComplex) -> tuple[Subcomplex, list[str]]:
    d = read_json(path)
    if not isinstance(d, dict):
        raise InputError(f"{path}: expected an object")
    K, added = Subcomplex.closure(cx, d.get("faces", []), d.get("edges", []), d.get("vertices", []))
    warnings = []
    if added["edges"] or added["vertices"]:
        warnings.append(f"closure added {added['edges']} edges and {added['vertices']} vertices to K")
    return K, warnings


def write_json_atomic(path: str, obj) -> None:
    data = dumps(obj)
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=".json")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (set, frozenset)):
        return sorted(o)
    if hasattr(o, "to_dict"):
        return o.to_dict()
    raise TypeError(f"not serialisable: {type(o).__name__}")


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, default=_default) + "\n"
