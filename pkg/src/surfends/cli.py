"""Command-line front end: ``surface-ends <command> [options]``.

Every command prints one JSON report (sorted keys) with the command echo,
input digests, results and warnings.  Exit codes: 0 success, 1 domain
error, 2 I/O or parse error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import io as sio
from .core import (SurfaceError, Subcomplex, boundary_components, euler_characteristic, face_components,
                   genus as genus_of, validate_surface)
from .exhaustion import ExhaustionStream, StreamError, TRUST_NOTE, end_is_planar, ends as stream_ends, validate_exhaustion

DEFAULT_HORIZON = 8


class DomainError(Exception):
    pass


class Context:
    def __init__(self, args):
        self.args = args
        self.inputs = {}
        self.warnings = []

    def note(self, path):
        self.inputs[path] = sio.digest(path)

    def surface(self, path=None):
        path = path or self.args.surface
        cx = sio.read_surface(path)
        self.note(path)
        return cx

    def stream(self, path=None) -> ExhaustionStream:
        from .builders import stream_from_manifest
        path = path or self.args.stream
        man = sio.read_json(path)
        self.note(path)
        if not isinstance(man, dict):
            raise sio.InputError(f"{path}: manifest must be an object")
        s = stream_from_manifest(man, os.path.dirname(os.path.abspath(path)))
        self.warnings.append(TRUST_NOTE)
        return s

    def ambient(self):
        """(ambient, complex that K refers to) from --surface or --stream."""
        if self.args.surface:
            cx = self.surface()
            return cx, cx
        if getattr(self.args, "stream", None):
            s = self.stream()
            h = self.horizon
            self.warnings.append(f"at horizon {h}")
            return s, s.window(h + 1).complex
        raise DomainError("one of --surface or --stream is required")

    def k(self, cx):
        if not self.args.k:
            raise DomainError("--k is required")
        K, w = sio.read_subcomplex(self.args.k, cx)
        self.note(self.args.k)
        self.warnings += w
        return K

    @property
    def horizon(self) -> int:
        return self.args.horizon if self.args.horizon is not None else DEFAULT_HORIZON


def _surface_info(cx) -> dict:
    g = genus_of(cx)
    _, n = face_components(cx)
    return {"vertices": int(len(cx.used_vertices)), "edges": int(cx.n_edges), "faces": int(cx.n_faces),
            "euler_characteristic": int(euler_characteristic(cx)), "components": int(n),
            "boundary_cycles": [len(c) for c in boundary_components(cx)],
            "orientable": bool(g.orientable), "genus": int(g.value),
            "genus_kind": "genus" if g.orientable else "crosscap number"}


def cmd_validate(ctx: Context) -> dict:
    if ctx.args.surface:
        rep = validate_surface(ctx.surface())
        out = rep.to_dict()
    else:
        s = ctx.stream()
        h = ctx.horizon
        rep = validate_exhaustion(s, h)
        out = rep.to_dict()
        out["horizon"] = h
        ctx.warnings.append(f"at horizon {h}")
    ctx.exit_code = 0 if rep.valid else 1
    return out


def cmd_info(ctx: Context) -> dict:
    if ctx.args.surface:
        return _surface_info(ctx.surface())
    s = ctx.stream()
    h = ctx.horizon
    win = s.window(h)
    sizes = [int(np.count_nonzero(win.layer <= n)) for n in range(1, h + 1)]
    ctx.warnings.append(f"at horizon {h}")
    return {"manifest": s.manifest(), "faces_per_depth": sizes, "finite_type": bool(s.finite_type),
            "declared_ends": None if s.declared_ends is None else list(s.declared_ends)}


def cmd_ends(ctx: Context) -> dict:
    if ctx.args.surface:
        ctx.surface()
        return {"ends": [], "count": 0, "stabilized": True, "exact": True, "note": "compact surface"}
    s = ctx.stream()
    h = ctx.horizon
    res = stream_ends(s, h)
    out = res.to_dict()
    out["planarity"] = [end_is_planar(e, s, h, res.tree).to_dict() for e in res.ends]
    if not res.exact:
        ctx.warnings.append(f"at horizon {h}" + ("" if res.stabilized else "; leaf counts not stabilized"))
    return out


def cmd_residual(ctx: Context) -> dict:
    from .residual import check_end_bound, domain_ends, frontier_components, residual_domains
    amb, cx = ctx.ambient()
    K = ctx.k(cx)
    h = ctx.horizon
    doms = residual_domains(amb, K, h)
    de = domain_ends(amb, K, h)
    out = []
    for d, e in zip(doms, de):
        item = d.to_dict()
        item["frontier_components"] = frontier_components(amb, d.region, K, h).to_dict()
        item["ends"] = [x.to_dict() for x in e["ends"]]
        if isinstance(amb, ExhaustionStream):
            item["bound_check"] = None
        else:
            item["bound_check"] = check_end_bound(amb, K, d.region).to_dict()
        out.append(item)
    return {"domains": out, "n_domains": len(out), "n_bounded": sum(d.bounded for d in doms),
            "K_components": K.n_components()}


def _signature_of(ctx, path):
    from .classify import signature
    d = sio.read_json(path)
    if isinstance(d, dict) and "kind" in d:
        s = ctx.stream(path)
        ctx.warnings.append(f"at horizon {ctx.horizon}")
        return signature(s, ctx.horizon)
    ctx.note(path)
    return signature(sio.surface_from_dict(d, path))


def cmd_classify(ctx: Context) -> dict:
    from .classify import signature
    if ctx.args.surface:
        return signature(ctx.surface()).to_dict()
    sig = signature(ctx.stream(), ctx.horizon)
    if not sig.exact:
        ctx.warnings.append(f"at horizon {ctx.horizon}")
    return sig.to_dict()


def cmd_compare(ctx: Context) -> dict:
    from .classify import homeomorphic
    if not (ctx.args.a and ctx.args.b):
        raise DomainError("--a and --b are required")
    sa = _signature_of(ctx, ctx.args.a)
    sb = _signature_of(ctx, ctx.args.b)
    return {"a": sa.to_dict(), "b": sb.to_dict(), "homeomorphic": homeomorphic(sa, sb)}


def cmd_generate(ctx: Context) -> dict:
    from .classify import ClassificationSignature, generate_model
    if not ctx.args.signature:
        raise DomainError("--signature is required")
    d = sio.read_json(ctx.args.signature)
    ctx.note(ctx.args.signature)
    try:
        sig = ClassificationSignature.from_dict(d)
    except (KeyError, TypeError, ValueError) as exc:
        raise sio.InputError(f"{ctx.args.signature}: bad signature object ({exc})") from exc
    model = generate_model(sig)
    payload = model.manifest() if isinstance(model, ExhaustionStream) else model.to_dict()
    kind = "stream" if isinstance(model, ExhaustionStream) else "surface"
    if ctx.args.out:
        sio.write_json_atomic(ctx.args.out, payload)
    return {"kind": kind, "out": ctx.args.out, "model": None if ctx.args.out else payload}


def cmd_double(ctx: Context) -> dict:
    from .classify import double
    cx = ctx.surface()
    dbl = double(cx)
    if ctx.args.out:
        sio.write_json_atomic(ctx.args.out, dbl.complex.to_dict())
    info = _surface_info(dbl.complex)
    return {"out": ctx.args.out, "subdivided": dbl.subdivided, "info": info,
            "provenance": [[int(o), int(c)] for o, c in zip(dbl.vertex_origin, dbl.vertex_copy)]}


def cmd_endperm(ctx: Context) -> dict:
    from .dynamics import SimplicialAutomorphism, verify_p51
    if not ctx.args.map:
        raise DomainError("--map is required")
    mp = sio.read_json(ctx.args.map)
    ctx.note(ctx.args.map)
    if not isinstance(mp, dict):
        raise sio.InputError(f"{ctx.args.map}: expected an object")
    h = ctx.horizon
    if ctx.args.surface:
        cx = ctx.surface()
        dom = mp.get("domain", "all")
        if isinstance(dom, dict):
            dom = dom.get("faces", [])
        if "vertex_map" not in mp:
            raise sio.InputError(f"{ctx.args.map}: missing 'vertex_map'")
        f = SimplicialAutomorphism(cx, mp["vertex_map"], dom)
    else:
        s = ctx.stream()
        if "declared" not in mp:
            raise DomainError("stream automorphisms must name a builder-declared map ('declared')")
        f = SimplicialAutomorphism.from_stream(s, mp["declared"], h)
        cx = f.complex
        ctx.warnings.append(f"at horizon {h}")
    K = ctx.k(cx)
    rep = verify_p51(f, K, h)
    return rep


def cmd_corpus(ctx: Context) -> dict:
    from .corpus import corpus_files
    if not ctx.args.out:
        raise DomainError("--out directory is required")
    seed = 1 if ctx.args.seed is None else ctx.args.seed
    files = corpus_files(seed)
    root = ctx.args.out

    def put(item):
        rel, obj = item
        sio.write_json_atomic(os.path.join(root, rel), obj)

    with ThreadPoolExecutor(max_workers=sio.threads()) as pool:
        list(pool.map(put, sorted(files.items())))
    return {"out": root, "seed": seed, "files": sorted(files), **files["manifest.json"]["counts"]}


COMMANDS = {
    "validate": cmd_validate, "info": cmd_info, "ends": cmd_ends, "residual": cmd_residual,
    "classify": cmd_classify, "compare": cmd_compare, "generate": cmd_generate, "double": cmd_double,
    "end-perm": cmd_endperm, "corpus": cmd_corpus,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="surface-ends", description="Ends, residual domains and classification of triangulated surfaces.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--surface")
        sp.add_argument("--stream")
        sp.add_argument("--k")
        sp.add_argument("--map")
        sp.add_argument("--horizon", type=int)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--out")
        sp.add_argument("--format", choices=("json", "table"), default="json")
        if name == "compare":
            sp.add_argument("--a")
            sp.add_argument("--b")
        if name == "generate":
            sp.add_argument("--signature")
    return p


def _table(obj, indent=0) -> str:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k in sorted(obj):
            v = obj[k]
            if isinstance(v, (dict, list)) and v and any(isinstance(x, (dict, list)) for x in (v.values() if isinstance(v, dict) else v)):
                lines.append(f"{pad}{k}:")
                lines.append(_table(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {json.dumps(v, sort_keys=True) if isinstance(v, (dict, list)) else v}")
    elif isinstance(obj, list):
        for i, v in enumerate(obj):
            lines.append(f"{pad}[{i}]")
            lines.append(_table(v, indent + 1))
    else:
        lines.append(f"{pad}{obj}")
    return "\n".join(lines)


def render(report: dict, fmt: str) -> str:
    if fmt == "table":
        return _table(json.loads(sio.dumps(report))) + "\n"
    return sio.dumps(report)


def run(argv=None) -> tuple[int, dict]:
    args = build_parser().parse_args(argv)
    if args.horizon is not None and args.horizon < 1:
        return 1, {"command": args.command, "error": "horizon must be >= 1"}
    ctx = Context(args)
    ctx.exit_code = 0
    echo = {"name": args.command, "argv": list(argv) if argv is not None else sys.argv[1:]}
    try:
        results = COMMANDS[args.command](ctx)
    except (sio.InputError, OSError) as exc:
        return 2, {"command": echo, "error": {"kind": "io", "message": str(exc)}}
    except (DomainError, SurfaceError, StreamError, ValueError) as exc:
        return 1, {"command": echo, "error": {"kind": "domain", "message": str(exc)}}
    report = {"command": echo, "inputs": ctx.inputs, "results": results,
              "warnings": sorted(set(ctx.warnings))}
    return ctx.exit_code, report


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    code, report = run(argv)
    fmt = "json"
    if "--format" in argv:
        i = argv.index("--format")
        fmt = argv[i + 1] if i + 1 < len(argv) else "json"
    out = sys.stdout if code == 0 or "results" in report else sys.stderr
    out.write(render(report, fmt))
    return code


if __name__ == "__main__":
    sys.exit(main())
