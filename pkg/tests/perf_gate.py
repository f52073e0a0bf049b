"""Residual domains plus ends on a large plane window; prints one JSON line.

usage: python3 perf_gate.py HORIZON
"""
import json
import resource
import sys
import time

from surfends.builders import PlaneGrid
from surfends.core import Subcomplex
from surfends.exhaustion import ends
from surfends.residual import domain_ends, residual_domains


def run(h: int) -> dict:
    t0 = time.perf_counter()
    s = PlaneGrid()
    win = s.window(h + 1)
    K = Subcomplex.from_faces(win.complex, s.block(-11, -11, 22, 23))
    doms = residual_domains(s, K, h)
    res = ends(s, h)
    de = domain_ends(s, K, h)
    dt = time.perf_counter() - t0
    rss = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss * 1024
    return {"horizon": h, "faces": int(win.complex.n_faces), "K_faces": len(K.faces), "domains": len(doms),
            "stream_ends": len(res.ends), "relatively_compact": sum(len(x["ends"]) for x in de),
            "seconds": dt, "peak_bytes": rss}


if __name__ == "__main__":
    print(json.dumps(run(int(sys.argv[1]))))
