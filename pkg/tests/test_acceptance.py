"""Acceptance suite: one printed PASS/FAIL line per criterion.

Run with ``pytest -v tests/test_acceptance.py -s`` or as a script.  All
checks are exact integer/set comparisons; the only tolerances are the
runtime and memory limits, pinned below.
"""
import json
import os
import subprocess
import sys
import time
from collections import defaultdict

import numpy as np
import pytest

from surfends import models
from surfends.builders import model_stream
from surfends.classify import CLASSES, INFINITE, ClassificationSignature, double, generate_model, homeomorphic, signature
from surfends.core import Subcomplex, barycentric_subdivision, boundary_components, euler_characteristic, relabel
from surfends.corpus import automorphism_cases, bound_cases, compact_corpus, stream_cases
from surfends.dynamics import induced_end_map, verify_p51
from surfends.exhaustion import Subsampled, end_tree
from surfends.residual import (
    CanonicalExhaustion,
    c18_decide,
    check_end_bound,
    domain_ends,
    end_embedding,
    frontier_components,
    region_frontier,
    residual_domains,
    union_of_impressions,
    verify_canonical,
)

SEED = 1
N_BOUND = 200          # criterion 1 corpus size
N_BOUNDARY = 50        # criterion 2 corpus size
LIMIT_C1 = 60.0        # seconds
LIMIT_C2 = 30.0
LIMIT_C6 = 60.0
PERF_SECONDS = 10.0
PERF_BYTES = 2 * 1024 ** 3
PERF_RATIO = 2.5
PERF_HORIZONS = (249, 352)  # 5.0e5 and 1.0e6 faces in F_{h+1}
STREAM_DEPTHS = 6            # horizon of G_n; every depth 1..6 is checked
N_TRIPLES = 1000
N_COMPOSE = 20

RESULTS = {}


def report(n, ok, detail):
    line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[n] = line
    print(line, flush=True)
    return ok


# -- shared corpora (built once) ---------------------------------------------

_cache = {}


def corpus(name):
    if name not in _cache:
        if name == "bound":
            _cache[name] = bound_cases(SEED, N_BOUND)
        elif name == "boundary":
            _cache[name] = bound_cases(SEED, N_BOUNDARY, touch_boundary=True)
        elif name == "streams":
            _cache[name] = stream_cases(SEED)
        elif name == "auto":
            _cache[name] = automorphism_cases()
    return _cache[name]


def tight_sphere_case():
    # two disjoint link cycles on the icosahedron bound a middle annulus
    cx = models.icosahedron()
    edges = []
    for v in (0, 3):
        for t in cx.faces[(cx.faces == v).any(axis=1)].tolist():
            a, b = (x for x in t if x != v)
            edges.append((min(a, b), max(a, b)))
    return cx, Subcomplex.from_edges(cx, edges)


# -- criteria ------------------------------------------------------------------

def criterion_1():
    t = time.perf_counter()
    cases = corpus("bound")
    checked = violations = tight = 0
    gmax = mmax = 0
    for c in cases:
        cx, K = c["surface"], c["K"]
        for d in residual_domains(cx, K):
            b = check_end_bound(cx, K, d)
            checked += 1
            violations += not (b.count <= b.bound == K.n_components() * (b.g + 1))
            tight += b.tight
            gmax, mmax = max(gmax, b.g), max(mmax, b.m)
    cx, K = tight_sphere_case()
    mid = max(residual_domains(cx, K), key=lambda d: len(d.faces))
    b = check_end_bound(cx, K, mid)
    annulus_tight = (b.count, b.bound) == (2, 2)
    dt = time.perf_counter() - t
    ok = len(cases) >= 200 and violations == 0 and tight >= 1 and annulus_tight and dt <= LIMIT_C1 and gmax <= 3 and mmax <= 4
    return report(1, ok, f"{len(cases)} cases, {checked} domains, {violations} violations of count <= m(g+1), "
                         f"{tight} tight (annulus 2 <= 2: {annulus_tight}), {dt:.1f}s <= {LIMIT_C1:.0f}s")


def criterion_2():
    t = time.perf_counter()
    cases = corpus("boundary")
    checked = violations = 0
    for c in cases:
        cx, K = c["surface"], c["K"]
        for d in residual_domains(cx, K):
            b = check_end_bound(cx, K, d)
            checked += 1
            violations += not (b.augmented and b.n >= 1 and b.count <= b.bound == (b.m + b.n) * (b.g + 1))
    d = models.grid_disk(4, 4)
    v = int(np.flatnonzero(d.boundary_vertex_mask)[0])
    Kd = Subcomplex.from_faces(d, np.flatnonzero((d.faces == v).any(axis=1)))
    bd = check_end_bound(d, Kd, residual_domains(d, Kd)[0])
    disk_ok = (bd.m, bd.n, bd.g, bd.bound) == (1, 1, 0, 2) and bd.ok
    dt = time.perf_counter() - t
    ok = len(cases) >= 50 and violations == 0 and disk_ok and dt <= LIMIT_C2
    return report(2, ok, f"{len(cases)} cases touching the boundary, {checked} domains, {violations} violations of "
                         f"count <= (m+n)(g+1) on S*, disk example bound 2: {disk_ok}, {dt:.1f}s <= {LIMIT_C2:.0f}s")


def _frontier_checks(amb, K, h=None):
    bad = 0
    n = 0
    for x in domain_ends(amb, K, h):
        d = x["domain"]
        n += 1
        fr = frontier_components(amb, d, K, h)
        pieces = union_of_impressions(x["ends"]).components()
        if len(fr) != len(pieces) or len(fr) > K.n_components() and K.n_components():
            bad += 1
        if sorted(fr.end_to_piece) != list(range(len(x["ends"]))):
            bad += 1
        if not c18_decide(amb, d, h).is_residual_of_finite_K:
            bad += 1
    return n, bad


def criterion_3():
    n = bad = 0
    for c in corpus("bound"):
        a, b = _frontier_checks(c["surface"], c["K"])
        n, bad = n + a, bad + b
    for c in corpus("streams"):
        a, b = _frontier_checks(c["stream"], c["K"], 10)
        n, bad = n + a, bad + b
    # a region whose frontier is not compact is rejected
    from surfends.builders import PlaneGrid
    from surfends.core import Region
    s = PlaneGrid()
    upper = [f for f in range(s.window(9).complex.n_faces) if s.face_square(f)[1] >= 0]
    neg = not c18_decide(s, Region(upper), 8).is_residual_of_finite_K
    ok = bad == 0 and n > 0 and neg
    return report(3, ok, f"{n} domains: frontier pieces = impression pieces and U recovered from fr U; "
                         f"{bad} failures; half-plane rejected: {neg}")


def criterion_4():
    n = bad = 0
    depths = 0
    notes = []
    for c in corpus("streams"):
        s, K = c["stream"], c["K"]
        H = STREAM_DEPTHS + 6
        doms = residual_domains(s, K, H)
        for d in doms:
            canon = CanonicalExhaustion(s, K, d, H, doms)
            v = verify_canonical(canon, STREAM_DEPTHS)
            n += 1
            depths += v["depths"]
            # (iv) U_plus branches match the stream ends landing in U
            hh = canon.n0 + v["depths"]
            emb = end_embedding(s, K, hh)
            landed = sum(1 for a in emb.ends_after if a["kind"] == "stream" and a["domain"] == d.index)
            good = (v["ok"] and v["claims"]["U_minus_connected"] and v["G_valid"]
                    and all(x["ok"] for x in v["l16"]) and emb.injective
                    and landed == v["split"]["U_plus_ends"])
            if not good:
                bad += 1
                notes.append(c["name"])
    ok = bad == 0 and n > 0
    return report(4, ok, f"{n} stream domains, {depths} depths: U- connected, G_n valid and nested, "
                         f"L16 matches recount, b(U) split; {bad} failures {notes[:3]}")


def _p17_p12(amb, K, h=None):
    n = bad = 0
    for x in domain_ends(amb, K, h):
        d = x["domain"]
        if union_of_impressions(x["ends"]) != region_frontier(amb, d, h):
            bad += 1
        canon = x["canon"]
        for i in range(canon.n_collars):
            n += 1
            p = canon.p12(i)
            if not (p["closed"] and p["interface_cycles"] == 1 and p["orientable"] and p["genus"] == 0):
                bad += 1
    return n, bad


def criterion_5():
    n = bad = 0
    for c in corpus("bound"):
        a, b = _p17_p12(c["surface"], c["K"])
        n, bad = n + a, bad + b
    for c in corpus("streams"):
        a, b = _p17_p12(c["stream"], c["K"], 10)
        n, bad = n + a, bad + b
    ok = bad == 0 and n > 0
    return report(5, ok, f"{n} relatively compact ends: union of impressions = fr U cell-for-cell, "
                         f"deep node genus 0 / orientable / one cycle; {bad} failures")


def _grid():
    out = []
    for cls in CLASSES:
        for g in list(range(5)) + [INFINITE]:
            for b in range(4):
                for e in range(4):
                    for e1 in range(e + 1):
                        for e2 in range(e1 + 1):
                            s = ClassificationSignature(cls, g, b, (e, e1, e2))
                            if not s.consistency_errors():
                                out.append(s)
    return out


def criterion_6():
    t = time.perf_counter()
    grid = _grid()
    rt_bad = 0
    pool = []
    for s in grid:
        m = generate_model(s)
        got = signature(m, 6)
        if got != s or not got.exact:
            rt_bad += 1
        pool.append((s.key(), got))
        # a second presentation of the same surface
        if isinstance(m, type(models.tetrahedron())):
            alt = barycentric_subdivision(relabel(m, np.random.default_rng(len(pool)).permutation(m.vertex_count))).complex
            pool.append((s.key(), signature(alt)))
        else:
            pool.append((s.key(), signature(Subsampled(m, 2), 4)))
    rng = np.random.default_rng(SEED)
    by_key = defaultdict(list)
    for i, (k, _) in enumerate(pool):
        by_key[k].append(i)
    keys = list(by_key)
    eq_bad = 0
    nontrivial = 0
    for j in range(N_TRIPLES):
        if j % 2:
            a, b, c = rng.integers(0, len(pool), 3)
        else:
            grp = by_key[keys[rng.integers(0, len(keys))]]
            a, b, c = (grp[i] for i in rng.integers(0, len(grp), 3))
        A, B, C = pool[a][1], pool[b][1], pool[c][1]
        hab, hba, hbc, hac = homeomorphic(A, B), homeomorphic(B, A), homeomorphic(B, C), homeomorphic(A, C)
        if homeomorphic(A, A) != "yes" or hab != hba:
            eq_bad += 1
        if hab == "yes" and hbc == "yes":
            nontrivial += 1
            if hac != "yes":
                eq_bad += 1
        # yes exactly when the signatures agree
        if (hab == "yes") != (pool[a][0] == pool[b][0]):
            eq_bad += 1
    dt = time.perf_counter() - t
    ok = rt_bad == 0 and eq_bad == 0 and dt <= LIMIT_C6
    return report(6, ok, f"round trip on {len(grid)} signatures: {rt_bad} mismatches; {N_TRIPLES} triples "
                         f"({nontrivial} with a chain a~b~c): {eq_bad} equivalence failures; {dt:.1f}s <= {LIMIT_C6:.0f}s")


def criterion_7():
    n = bad = 0
    surfaces = [c["surface"] for c in compact_corpus(SEED)] + [c["surface"] for c in corpus("boundary")[:10]]
    for cx in surfaces:
        if not cx.boundary_edge_mask.any():
            continue
        d = double(cx)
        n += 1
        if euler_characteristic(d.complex) != 2 * euler_characteristic(cx) or d.complex.boundary_edge_mask.any():
            bad += 1
    named = [(models.triangle(), models.tetrahedron()), (models.annulus(), models.torus7()),
             (models.mobius5(), models.klein_bottle())]
    named_ok = all(homeomorphic(double(a).complex, b) == "yes" for a, b in named)
    ok = bad == 0 and n > 0 and named_ok
    return report(7, ok, f"{n} bordered surfaces doubled: chi doubles and boundary vanishes, {bad} failures; "
                         f"disk->sphere, annulus->torus, Mobius->Klein: {named_ok}")


def criterion_8():
    cases = corpus("auto")
    bad = 0
    orders = set()
    streams = 0
    for c in cases:
        r = verify_p51(c["f"], c["K"], c["horizon"])
        orders.add(c["f"].order())
        streams += c["horizon"] is not None and c["name"].startswith("cylinder-rotation")
        if not (r["all_periodic"] and r["naturality"]):
            bad += 1
    groups = defaultdict(list)
    for c in cases:
        groups[(id(c["f"].complex), c["K"], c["horizon"])].append(c)
    pairs = [g for g in groups.values() if len(g) >= 2]
    rng = np.random.default_rng(SEED)
    comp_bad = 0
    for i in range(N_COMPOSE):
        g = pairs[i % len(pairs)]
        a, b = (g[j] for j in rng.integers(0, len(g), 2))
        K, h = a["K"], a["horizon"]
        pa, pb = induced_end_map(a["f"], K, h).perm, induced_end_map(b["f"], K, h).perm
        pab = induced_end_map(a["f"].compose(b["f"]), K, h).perm
        if pab != [pa[pb[x]] for x in range(len(pb))]:
            comp_bad += 1
    ok = len(cases) >= 30 and bad == 0 and comp_bad == 0 and {2, 3, 4} <= orders and streams >= 1
    return report(8, ok, f"{len(cases)} automorphism cases (orders {sorted(orders)}, {streams} declared stream shifts): "
                         f"{bad} failures of periodicity/naturality; {N_COMPOSE} composition pairs, {comp_bad} failures")


def criterion_9():
    checked = bad = 0
    streams = [c["stream"] for c in corpus("streams")]
    for c in corpus("streams"):
        s, K = c["stream"], c["K"]
        for d in residual_domains(s, K, 10):
            streams.append(CanonicalExhaustion(s, K, d, 10).stream)
    seen = set()
    for s in streams:
        if id(s) in seen:
            continue
        seen.add(id(s))
        h = 4
        t = end_tree(s, h)
        for n, cnt in enumerate(t.leaf_counts(), start=1):
            checked += 1
            if cnt > len(boundary_components(t.window.sub(n))):
                bad += 1
    ok = bad == 0 and checked > 0
    return report(9, ok, f"{len(seen)} streams, {checked} depths: leaf count <= boundary cycles of F_n; {bad} failures")


def _perf(h):
    script = os.path.join(os.path.dirname(__file__), "perf_gate.py")
    out = subprocess.run([sys.executable, script, str(h)], capture_output=True, text=True, check=True)
    return json.loads(out.stdout.strip().splitlines()[-1])


def criterion_10():
    small, big = (_perf(h) for h in PERF_HORIZONS)
    ratio = big["seconds"] / small["seconds"]
    ok = (big["faces"] >= 990_000 and small["faces"] >= 495_000 and big["K_faces"] >= 1000
          and big["seconds"] <= PERF_SECONDS and big["peak_bytes"] <= PERF_BYTES and ratio <= PERF_RATIO)
    return report(10, ok, f"{big['faces']} faces, K {big['K_faces']} faces: {big['seconds']:.2f}s <= {PERF_SECONDS:.0f}s, "
                          f"{big['peak_bytes'] / 1e9:.2f} GB <= 2 GB; {small['faces']} faces {small['seconds']:.2f}s, "
                          f"ratio {ratio:.2f} <= {PERF_RATIO}")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


@pytest.mark.parametrize("check", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 11)])
def test_criterion(check, capsys):
    with capsys.disabled():
        print()
        ok = check()
    assert ok


if __name__ == "__main__":
    results = [c() for c in CRITERIA]
    sys.exit(0 if all(results) else 1)
