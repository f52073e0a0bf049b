import json
import os
import subprocess
import sys

import pytest

from surfends import models
from surfends.cli import main, run
from surfends.core import Subcomplex
from surfends.io import InputError, read_json, read_subcomplex, read_surface, write_json_atomic


def put(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


@pytest.fixture
def files(tmp_path):
    t = models.tetrahedron().faces.tolist()
    pinched = t + [[0 if v == 0 else v + 3 for v in f] for f in t]
    return {
        "torus": put(tmp_path / "torus.json", models.torus7().to_dict()),
        "klein": put(tmp_path / "klein.json", models.klein_bottle().to_dict()),
        "sphere": put(tmp_path / "sphere.json", models.octahedron().to_dict()),
        "pinched": put(tmp_path / "pinched.json", {"vertices": 7, "faces": pinched}),
        "disk": put(tmp_path / "disk.json", models.triangle().to_dict()),
        "equator": put(tmp_path / "equator.json", {"edges": [[0, 1], [1, 2], [2, 3], [3, 0]]}),
        "cylinder": put(tmp_path / "cylinder.json", {"kind": "builder", "name": "cylinder", "params": {}}),
        "flute": put(tmp_path / "flute.json", {"kind": "builder", "name": "flute", "params": {}}),
        "swap": put(tmp_path / "swap.json", {"vertex_map": [0, 1, 2, 3, 5, 4], "domain": "all"}),
        "rot": put(tmp_path / "rot.json", {"declared": "rotation-1"}),
        "meridian": put(tmp_path / "meridian.json", {"edges": [[0, 1], [1, 2], [2, 3], [0, 3]]}),
        "sig": put(tmp_path / "sig.json", {"orientability_class": "orientable", "genus": 1,
                                           "boundary_circles": 0, "end_data": [0, 0, 0]}),
        "dir": tmp_path,
    }


def results(argv):
    code, rep = run(argv)
    assert code == 0, rep
    return rep["results"], rep


def test_validate(files):
    r, _ = results(["validate", "--surface", files["torus"]])
    assert r["valid"]
    r, rep = results(["validate", "--stream", files["cylinder"], "--horizon", "6"])
    assert r["valid"] and "trusted: exhaustive producer" in rep["warnings"]
    code, rep = run(["validate", "--surface", files["pinched"]])
    assert code == 1
    assert rep["results"]["violations"] == [{"kind": "pinched_vertex", "vertex": 0}]


def test_info_klein(files):
    r, _ = results(["info", "--surface", files["klein"]])
    assert r["euler_characteristic"] == 0 and not r["orientable"] and r["genus"] == 2


def test_ends_flute(files):
    r, rep = results(["ends", "--stream", files["flute"], "--horizon", "10"])
    assert r["leaf_counts"] == list(range(1, 11)) and not r["stabilized"]
    assert any("at horizon 10" in w for w in rep["warnings"])


def test_residual_sphere(files):
    r, _ = results(["residual", "--surface", files["sphere"], "--k", files["equator"]])
    assert r["n_domains"] == 2 and r["n_bounded"] == 2
    assert all(d["bound_check"]["ok"] for d in r["domains"])


def test_residual_stream(files):
    cmd = ["residual", "--stream", files["cylinder"], "--k", files["meridian"], "--horizon", "5"]
    r, rep = results(cmd)
    assert r["n_domains"] == 2 and r["n_bounded"] == 0
    assert "at horizon 5" in rep["warnings"]


def test_classify_compare(files):
    r, _ = results(["classify", "--surface", files["torus"]])
    assert (r["orientability_class"], r["genus"]) == ("orientable", 1)
    r, _ = results(["compare", "--a", files["torus"], "--b", files["klein"]])
    assert r["homeomorphic"] == "no"
    r, _ = results(["compare", "--a", files["cylinder"], "--b", files["cylinder"]])
    assert r["homeomorphic"] == "yes"


def test_generate_and_double(files):
    out = str(files["dir"] / "gen.json")
    r, _ = results(["generate", "--signature", files["sig"], "--out", out])
    assert r["kind"] == "surface"
    r, _ = results(["classify", "--surface", out])
    assert r["genus"] == 1
    out = str(files["dir"] / "double.json")
    r, _ = results(["double", "--surface", files["disk"], "--out", out])
    assert r["info"]["euler_characteristic"] == 2
    assert read_surface(out).n_faces == r["info"]["faces"]


def test_end_perm(files):
    r, _ = results(["end-perm", "--surface", files["sphere"], "--k", files["equator"], "--map", files["swap"]])
    assert r["orbit_lengths"] == [2] and r["all_periodic"]
    r, _ = results(["end-perm", "--stream", files["cylinder"], "--k", files["meridian"],
                    "--map", files["rot"], "--horizon", "5"])
    assert r["orbit_lengths"] == [1, 1]


def test_stream_map_must_be_declared(files):
    code, rep = run(["end-perm", "--stream", files["cylinder"], "--k", files["meridian"], "--map", files["swap"]])
    assert code == 1 and rep["error"]["kind"] == "domain"


def test_exit_codes(files, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"faces": [[0, 1, 2]\n  oops')
    code, rep = run(["info", "--surface", str(bad)])
    assert code == 2 and "line 2" in rep["error"]["message"]
    code, _ = run(["info", "--surface", str(tmp_path / "missing.json")])
    assert code == 2
    code, _ = run(["residual", "--surface", files["sphere"]])
    assert code == 1
    code, _ = run(["generate", "--signature", put(tmp_path / "s.json", {"orientability_class": "orientable",
                                                                         "genus": 2, "end_data": [1, 1, 0]})])
    assert code == 1


def test_determinism(files, capsys):
    argv = ["residual", "--surface", files["sphere"], "--k", files["equator"]]
    main(argv)
    a = capsys.readouterr().out
    main(argv)
    assert capsys.readouterr().out == a
    assert list(json.loads(a)) == ["command", "inputs", "results", "warnings"]


def test_table_format(files, capsys):
    assert main(["classify", "--surface", files["torus"], "--format", "table"]) == 0
    out = capsys.readouterr().out
    assert "orientability_class: orientable" in out


def test_corpus(tmp_path, monkeypatch):
    a, b, c = tmp_path / "a", tmp_path / "b", tmp_path / "c"
    r, _ = results(["corpus", "--seed", "1", "--out", str(a)])
    assert (r["models"], r["streams"]) == (18, 7)
    monkeypatch.setenv("SURFACE_ENDS_THREADS", "4")
    results(["corpus", "--seed", "1", "--out", str(b)])
    results(["corpus", "--seed", "2", "--out", str(c)])
    files_a = sorted(p.relative_to(a) for p in a.rglob("*.json"))
    assert files_a == sorted(p.relative_to(b) for p in b.rglob("*.json"))
    assert all((a / p).read_bytes() == (b / p).read_bytes() for p in files_a)
    ka = sorted((a / "k").iterdir())
    assert any(p.read_bytes() != (c / "k" / p.name).read_bytes() for p in ka if (c / "k" / p.name).exists())
    man_a, man_c = read_json(str(a / "manifest.json")), read_json(str(c / "manifest.json"))
    sig = lambda m: [(x["name"], x["expected_signature"]) for x in m["artifacts"]]
    assert sig(man_a) == sig(man_c)


def test_io_helpers(tmp_path):
    cx = models.octahedron()
    p = tmp_path / "k.json"
    p.write_text(json.dumps({"faces": [0]}))
    K, warn = read_subcomplex(str(p), cx)
    assert K == Subcomplex.from_faces(cx, [0]) and warn
    with pytest.raises(InputError):
        put(tmp_path / "x.json", {"faces": [[0, 1]]})
        read_surface(str(tmp_path / "x.json"))
    out = tmp_path / "sub" / "o.json"
    write_json_atomic(str(out), {"b": 1, "a": [1, 2]})
    assert out.read_text().index('"a"') < out.read_text().index('"b"')
    assert not [q for q in out.parent.iterdir() if q.name.startswith(".tmp")]


def test_console_script(files):
    exe = [sys.executable, "-m", "surfends.cli", "info", "--surface", files["torus"]]
    p = subprocess.run(exe, capture_output=True, text=True)
    assert p.returncode == 0 and json.loads(p.stdout)["results"]["genus"] == 1
