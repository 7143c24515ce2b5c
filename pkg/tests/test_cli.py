import json
import os
import subprocess
import sys
from pathlib import Path

from intransitive import cli
from intransitive.homotopy import CertContext, SearchExhausted

import oracles

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def run(argv, capsys):
    code = cli.main([str(a) for a in argv])
    return code, json.loads(capsys.readouterr().out)


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return p


def test_verify_pass(capsys):
    code, rep = run(["verify", "pointline", "--config", CONFIGS / "orth_q5_n2.json", "--exhaustive"], capsys)
    assert code == 0 and rep["passed"] and rep["exit_code"] == 0
    assert rep["schema_version"] == cli.SCHEMA_VERSION


def test_verify_typerules_and_diameter(capsys, tmp_path):
    cfg = write(tmp_path, "t.json", {"qs": [5], "pairs": 50})
    assert run(["verify", "typerules", "--config", cfg], capsys)[0] == 0
    code, rep = run(["verify", "diameter", "--config", CONFIGS / "orth_q5_n2.json"], capsys)
    assert code == 0 and rep["diameter"] == 2


def test_config_errors(capsys, tmp_path):
    code, rep = run(["verify", "pointline", "--config", tmp_path / "missing.json"], capsys)
    assert code == 2 and rep["error"] == "config"
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(["build", "--config", bad], capsys)[0] == 2
    cfg = write(tmp_path, "f.json", {"geometry": {"kind": "fixture", "name": "nope"}})
    assert run(["build", "--config", cfg], capsys)[0] == 2
    cfg = write(tmp_path, "q.json", {"geometry": {"kind": "orth", "q": 9, "dim": 3, "gram": "plus"}})
    assert run(["build", "--config", cfg], capsys)[0] == 2


def test_failed_verdict_exits_one(capsys):
    # the hemicube amalgam has a proper cover, so expecting isomorphism fails
    code, rep = run(["amalgam", "tits", "--config", CONFIGS / "tetrahedron.json"], capsys)
    assert code == 0 and rep["verdict"] == "isomorphism"
    cfg = json.loads((CONFIGS / "hemicube.json").read_text())
    code, rep = run(["amalgam", "tits", "--config", CONFIGS / "hemicube.json"], capsys)
    assert code == 0 and rep["verdict"] == cfg["expect"] == "proper cover"


def test_unexpected_verdict_exits_one(capsys, tmp_path):
    cfg = write(tmp_path, "h.json", {"geometry": {"kind": "fixture", "name": "hemicube"}})
    code, rep = run(["amalgam", "tits", "--config", cfg], capsys)
    assert code == 1 and rep["index"] == 2


def test_search_exhausted_exits_three(capsys, monkeypatch):
    def boom(self, pts, verify=True):
        raise SearchExhausted("no transporter")
    monkeypatch.setattr(CertContext, "certify_points", boom)
    code, rep = run(["certify", "--config", CONFIGS / "orthW_q11_n3_minus.json", "--count", "1"], capsys)
    assert code == 3 and rep["search_exhausted"] == 1


def test_cap_exits_four(capsys, tmp_path):
    cfg = write(tmp_path, "p.json", {"presentation": {"generators": ["a", "b"], "relators": ["a a"]}})
    code, rep = run(["amalgam", "enumerate", "--config", cfg, "--cap", "50"], capsys)
    assert code == 4 and rep["error"] == "CapExceeded"


def test_enumerate_presentation(capsys):
    code, rep = run(["amalgam", "enumerate", "--config", CONFIGS / "s3_over_a.json"], capsys)
    assert code == 0 and rep["index"] == 3
    # S3 and Z2 x Z2 amalgamated over Z2 is infinite: the enumeration hits the cap
    code, rep = run(["amalgam", "enumerate", "--config", CONFIGS / "amalgam_s3_z2.json",
                     "--cap", "3000"], capsys)
    assert code == 4


def test_shape_reduce_and_cover(capsys):
    code, rep = run(["amalgam", "shape-reduce", "--config", CONFIGS / "tetrahedron_shape.json",
                     "--cap", "2000"], capsys)
    assert code == 0 and rep["orders_at_verified_steps"] == [24]
    code, rep = run(["amalgam", "cover", "--config", CONFIGS / "hemicube.json"], capsys)
    assert code == 0 and rep["index"] == 2


def test_certify_and_replay(capsys, tmp_path):
    d = tmp_path / "certs"
    code, rep = run(["certify", "--config", CONFIGS / "orthW_q11_n3_minus.json", "--kind", "quadrangle",
                     "--count", "3", "--cert-dir", d], capsys)
    assert code == 0 and rep["verified"] == 3
    files = sorted(d.glob("*.json"))
    assert len(files) == 3
    # replay without a config: the geometry travels with the certificate
    code, rep = run(["replay", d], capsys)
    assert code == 0 and rep["passed_count"] == 3
    code, rep = run(["certify", "--config", CONFIGS / "orthW_q11_n3_minus.json", "--replay", d], capsys)
    assert code == 0
    # the independent replayer agrees
    s = cli.Setting(json.loads((CONFIGS / "orthW_q11_n3_minus.json").read_text()))
    gram = [list(r) for r in s.f.gram]
    allowed = {oracles.subspace_label([tuple(r) for r in H.basis], gram, s.f.q) for H in s.W}
    for f in files:
        data = json.loads(f.read_text())["certificate"]
        assert oracles.replay_certificate(data, gram, s.f.q, allowed)[0]


def test_tampered_certificate_exits_one(capsys, tmp_path):
    d = tmp_path / "certs"
    run(["certify", "--config", CONFIGS / "orthW_q11_n3_minus.json", "--count", "1", "--cert-dir", d], capsys)
    f = next(d.glob("*.json"))
    data = json.loads(f.read_text())
    moves = data["certificate"]["moves"]
    moves[len(moves) // 2]["pos"] += 1
    f.write_text(json.dumps(data))
    code, rep = run(["replay", f], capsys)
    assert code == 1 and not rep["entries"][0]["ok"]


def _cli(args, seed):
    env = dict(os.environ, PYTHONHASHSEED=str(seed))
    out = subprocess.run([sys.executable, "-m", "intransitive", *args], env=env,
                         capture_output=True, text=True, check=False)
    return out.returncode, out.stdout


def test_output_is_deterministic_across_hash_seeds(tmp_path):
    args = ["certify", "--config", str(CONFIGS / "orthW_q11_n3_minus.json"), "--kind", "triangle",
            "--count", "4", "--seed", "3"]
    a = _cli(args, 1)
    b = _cli(args, 12345)
    assert a[0] == 0 and a == b
    digests = [e["sha256"] for e in json.loads(a[1])["entries"]]
    assert len(set(digests)) == 4


def test_build_fixture_roundtrip(capsys, tmp_path):
    out = tmp_path / "g.json"
    code = cli.main(["build", "--config", str(CONFIGS / "tetrahedron.json"), "--out", str(out)])
    assert code == 0
    rep = json.loads(out.read_text())
    cfg = write(tmp_path, "pg.json", {"geometry": {"kind": "pregeometry", "data": rep["geometry"]}})
    code, rep2 = run(["verify", "geometryaxioms", "--config", cfg], capsys)
    assert code == 0 and rep2["passed"]


def test_build_cap(capsys):
    code, rep = run(["build", "--config", CONFIGS / "orth_q5_n3.json", "--cap", "10"], capsys)
    assert code == 4


def test_build_report_is_a_config(capsys, tmp_path):
    out = tmp_path / "g.json"
    assert cli.main(["build", "--config", str(CONFIGS / "orth_q5_n2.json"), "--out", str(out)]) == 0
    capsys.readouterr()
    code, rep = run(["verify", "geometryaxioms", "--config", out], capsys)
    assert code == 0 and rep["passed"]
    ref = write(tmp_path, "ref.json", {"geometry": {"kind": "pregeometry", "file": str(out)}})
    code, rep = run(["verify", "geometryaxioms", "--config", ref], capsys)
    assert code == 0 and rep["passed"]
    bad = write(tmp_path, "bad.json", {"geometry": {"kind": "pregeometry"}})
    assert run(["verify", "geometryaxioms", "--config", bad], capsys)[0] == 2


def test_kind_overrides_suite(capsys):
    cfg = CONFIGS / "orthW_q11_n4_plus.json"
    code, rep = run(["certify", "--config", cfg, "--kind", "triangle", "--count", "2"], capsys)
    assert code == 0 and rep["certificates"] == 2
    assert all(e["key"].startswith("triangle") for e in rep["entries"])
