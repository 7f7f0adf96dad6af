import json
from pathlib import Path

from tropicorr.cli import run
from tropicorr.curvefile import curve_to_json, parse_curve

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"


def run_json(capsys, *argv):
    code = run(list(argv) + ["--json"])
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_count_line2pts(capsys):
    code, rep = run_json(capsys, "count", str(FIXTURES / "line2pts.json"),
                         "--char", "0")
    assert code == 0
    assert rep["result"]["count"] == "1"
    assert rep["result"]["factorization"] == ["1", "1"]
    assert len(rep["result"]["cross_checks"]) == 3


def test_count_dblline_chars(capsys):
    code, rep = run_json(capsys, "count", str(FIXTURES / "dblline.json"))
    assert code == 0 and rep["result"]["count"] == "4"
    code, rep = run_json(capsys, "count", str(FIXTURES / "dblline.json"),
                         "--char", "3")
    assert code == 0 and rep["result"]["count"] == "4"
    code, err = run_json(capsys, "count", str(FIXTURES / "dblline.json"),
                         "--char", "2")
    assert code == 1
    assert err["error"]["code"] == "HypothesisFailed:char_ok"


def test_count_elliptic(capsys):
    code, rep = run_json(capsys, "count-elliptic",
                         str(FIXTURES / "triangle_elliptic.json"))
    assert code == 0 and rep["result"]["count"] == "9"


def test_validate_bad_curve(tmp_path, capsys):
    data = json.loads((FIXTURES / "line2pts.json").read_text())
    # give an infinite vertex a second edge
    data["edges"].append({"id": "extra", "ends": ["v0", "u1"], "length": "inf"})
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(data))
    code, rep = run_json(capsys, "validate", str(bad))
    assert code == 1
    assert any("(p2)" in v for v in rep["result"]["violations"])


def test_validate_good(capsys):
    code, rep = run_json(capsys, "validate", str(FIXTURES / "xconfig.json"))
    assert code == 0 and rep["result"]["valid"]


def test_parse_error_exit_2(tmp_path, capsys):
    f = tmp_path / "broken.json"
    f.write_text("{not json")
    assert run(["info", str(f), "--json"]) == 2
    err = json.loads(capsys.readouterr().out)
    assert err["error"]["code"] == "ParseError"


def test_unknown_field_rejected(tmp_path, capsys):
    data = json.loads((FIXTURES / "line2pts.json").read_text())
    data["color"] = "blue"
    f = tmp_path / "extra.json"
    f.write_text(json.dumps(data))
    assert run(["info", str(f), "--json"]) == 2


def test_info_fields(capsys):
    code, rep = run_json(capsys, "info", str(FIXTURES / "line2pts.json"))
    assert code == 0
    res = rep["result"]
    assert res["genus"] == 0 and res["rank"] == 4
    assert res["constraint"]["codim"] == 4
    code, rep = run_json(capsys, "info", str(FIXTURES / "triangle_elliptic.json"))
    assert rep["result"]["tropical_j"] == "3"


def test_stabilize_tr_roundtrip(tmp_path, capsys):
    for cmd in ("stabilize", "tr"):
        out = tmp_path / f"{cmd}.json"
        code = run([cmd, str(FIXTURES / "xconfig.json"), "--out", str(out)])
        assert code == 0
        report = json.loads(out.read_text())
        reparsed, cons, char = parse_curve(report["result"]["curve"])
        code2 = None
        curve2 = tmp_path / f"{cmd}-curve.json"
        curve2.write_text(json.dumps(report["result"]["curve"]))
        assert run(["validate", str(curve2), "--json"]) == 0
        capsys.readouterr()


def test_fan_and_stacky_commands(capsys):
    code, rep = run_json(capsys, "fan", str(FIXTURES / "xconfig.json"))
    assert code == 0
    assert len(rep["result"]["fan"]["rays"]) >= 5
    code, rep = run_json(capsys, "stacky", str(FIXTURES / "dblline.json"),
                         "--char", "3")
    assert code == 0
    assert rep["result"]["dm"] is True
    assert rep["result"]["stacky"]["a"] == 2
    code, rep = run_json(capsys, "stacky", str(FIXTURES / "dblline.json"),
                         "--char", "2")
    assert rep["result"]["dm"] is False


def test_complex_and_regular_commands(capsys):
    code, rep = run_json(capsys, "complex", str(FIXTURES / "dblline.json"),
                         "--constrained", "--variant", "beta")
    assert code == 0
    assert rep["result"]["E2"] == {"rank": 0, "torsion": [2, 2]}
    code, rep = run_json(capsys, "regular", str(FIXTURES / "dblline.json"),
                         "--constrained", "--char", "2", "--group", "Fp")
    assert code == 0 and rep["result"]["g_regular"] is False
    code, rep = run_json(capsys, "regular",
                         str(FIXTURES / "triangle_elliptic.json"),
                         "--constrained", "--elliptic", "--group", "Q")
    assert rep["result"]["elliptically_regular"] is True
    # over Z the obstruction group Z/9 itself is nonzero
    code, rep = run_json(capsys, "regular",
                         str(FIXTURES / "triangle_elliptic.json"),
                         "--constrained", "--elliptic", "--group", "Z")
    assert rep["result"]["elliptically_regular"] is False
    assert rep["result"]["obstruction"]["finite_order"] == 9


def test_reduction_data(capsys):
    code, rep = run_json(capsys, "reduction-data", str(FIXTURES / "dblline.json"))
    assert code == 0
    table = rep["result"]["exponents"]
    assert sorted(vec for _, vec in table["v0"]) == [[-2, 0], [0, -2], [2, 2]]
    for v, rows in table.items():
        total = [0, 0]
        for _, vec in rows:
            total = [a + b for a, b in zip(total, vec)]
        assert total == [0, 0]


def test_json_deterministic(capsys):
    code, _ = run_json(capsys, "info", str(FIXTURES / "line2pts.json"))
    first = run(["info", str(FIXTURES / "line2pts.json"), "--json"])
    out1 = capsys.readouterr().out
    second = run(["info", str(FIXTURES / "line2pts.json"), "--json"])
    out2 = capsys.readouterr().out
    assert out1 == out2


def test_human_output(capsys):
    code = run(["info", str(FIXTURES / "line2pts.json")])
    out = capsys.readouterr().out
    assert code == 0
    assert "genus: 0" in out
    assert "rank: 4" in out


def test_corpus_roundtrip_through_cli(tmp_path, capsys):
    import sys

    sys.path.insert(0, str(Path(__file__).parent))
    from corpus import corpus

    for i, (p, a) in enumerate(corpus(160217, 10)):
        f = tmp_path / f"c{i}.json"
        f.write_text(json.dumps(curve_to_json(p, a)))
        for argv in (["validate", str(f)],
                     ["info", str(f)],
                     ["tr", str(f)],
                     ["fan", str(f)],
                     ["stacky", str(f)],
                     ["reduction-data", str(f)],
                     ["complex", str(f), "--constrained", "--group", "Fp",
                      "--char", "5"]):
            code = run(argv + ["--json"])
            out = capsys.readouterr().out
            assert code == 0, (argv, out)
            json.loads(out)
        # reloading the refinement output parses and validates cleanly
        code = run(["tr", str(f), "--json"])
        rep = json.loads(capsys.readouterr().out)
        reparsed, cons, char = parse_curve(rep["result"]["curve"])
        assert run(["validate", str(f)]) == 0
        capsys.readouterr()
