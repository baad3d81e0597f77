import json
import math

import pytest

from branchcut.cli import main

RADICAL_ON_SEGMENT = {
    "gamma": {"segments": [{"kind": "line", "points": [[0, 0], [1, 0]]}]},
    "function": {"kind": "radical", "c": [0, 1], "r": 2},
    "values": [[0.7071067811865476, 0]],
}
CIRCLE = {"segments": [{"kind": "arc", "points": [[1, 0], [1, 0]], "center": [0, 0], "ccw": True}]}


def write(tmp_path, spec, name="spec.json"):
    p = tmp_path / name
    p.write_text(json.dumps(spec) if not isinstance(spec, str) else spec)
    return str(p)


def run(tmp_path, spec, *extra):
    out = tmp_path / "out.json"
    code = main(["run", write(tmp_path, spec), "--out", str(out), *extra])
    return code, (json.loads(out.read_text()) if out.exists() else None)


def test_polymoments_pass_and_deterministic(tmp_path):
    spec = {"kind": "polymoments", "P": [-1, 0, 18, 0, -48, 0, 32], "Q": [-1, -3, 2, 4],
            "a": {"b": "-1/2", "d": 3}, "b": {"b": "1/2", "d": 3}, "K": 8, "expect": {"all_zero": True}}
    code, rep = run(tmp_path, spec)
    assert code == 0 and rep["passed"] and rep["result"]["method"] == "exact"
    first = (tmp_path / "out.json").read_bytes()
    run(tmp_path, spec)
    assert (tmp_path / "out.json").read_bytes() == first


def test_failed_expectation_exits_one(tmp_path):
    spec = {"kind": "polymoments", "P": [0, 1], "Q": [1], "a": 0, "b": 1, "K": 2, "expect": {"all_zero": True}}
    code, rep = run(tmp_path, spec)
    assert code == 1 and not rep["passed"]


def test_integral_of_zero_function(tmp_path):
    spec = {"kind": "integral", "t": [[0.2, 0.3], 5], "expect": {"zero": True},
            "assignment": {"gamma": CIRCLE, "function": {"kind": "polynomial", "coeffs": [0]}, "values": [0]}}
    assert run(tmp_path, spec)[0] == 0


def test_moments_of_sqrt(tmp_path):
    spec = {"kind": "moments", "K": 3, "assignment": RADICAL_ON_SEGMENT}
    code, rep = run(tmp_path, spec)
    assert code == 0
    got = [complex(*v) for v in rep["result"]["moments"]]
    assert max(abs(g - 2 / (2 * k + 3)) for k, g in enumerate(got)) < 1e-12


def test_monodromy_kind(tmp_path):
    # sqrt(1 - z^2) on [-1, 1]: finite monodromy of order 2
    assignment = {"gamma": {"segments": [{"kind": "line", "points": [[-1, 0], [1, 0]]}]},
                  "function": {"kind": "radical", "c": [1, 0, -1], "r": 2}, "values": [1]}
    spec = {"kind": "monodromy", "L": 4, "basepoint": [0, -0.3], "assignment": assignment,
            "expect": {"classification": "finite", "order": 2}}
    code, rep = run(tmp_path, spec)
    assert code == 0 and rep["result"]["vanishes"] is False


def test_doublemoments_laurent_residue(tmp_path):
    spec = {"kind": "doublemoments", "P": {"num": [1], "den": [0, 1]}, "Q": [0, 1], "gamma": CIRCLE, "I": 1, "J": 1}
    code, rep = run(tmp_path, spec)
    assert code == 0
    re, im = rep["result"]["grid"][0][1]
    assert abs(re) < 1e-10 and abs(im + 2 * math.pi) < 1e-10


def test_definiteness_kind(tmp_path):
    spec = {"kind": "definiteness", "P": [0, 0, 1], "a": -1, "b": 1, "witness_q": [0, 0, 0, 0, 1]}
    code, rep = run(tmp_path, spec)
    assert code == 0 and rep["result"]["refutation"]["composition"] is True


def test_tolerance_flags_recorded(tmp_path):
    spec = {"kind": "polymoments", "P": [0, 1], "Q": [1], "a": 0, "b": 1, "K": 1}
    code, rep = run(tmp_path, spec, "--tol-quad", "1e-11", "--word-length", "5", "--seed", "7")
    assert rep["tolerances"]["eps_quad"] == 1e-11 and rep["tolerances"]["word_length"] == 5
    assert rep["seed"] == 7


@pytest.mark.parametrize("spec", [
    "{\"kind\": \"integral\",",
    {"kind": "nope"},
    {"kind": "polymoments", "P": [0, 1]},
    {"kind": "polymoments", "P": [0, 1], "Q": [1], "a": 0, "b": 1, "tolerances": {"eps_magic": 1}},
    {"kind": "polymoments", "P": [0, 1], "Q": [1], "a": 0, "b": 1, "K": -3},
])
def test_bad_input_exits_two(tmp_path, spec, capsys):
    assert run(tmp_path, spec)[0] == 2
    assert "input error" in capsys.readouterr().err


def test_missing_file_and_bad_example_id(tmp_path):
    assert main(["run", str(tmp_path / "absent.json")]) == 2
    assert main(["example", "9"]) == 2
    assert main(["example", "x"]) == 2


def test_point_on_curve_is_input_error(tmp_path):
    spec = {"kind": "integral", "t": [[0.5, 0]], "assignment": RADICAL_ON_SEGMENT}
    assert run(tmp_path, spec)[0] == 2


def test_example_and_export(tmp_path):
    out = tmp_path / "ex.json"
    assert main(["example", "2", "--out", str(out)]) == 0
    js = tmp_path / "again.json"
    assert main(["export", str(out), "--format", "json", "--out", str(js)]) == 0
    assert js.read_text() == out.read_text()


def test_export_csv_of_moments(tmp_path):
    spec = {"kind": "polymoments", "P": [0, 1], "Q": [1], "a": 0, "b": 1, "K": 2}
    run(tmp_path, spec)
    csv = tmp_path / "m.csv"
    assert main(["export", str(tmp_path / "out.json"), "--format", "csv", "--out", str(csv)]) == 0
    lines = csv.read_text().splitlines()
    assert lines[0] == "k,re,im,method,err" and lines[1].startswith("0,1,0,exact")
