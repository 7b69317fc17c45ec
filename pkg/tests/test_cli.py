import json
import subprocess
import sys

import pytest

from confquant.cli import main
from confquant.curved import random_factor_jet, random_metric_jet, random_symbol_jet
from confquant.geometry import flat_presentation


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_coeffs_half_densities(capsys):
    code, out, _ = run(capsys, "coeffs", "--n", "2", "--lambda", "1/2", "--mu", "1/2")
    data = json.loads(out)
    assert code == 0
    assert (data["gamma2"], data["gamma4"], data["gamma5"]) == ("1/2", "1/48", "1/12")
    assert data["alpha"] == "1/2" and data["resonant"] is False


def test_coeffs_resonant_family(capsys):
    code, out, err = run(capsys, "coeffs", "--n", "3", "--lambda", "0", "--mu", "1")
    data = json.loads(out)
    assert code == 0 and data["resonant"] is True
    assert "resonant" in err
    code, out, _ = run(capsys, "coeffs", "--n", "3", "--lambda", "0", "--mu", "1", "--symmetric")
    assert json.loads(out)["gamma3"] is not None


def test_inadmissible_pair(capsys):
    code, out, _ = run(capsys, "coeffs", "--n", "3", "--lambda", "0", "--mu", "2/3")
    assert code == 3
    assert json.loads(out)["admissible_pairs"] == [["1/6", "5/6"]]


def test_parse_errors(capsys):
    assert run(capsys, "coeffs", "--n", "3", "--lambda", "0")[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["coeffs", "--n", "3", "--lambda", "zero", "--mu", "1"])
    assert exc.value.code == 2
    capsys.readouterr()


def test_resonances(capsys):
    code, out, _ = run(capsys, "resonances", "--n", "3")
    data = json.loads(out)
    assert code == 0
    assert data["resonant_deltas"] == ["2/3", "5/6", "1", "4/3", "5/3"]
    code, out, _ = run(capsys, "resonances", "--n", "1")
    assert json.loads(out)["resonant_deltas"] == ["1", "3/2", "2"]


def test_quantize_flat(tmp_path, capsys):
    sym = tmp_path / "h.json"
    sym.write_text(json.dumps({"P": "xi1^2 + xi2^2"}))
    code, out, _ = run(capsys, "quantize", "--symbol", str(sym), "--n", "2", "--lambda", "1/2", "--mu", "1/2",
                       "--hbar", "1")
    assert code == 0
    op = json.loads(out)["operator"]
    assert "-1" in json.dumps(op)


def test_quantize_flat_unresolved(tmp_path, capsys):
    sym = tmp_path / "h.json"
    sym.write_text(json.dumps({"P": "x1*xi1^2"}))
    code, _, _ = run(capsys, "quantize", "--symbol", str(sym), "--n", "2", "--lambda", "0", "--mu", "1", "--no-pin")
    assert code == 4


def test_quantize_curved(tmp_path, capsys):
    import random
    rng = random.Random(3)
    m, s = random_metric_jet(rng, 3), random_symbol_jet(rng, 3)
    (tmp_path / "m.json").write_text(json.dumps(m.to_json()))
    (tmp_path / "s.json").write_text(json.dumps(s.to_json()))
    code, out, _ = run(capsys, "quantize", "--mode", "curved", "--n", "3", "--lambda", "1/3", "--mu", "3/4",
                       "--metric-jets", str(tmp_path / "m.json"), "--symbol", str(tmp_path / "s.json"))
    assert code == 0 and "A2" in json.loads(out)["operator"]


def test_curved_low_dimension_needs_presentation(tmp_path, capsys):
    import random
    rng = random.Random(3)
    m, s = random_metric_jet(rng, 2), random_symbol_jet(rng, 2)
    (tmp_path / "m.json").write_text(json.dumps(m.to_json()))
    (tmp_path / "s.json").write_text(json.dumps(s.to_json()))
    args = ["quantize", "--mode", "curved", "--n", "2", "--lambda", "1/3", "--mu", "3/4",
            "--symbol", str(tmp_path / "s.json")]
    assert run(capsys, *args, "--metric-jets", str(tmp_path / "m.json"))[0] == 5
    f = random_factor_jet(rng, 2)
    pres = {"g0": [[1, 0], [0, 1]], "factor": f.to_json()}
    (tmp_path / "p.json").write_text(json.dumps(pres))
    code, out, _ = run(capsys, *args, "--presentation", str(tmp_path / "p.json"))
    assert code == 0


def test_geodesic_and_connection(tmp_path, capsys):
    import random
    rng = random.Random(8)
    m = random_metric_jet(rng, 3)
    (tmp_path / "m.json").write_text(json.dumps(m.to_json()))
    base = ["quantize", "--mode", "curved", "--n", "3", "--lambda", "1/2", "--mu", "1/2",
            "--metric-jets", str(tmp_path / "m.json")]
    code, out, _ = run(capsys, *base, "--geodesic")
    assert code == 0 and json.loads(out)["C"] == "-9/40"
    (tmp_path / "a.json").write_text(json.dumps({"A": [1, 0, 2], "dA": [[0, 1, 0], [1, 0, 0], [0, 0, 3]]}))
    assert run(capsys, *base, "--connection", str(tmp_path / "a.json"))[0] == 0
    code, _, _ = run(capsys, "quantize", "--mode", "curved", "--n", "3", "--lambda", "1/6", "--mu", "5/6",
                     "--metric-jets", str(tmp_path / "m.json"), "--geodesic")
    assert code == 4


@pytest.mark.parametrize("case,n,value", [("yamabe", 4, "-1/6"), ("laplace", 3, "0"), ("new", 3, "1/10"),
                                          ("yamabe", 2, "0"), ("sturm_liouville", 1, "-1/2")])
def test_examples(capsys, case, n, value):
    code, out, _ = run(capsys, "quantize", "--example", case, "--n", str(n))
    assert code == 0 and json.loads(out)["scalar_coefficient"] == value


def test_examples_table(capsys):
    code, out, _ = run(capsys, "examples", "--n", "3")
    rows = json.loads(out)
    assert code == 0 and [r["case"] for r in rows] == ["yamabe", "laplace", "new"]
    assert all(r["scalar_coefficient"] == r["C"] for r in rows)


def test_verify(capsys, monkeypatch):
    monkeypatch.setenv("CONFQUANT_SEED", "17")
    code, out, err = run(capsys, "verify", "--suite", "ideal", "--n", "3")
    data = json.loads(out)
    assert code == 0 and data["seed"] == 17 and data["failures"] == []
    assert "Z(x1^2)" in err


def test_console_script_runs():
    res = subprocess.run([sys.executable, "-m", "confquant.cli", "resonances", "--n", "2"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["n"] == 2
