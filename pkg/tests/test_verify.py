import json
import random

import pytest

from confquant.verify import SUITES, VerifyReport, default_seed, random_weights, run_suite
from confquant.coefficients import is_resonant


@pytest.mark.parametrize("suite", [s for s in SUITES if s != "equivariance"])
def test_suites_pass_at_n2(suite):
    rep = run_suite(suite, n=2, seed=1)
    assert rep.cases_run > 0
    assert rep.ok, rep.failures[:3]


def test_equivariance_suite_small():
    rep = run_suite("equivariance", n=1, seed=1, max_degree=2)
    assert rep.ok and rep.cases_run > 0


def test_ideal_suite_reports_the_witness():
    rep = run_suite("ideal", n=3)
    assert rep.ok
    assert any("x1^2" in note for note in rep.notes)


def test_unknown_suite_and_bad_n():
    with pytest.raises(KeyError):
        run_suite("nope")
    with pytest.raises(ValueError):
        run_suite("system", n=0)


def test_seed_from_environment(monkeypatch):
    monkeypatch.setenv("CONFQUANT_SEED", "42")
    assert default_seed() == 42
    assert run_suite("system", n=2).seed == 42
    monkeypatch.delenv("CONFQUANT_SEED")
    assert default_seed() == 20240611


def test_same_seed_same_run():
    a = run_suite("agreement", n=2, seed=5)
    b = run_suite("agreement", n=2, seed=5)
    assert a.cases_run == b.cases_run and a.failures == b.failures


def test_report_records_nonzero_residuals():
    rep = VerifyReport("x")
    rep.check("zero", 0)
    rep.check("one", 1)
    assert rep.cases_run == 2 and not rep.ok
    out = json.loads(json.dumps(rep.to_json()))
    assert out["failures"] == [{"case": "one", "residual": "1"}]


def test_random_weights_are_generic():
    rng = random.Random(0)
    for n in (1, 2, 3, 4):
        for _ in range(20):
            w = random_weights(rng, n)
            assert not is_resonant(n, w.delta)
