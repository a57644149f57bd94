import filecmp
import math

import pytest

import adapta


def test_catalogues():
    assert adapta.SENSORS == ["Oxi", "Ecg", "Term", "Abps", "Abpd", "Glc"]
    assert len(adapta.PROFILES) == 13


def test_classify_boundary_goes_to_riskier_band():
    assert adapta.classify_risk("Term", 36.5) == "Low"
    assert adapta.classify_risk("Oxi", 65.0) == "Medium"
    with pytest.raises(adapta.DomainError):
        adapta.classify_risk("Glc", 10.0)


def test_default_oracle():
    assert adapta.expected_default(["High", "High", "Low", "Low", "Low", "Low"]) == 5
    assert adapta.expected_default({"Ecg": "Medium"}) == 2
    with pytest.raises(adapta.OracleUndefined):
        adapta.expected_default([None] * 6)


def test_weighted_oracle():
    assert adapta.expected_weighted(["Low"] * 6) == 1
    assert adapta.overall_score(["High", "Low", "Low", "Low", "Low", "Low"]) == pytest.approx(125 / 6)
    assert adapta.expected_weighted(["Low", "High", "Low", "Low", "Low", "Low"], "Obesity3") == 5


def test_compare():
    assert adapta.compare(3, 4)
    assert not adapta.compare(3, 5)


def test_statistics():
    base = [89.46, 84.17, 90.46, 89.75, 89.53]
    adapt = [73.30, 68.12, 69.35, 59.12, 77.30]
    r = adapta.mann_whitney_u(base, adapt)
    assert r["u"] == 25
    assert r["p_exact"] == pytest.approx(2 / 252, abs=1e-12)
    assert r["p_normal"] == pytest.approx(1.219e-2, abs=1e-4)
    assert adapta.a12(base, adapt) == 1.0
    assert adapta.std_dev(base) == pytest.approx(2.28, abs=0.01)
    assert adapta.ptcr([True, True, True, False]) == 75.0
    assert adapta.ptcr([]) is None


def test_pipeline(tmp_path):
    data = tmp_path / "data"
    model = tmp_path / "model.json"
    adapta.gen_data(data, seed=1, records=13, samples=400)
    adapta.derive(data, model)
    out = adapta.run_experiment(model, tmp_path / "out", scenarios=["s1"], reps=2, duration=300)
    assert len(out["logs"]) == 4
    s1 = out["ptcr"]["s1"]
    assert 0 <= s1["adaptive"] <= 100 and 0 <= s1["baseline"] <= 100
    assert not math.isnan(s1["a12"])

    summary = adapta.report(tmp_path / "out" / "logs", tmp_path / "again")
    assert summary == out["summary"]
    for name in ("table4.csv", "table5.csv", "stats.csv", "summary.txt"):
        assert filecmp.cmp(tmp_path / "out" / "report" / name, tmp_path / "again" / name, shallow=False)


def test_bad_arguments(tmp_path):
    with pytest.raises(adapta.UsageError):
        adapta.gen_data(tmp_path, records=0)
    with pytest.raises(adapta.UsageError):
        adapta.run_experiment(tmp_path / "m.json", tmp_path, scenarios=["s9"])
