import math

import numpy as np
import pytest

import fuelgeo


def test_haversine_quarter_meridian():
    assert fuelgeo.haversine_km(0.0, 0.0, 90.0, 0.0) == pytest.approx(math.pi * 6371.0 / 2, rel=1e-12)


def test_moran_two_point_antisymmetric():
    i = fuelgeo.moran_index([1.0, -1.0], [40.0, 40.0], [-100.0, -99.9], d0=10.0)
    assert i == pytest.approx(-1.0, abs=1e-12)


def test_gwr_step_global_is_ols():
    rng = np.random.default_rng(3)
    n = 60
    lat = rng.uniform(35, 40, n)
    lon = rng.uniform(-100, -94, n)
    x = rng.normal(size=(n, 2))
    y = 1.0 + x @ np.array([0.5, -2.0]) + 0.1 * rng.normal(size=n)
    fit = fuelgeo.gwr_fit(lat.tolist(), lon.tolist(), x, y, ["income", "wage_per_job"],
                          kernel="step", mode="fixed", bandwidth=1e5)
    design = np.column_stack([np.ones(n), x])
    beta = np.linalg.lstsq(design, y, rcond=None)[0]
    assert np.max(np.abs(fit["local_coefficients"] - beta)) < 1e-8
    assert fit["hat_trace"] == pytest.approx(3.0, abs=1e-6)
    assert fit["coefficient_names"][0] == "intercept"


def test_bandwidth_search_returns_trace():
    rng = np.random.default_rng(5)
    n = 40
    lat = rng.uniform(35, 40, n)
    lon = rng.uniform(-100, -94, n)
    x = rng.normal(size=(n, 1))
    y = 2.0 + (1.0 + 0.1 * (lon + 97)) * x[:, 0] + 0.2 * rng.normal(size=n)
    full = fuelgeo.optimize_bandwidth(lat.tolist(), lon.tolist(), x, y, ["income"], exhaustive=True)
    assert min(s for _, s in full["trace"]) == pytest.approx(full["score"])
    assert 3 <= full["bandwidth"] <= n - 1


def test_rank_and_decomposition():
    assert fuelgeo.spearman_rank([1, 2, 3, 4], [10, 20, 30, 40]) == pytest.approx(1.0)
    v = fuelgeo.variance_decomposition([1.0, 2.0, 3.0, 10.0], ["a", "a", "b", "b"])
    assert v["total"] == pytest.approx(v["between"] + v["within"])
    share = fuelgeo.pca_variance_explained(np.random.default_rng(1).normal(size=(50, 3)))
    assert sum(share) == pytest.approx(1.0)


def test_price_records_and_errors():
    rows, quarantined = fuelgeo.parse_price_records(
        "S1|2017-01-10T08:00:00Z|Regular|Credit|2.19\nS2|2017-01-10T08:00:00Z|Regular|Credit|0.05\n", "u")
    assert rows[0]["price"] == 2.19
    assert quarantined == [(2, "below plausibility band")]
    with pytest.raises(fuelgeo.FuelgeoError):
        fuelgeo.parse_price_records("broken|line", "u")
    with pytest.raises(fuelgeo.FuelgeoError):
        fuelgeo.moran_index([2.28, 2.28, 2.28], [40, 40.1, 40.2], [-100, -100, -100])


def test_cli_exit_codes(tmp_path):
    assert fuelgeo.run_cli(["synth", "--out", str(tmp_path / "fx")]) == 0
    assert (tmp_path / "fx" / "truth.json").exists()
    assert fuelgeo.run_cli(["frobnicate"]) == 1
