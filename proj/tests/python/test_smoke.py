import json

import numpy as np
import pytest

import riemgauss as rg


def test_hpd_distance_and_closed_form():
    x = np.eye(2, dtype=complex)
    y = np.diag([np.e, 1.0]).astype(complex)
    assert rg.hpd_distance(x, y) == pytest.approx(1.0)
    s = 0.8
    assert np.exp(rg.hpd_logZ_closed_form(2, s)) == pytest.approx(np.pi * s**2 * np.expm1(s**2))
    est = rg.hpd_z_montecarlo(2, s, samples=100000, seed=3)
    assert abs(est["log_z"] - rg.hpd_logZ_closed_form(2, s)) < 4 * est["stderr_log_z"]


def test_toeplitz_round_trip():
    alphas = [0.3 + 0.1j, -0.2j, 0.5]
    col = rg.toeplitz_from_coords(2.0, alphas)
    r, back = rg.toeplitz_to_coords(col)
    assert r == pytest.approx(2.0)
    assert np.allclose(back, alphas, atol=1e-12)
    assert rg.toeplitz_distance(1.0, [0, 0, 0], np.e, [0, 0, 0]) == pytest.approx(2.0)


def test_block_round_trip_and_takagi():
    om = np.array([[0.2, 0.1j], [0.1j, -0.3]])
    t = rg.block_from_coords(1.5, [0.2], [om])
    r, alphas, omegas = rg.block_to_coords(t, 2)
    assert r == pytest.approx(1.5)
    assert np.allclose(omegas[0], om, atol=1e-10)
    theta, s = rg.takagi(om)
    assert np.allclose(theta @ np.diag(s) @ theta.T, om, atol=1e-12)
    assert rg.siegel_distance(np.zeros((2, 2)), om) > 0


def test_fit_mixture_classify_pipeline():
    table = rg.build_ztable("toeplitz:3")
    params = {
        "schema_version": "1.0",
        "kind": "gaussian_params",
        "manifold": "toeplitz:3",
        "center": {"r": 1.0, "alphas": [[0.2, 0.0], [0.0, 0.1]]},
        "sigma": 0.3,
    }
    data = rg.sample(json.dumps(params), 400, seed=5)
    assert rg.sample(json.dumps(params), 400, seed=5) == data
    fit = json.loads(rg.fit(data, table))
    assert abs(fit["sigma"] - 0.3) < 0.05
    model, k, bics = rg.mixture(data, table, kmax=2, seed=1)
    assert k in (1, 2) and len(bics) == 2
    labels = rg.classify(data, model, table)
    assert len(labels) == 400


def test_errors_map_to_python_exceptions():
    with pytest.raises(ValueError):
        rg.toeplitz_distance(1.0, [1.5], 1.0, [0.0])
    with pytest.raises(ValueError):
        rg.build_ztable("nonsense:3")
    rc, out, err = rg.run_cli(["fit", "--data", "/nonexistent.json", "--ztable", "x", "--out", "y"])
    assert rc == 4 and "cannot open" in err
