import math

import pytest

import mather_twist as mt


def test_standard_partials():
    h = mt.GeneratingFunction.standard(1.0)
    d1, d2, d11, d12, d22 = h.partials(0.1, 0.4)
    assert d2 == pytest.approx(0.3)
    assert d1 == pytest.approx(-0.3 + math.sin(0.2 * math.pi) / (2 * math.pi))
    assert d12 == -1.0
    assert h(0.0, 0.0) == pytest.approx(-1.0 / (4 * math.pi**2))


def test_forward_matches_standard_map():
    k = 0.9
    h = mt.GeneratingFunction.standard(k)
    x, y = 0.3, 0.2
    # y = -d1 h gives y' = y + (k / 2 pi) sin 2 pi x, x' = x + y'
    yn = y + k / (2 * math.pi) * math.sin(2 * math.pi * x)
    xp, yp = mt.forward(h, x, y)
    assert xp == pytest.approx(x + yn, abs=1e-10)
    assert yp == pytest.approx(yn, abs=1e-10)


def test_periodic_minimizer_and_rotation():
    h = mt.GeneratingFunction.standard(0.3)
    res = mt.minimize_periodic(h, 2, 5)
    assert res["residual_inf"] <= 1e-9
    assert mt.rotation_number(res["xs"]) == pytest.approx(0.4, abs=0)


def test_closed_form_barrier():
    h = mt.GeneratingFunction.standard(1.0)
    grid, values = mt.peierls_barrier(h, 0, 1, 64)
    err = max(abs(v - (1 - math.cos(2 * math.pi * a)) / (4 * math.pi**2)) for a, v in zip(grid, values))
    assert err <= 1e-8


def test_golden_convergents():
    assert mt.convergents(mt.GOLDEN_MEAN, 4) == [(1, 2), (2, 3), (3, 5), (5, 8)]


def test_beta_and_alpha_integrable():
    h = mt.GeneratingFunction.standard(0.0)
    for p, q, b in mt.beta_grid(h, 5):
        assert b == pytest.approx(0.5 * (p / q) ** 2, abs=1e-8)
    assert mt.alpha(h, [0.4], 5)[0] == pytest.approx(0.08, abs=1e-8)


def test_connect_integrable_obstruction():
    h = mt.GeneratingFunction.standard(0.0)
    r = mt.connect(h, [(1, 2), (1, 3)], [20, 20])
    assert r["verdict"] == "obstruction"
    assert min(r["joint_residuals"]) > 1e-3


def test_usage_errors():
    with pytest.raises(ValueError):
        mt.GeneratingFunction.standard(-1.0)
    with pytest.raises(ValueError):
        mt.minimize_periodic(mt.GeneratingFunction.standard(1.0), 2, 4)


def test_cli_roundtrip(tmp_path):
    cfg = tmp_path / "k1.cfg"
    cfg.write_text('family = "standard"\nk = 1.0\n')
    code, out, err = mt.cli(["validate", "--config", str(cfg), "--out", str(tmp_path)])
    assert code == 0, err
    code, _, _ = mt.cli(["barrier", "--config", str(cfg), "--p", "0", "--q", "1", "--out", str(tmp_path)])
    assert code == 0
    lines = (tmp_path / "barrier.csv").read_text().splitlines()
    assert lines[0] == "a,value"
    assert max(float(l.split(",")[1]) for l in lines[1:]) == pytest.approx(0.05066059, abs=1e-8)
    code, _, err = mt.cli(["nonsense"])
    assert code == 1
