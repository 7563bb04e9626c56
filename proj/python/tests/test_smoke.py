import math

import numpy as np
import pytest

import cscale


def test_catalog_lists_models():
    names = cscale.catalog_names()
    assert {"ball", "disc", "bidisc", "egg", "siegel"} <= set(names)


def test_ball_metric_at_center():
    value, lower, upper = cscale.kobayashi_metric("ball", [0, 0], [1, 0])
    assert value == pytest.approx(1.0, abs=1e-12)
    assert lower <= value <= upper


def test_ball_metric_matches_closed_form_off_center():
    q = np.array([0.3 + 0.1j, -0.2j])
    xi = np.array([0.5, 1.0 - 0.5j])
    value, _, _ = cscale.kobayashi_metric("ball", q, xi)
    assert value == pytest.approx(cscale.ball_metric(q, xi), rel=1e-12)


def test_egg_type():
    assert cscale.order_of_contact("egg", [1, 0], k=3) == 6
    assert cscale.order_of_contact("ball", [1, 0]) == 2


def test_levi_of_ball_is_strongly_pseudoconvex():
    rep = cscale.levi("ball", [1, 0])
    assert rep["classification"] == "strongly_pseudoconvex"


def test_bergman_kernel_centers():
    assert cscale.bergman_kernel("disc", [0], [0]).real == pytest.approx(1 / math.pi, abs=1e-10)
    assert cscale.bergman_kernel("ball", [0, 0], [0, 0]).real == pytest.approx(2 / math.pi**2, abs=1e-10)


def test_ball_curvature():
    s = cscale.sectional_curvature("ball", [0.3, 0.1], [0, 1])
    assert s == pytest.approx(-4 / 3, abs=1e-6)


def test_wu_ball_center_is_identity():
    h = cscale.wu_metric("ball", [0, 0], resolution=16)
    assert np.allclose(h, np.eye(2), atol=1e-6)


def test_poisson_normalization():
    assert cscale.poisson_integral(0.9, 1) == pytest.approx(1.0, abs=1e-10)
    x = np.array([0.5, 0.0])
    y = np.array([1.0, 0.0])
    assert cscale.poisson_ball(x, y) == pytest.approx(1.5 / math.pi / 1.0, rel=1e-12)


def test_run_command_report():
    doc = cscale.run_command("metric", {"domain": "ball", "point": "0,0", "xi": "1,0"})
    assert doc["schema"] == 1
    assert doc["report"]["value"] == pytest.approx(1.0)
    assert doc["config"]["point"] == "0,0"
    assert "timestamp" not in doc


def test_unknown_key_is_rejected():
    with pytest.raises(cscale.CscaleError, match="bogus"):
        cscale.run_command("metric", {"bogus": "1"})


def test_main_exit_codes():
    code, out, _ = cscale.main(["metric", "--domain", "ball", "--point", "0,0", "--xi", "1,0", "--no-timestamp"])
    assert code == 0 and '"schema": 1' in out
    code, _, _ = cscale.main(["nonsense"])
    assert code == 1
