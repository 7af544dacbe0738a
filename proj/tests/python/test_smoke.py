import json
import math

import numpy as np
import pytest

import homctl
from homctl import scenarios


@pytest.fixture(scope="module")
def ft():
    plant = scenarios.ft_plant_variant()
    h = homctl.solve_homogenization(plant, -0.1)
    return plant, h, homctl.synthesize_common(plant, h, 2.0)


def test_printed_plant_has_no_common_homogenization():
    with pytest.raises(homctl.InfeasibleError):
        homctl.solve_homogenization(scenarios.ft_plant(), -0.1)


def test_homogenization_residuals(ft):
    _, h, _ = ft
    assert max(h.residuals.sylvester) < 1e-8
    assert np.allclose(np.linalg.matrix_power(h.A0[0], 4), 0.0, atol=1e-8)


def test_norm_is_homogeneous(ft):
    _, h, c = ft
    x = np.array([1.0, -0.5, 0.2, 0.3])
    v = homctl.canonical_norm(x, c)
    from scipy.linalg import expm

    s = 0.7
    assert homctl.canonical_norm(expm(s * h.Gd) @ x, c) == pytest.approx(math.exp(s) * v, rel=1e-8)
    pi = homctl.projector(x, c)
    assert pi @ c.modes[0].P @ pi == pytest.approx(1.0, rel=1e-9)


def test_simulation_settles(ft):
    plant, _, c = ft
    traj = homctl.integrate(plant, c, scenarios.demo_switching(), scenarios.ft_x0(), 10.0, 1e-3)
    assert traj.states.shape == (len(traj), 4)
    assert traj.vnorm[0] > 1.0
    ts = homctl.settling_time(traj, 1e-6)
    assert ts is not None and ts < 10.0


def test_verify_report(ft):
    plant, _, c = ft
    report = homctl.verify(plant, c, "homog,lmi")
    assert report["pass"] is True
    with pytest.raises(homctl.ParseError):
        homctl.verify(plant, c, "nonsense")


def test_controller_round_trip(ft, tmp_path):
    _, _, c = ft
    path = tmp_path / "ctrl.json"
    homctl.save_controller(c, path)
    back = homctl.load_controller(path)
    assert np.array_equal(back.modes[1].K, c.modes[1].K)
    assert json.loads(path.read_text())["mu"] == pytest.approx(-0.1)


def test_bad_rho_is_precondition_error(ft):
    plant, h, _ = ft
    with pytest.raises(homctl.PreconditionError):
        homctl.synthesize_common(plant, h, -1.0)
