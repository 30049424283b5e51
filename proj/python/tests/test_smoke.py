import math

import numpy as np
import pytest

import ftecdi


def test_equilibrium_charge_efficiency():
    p = ftecdi.CellParams()
    hi = ftecdi.equilibrium(p, 1.2, 5.0)
    lo = ftecdi.equilibrium(p, 0.2, 5.0)
    assert abs(hi["charge_efficiency"] - 0.7) <= 0.15
    assert lo["charge_efficiency"] <= 0.25
    assert math.isnan(ftecdi.equilibrium(p, 0.0, 5.0)["charge_efficiency"])


def test_sweep_is_monotone():
    points = ftecdi.sweep(ftecdi.CellParams(), [0.2, 0.6, 1.0], 5.0)
    lam = [pt["charge_efficiency"] for pt in points]
    assert all(pt["ok"] for pt in points)
    assert lam == sorted(lam)


def test_closure_round_trip():
    s = ftecdi.state_from_charge(5.0, 30.0)
    back = ftecdi.state_from_potential(5.0, s["dphi_d"] + s["dphi_s"])
    assert back["sigma_ionic"] == pytest.approx(30.0, rel=1e-9)
    assert ftecdi.zero_charge_state(5.0)["sigma_ionic"] == 0.0


def test_parameters_are_writable():
    p = ftecdi.CellParams()
    p.attraction_energy = 0.0
    p.stern_capacitance = math.inf
    vt = 8.314462618 * 298.15 / 96485.33212
    lam = ftecdi.equilibrium(p, 0.4, 5.0)["charge_efficiency"]
    assert lam == pytest.approx(math.tanh(0.4 / (4 * vt)), rel=1e-10)
    assert 20 <= ftecdi.peclet(ftecdi.CellParams()) <= 35


def test_short_cycle():
    spec = ftecdi.CycleSpec()
    spec.v_ch = 0.6
    r = ftecdi.simulate(ftecdi.CellParams(), spec, n_electrode=8, n_spacer=3)
    assert r["complete"]
    t = r["t"]
    assert isinstance(t, np.ndarray)
    assert np.all(np.diff(t) > 0)
    assert r["c_outlet"].min() < 5.0 < r["c_outlet"].max()
    assert r["charge_stored"] == pytest.approx(r["charge_in"], rel=0.01)


def test_fit_from_truth():
    p = ftecdi.CellParams()
    rows = []
    for c in (5.0, 20.0):
        for v in (0.4, 0.8, 1.2):
            e = ftecdi.equilibrium(p, v, c)
            rows.append((v, c, e["charge"], e["eq_sac"]))
    fit = ftecdi.fit_equilibrium(p, rows, ftecdi.ElectrodeFit())
    assert fit["residual_norm"] < 1e-8
    assert fit["params"].attraction_energy == pytest.approx(700.0, rel=1e-6)


def test_errors_map_to_python():
    with pytest.raises(ftecdi.ConfigError):
        ftecdi.equilibrium(ftecdi.CellParams(), -1.0, 5.0)
    with pytest.raises(ValueError):
        ftecdi.equilibrium(ftecdi.CellParams(), 1.0, 0.0)
