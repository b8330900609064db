import json
import math

import numpy as np
import pytest

import qwork

SCHEDULE = qwork.ProtocolSchedule()
APPARATUS = qwork.ApparatusSpec()
LINEAR = qwork.SpectralSystem.polynomial([[0.0, 1.0], [0.0, -1.0]])


def test_defaults_and_version():
    assert qwork.__version__.count(".") == 2
    assert SCHEDULE.delta == 0.2 and APPARATUS.mass == 1000.0
    cfg = qwork.default_config()
    assert cfg["schedule"]["t_m"] == 4.0
    with pytest.raises(ValueError):
        qwork.ProtocolSchedule(delta=-1.0)


def test_analytic_mixture_and_identities():
    sigma = qwork.sigma_width(APPARATUS, 4.0)
    assert sigma == pytest.approx(math.sqrt(1.0 + 16e-6))
    c = qwork.analytic.work_centers(LINEAR, SCHEDULE)
    assert c[0] == pytest.approx(1.0, abs=1e-10) and c[1] == pytest.approx(-1.0, abs=1e-10)
    grid = np.linspace(-8, 8, 4001)
    d = qwork.analytic.work_distribution(LINEAR, [0.5, 0.5], SCHEDULE, APPARATUS, 4.0, grid)
    expect = 0.5 * (np.exp(-((grid - c[0]) / sigma) ** 2) + np.exp(-((grid - c[1]) / sigma) ** 2)) / (
        math.sqrt(math.pi) * sigma
    )
    assert np.max(np.abs(d["density"] - expect)) < 1e-12
    assert d["integral"] == pytest.approx(1.0, abs=1e-6)

    z = qwork.analytic.partition_function(LINEAR, 1.0, 3.0) / qwork.analytic.partition_function(LINEAR, 1.0, 2.0)
    assert z == pytest.approx(math.cosh(3) / math.cosh(2))
    jar = qwork.analytic.modified_jarzynski(LINEAR, 1.0, SCHEDULE, APPARATUS)
    assert jar > 0
    b = qwork.analytic.second_law_bound(LINEAR, 1.0, SCHEDULE, APPARATUS)
    assert b["holds"] and b["correction"] == pytest.approx(-sigma**2 / 4)
    assert qwork.analytic.crooks_ratio(LINEAR, 1.0, SCHEDULE, 2.0, APPARATUS, 0.3) > 0


def test_spectral_ledger_null():
    rho = np.array([[0.6, 0.2 + 0.1j], [0.2 - 0.1j, 0.4]])
    for conv in ("split", "window", "protocol"):
        l = qwork.thermo.spectral_ledger(LINEAR, rho, SCHEDULE, APPARATUS, conv)
        assert abs(l["dW_int"]) < 1e-8 and abs(l["dQ_int"]) < 1e-8


def test_numeric_qubit_matches_analytic_at_theta_zero():
    q = qwork.DrivenQubit(theta=0.0)
    rho = np.full((2, 2), 0.5, dtype=complex)
    grid = qwork.numeric.qubit_work_grid(q, SCHEDULE, APPARATUS, 1025)
    r = qwork.numeric.run_qubit(q, rho, SCHEDULE, APPARATUS, momentum_points=1024, work_grid=grid)
    a = qwork.analytic.work_distribution(LINEAR, [0.5, 0.5], SCHEDULE, APPARATUS, 4.0, grid)
    assert np.max(np.abs(r["density"] - a["density"])) < 1e-4
    assert r["norm_drift"] < 1e-8
    assert set(r["ledger"]) == {"split", "window", "protocol"}
    assert abs(r["ledger"]["split"]["dW_int"]) < 1e-8


def test_two_point_atoms_sum_to_one():
    q = qwork.DrivenQubit(theta=math.pi / 2)
    atoms = qwork.oracle.two_point_distribution(q, np.diag([1.0, 0.0]).astype(complex), SCHEDULE)
    assert sum(p for _, p in atoms) == pytest.approx(1.0, abs=1e-12)
    assert {round(w) for w, _ in atoms} <= {-5, -1, 1, 5}


def test_run_writes_outputs(tmp_path):
    r = qwork.run("analytic", {"output": {"dir": str(tmp_path)}, "thermal": {"beta": 2.0}})
    assert r["passed"] and r["files"][-1] == "analytic.meta.json"
    meta = json.loads((tmp_path / "analytic.meta.json").read_text())
    assert meta["config"]["thermal"]["beta"] == 2.0
    with pytest.raises(ValueError):
        qwork.run("analytic", {"schedule": {"bogus": 1}})
