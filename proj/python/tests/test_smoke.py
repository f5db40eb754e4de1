import math

import numpy as np
import pytest

import hocm


def one_point(name, xi):
    cfg = hocm.builtin_config(name)
    cfg["xi"] = {"start": xi, "stop": xi, "step": 0.1}
    cfg["threads"] = 1
    return cfg


def test_builtins_listed():
    names = hocm.builtin_names()
    assert "fig2b" in names and "original2mode" in names
    cfg = hocm.builtin_config("fig2d")
    assert cfg["cutoffs"] == {"a": 64, "b": 128, "p": 64}


def test_algebra():
    assert hocm.normal_order("a^2*a'^2") == "2 + 4*a'*a + 1*a'^2*a^2"
    assert hocm.commutator("a", "a'") == "1"
    assert hocm.required_pump_cutoff(5.0) == 62


def test_scan_single_point():
    r = hocm.scan(one_point("fig2b", 0.5), refine=False)
    r12 = [row for row in r["rows"] if row["vector"] == "R12"]
    assert len(r12) == 7
    assert all(row["nu_min"] < 0 and row["verdict"] == "entangled" for row in r12)
    assert r["thresholds"] == []
    (p,) = r["points"]
    assert math.isclose(p["n_b"], 2 * p["n_a"], rel_tol=1e-9)


def test_vacuum_is_separable_or_undecided():
    r = hocm.scan(one_point("fig2d", 0.0), refine=False)
    assert all(row["nu_min"] >= -1e-8 and row["verdict"] != "entangled" for row in r["rows"])


def test_ppt_vacuum_covariance():
    v = 0.25 * np.eye(4)
    omega = np.kron(np.eye(2), np.array([[0.0, 0.5], [-0.5, 0.0]]))
    out = hocm.ppt_min_eig(v, omega, "Q{1 x}; P{1 x}; Q{1 y}; P{1 y}", "x|y", ["x", "y"])
    assert abs(out["nu_min"]) < 1e-12
    assert not out["entangled"]


def test_errors():
    cfg = hocm.builtin_config("fig2b")
    cfg["cutoffs"]["p"] = 60
    with pytest.raises(hocm.ConfigError, match="62"):
        hocm.scan(cfg)
    with pytest.raises(ValueError):
        hocm.builtin_config("fig9")
    with pytest.raises(hocm.AlgebraError):
        hocm.commutator("a +", "a")
