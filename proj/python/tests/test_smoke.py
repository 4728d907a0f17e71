import numpy as np
import pytest

import photonstore as ps


def test_backward_mode_matches_kernel():
    r = ps.optimal_backward_mode(10.0)
    assert 0.8 < r["efficiency"] < 0.85
    assert ps.retrieval_efficiency(r["mode"], 10.0) == pytest.approx(r["efficiency"], abs=1e-4)


def test_flat_wave_efficiency_grows_with_d():
    flat = np.ones(201, dtype=complex)
    assert ps.retrieval_efficiency(flat, 1.0) < ps.retrieval_efficiency(flat, 10.0)


def test_fast_retrieve_energy():
    s = np.sqrt(3.0) * np.linspace(0.0, 1.0, 201).astype(complex)
    t, e = ps.fast_retrieve(s, 10.0, t_win=10.0, nt=4001)
    trapezoid = getattr(np, "trapezoid", None) or np.trapz
    assert trapezoid(np.abs(e) ** 2, t) == pytest.approx(ps.retrieval_efficiency(s, 10.0), abs=1e-3)


def test_invalid_depth_raises():
    with pytest.raises(ValueError):
        ps.breakdown_efficiency(0.0, 0.0, 10.0)


def test_run_config(tmp_path):
    code, log = ps.run_config("optimize-mode", "[params]\nd = 10\n", tmp_path, "fast")
    assert code == 0, log
    assert (tmp_path / "optimize_mode.csv").exists()
    code, log = ps.run_config("store", "[params]\nd = -1\n", tmp_path)
    assert code == 1
