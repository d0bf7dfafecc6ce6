import numpy as np
import pytest

from sbs_toolkit.ofdm_isac import OfdmConfig, p_correct_bin
from sbs_toolkit.radar_mc import binomial_band, decision_bins, run_point, run_sweep

DESK = OfdmConfig(m_symbols=64, n_subcarriers=256, delta_f=90909.0, f_c=24e9)


def test_decision_bins_basics():
    rng = np.random.default_rng(1)
    wins = decision_bins(sinr=100.0, length=64, true_bin=17, n_decisions=500, rng=rng)
    assert wins.shape == (500,)
    assert np.all(wins == 17)  # at huge SINR every decision is correct

    rng = np.random.default_rng(2)
    wins = decision_bins(sinr=1e-6, length=64, true_bin=17, n_decisions=2000, rng=rng)
    wrong = wins[wins != 17]
    assert wrong.size > 1900  # at vanishing SINR nearly every decision is wrong
    assert np.all((wrong >= 0) & (wrong < 64))

    with pytest.raises(ValueError):
        decision_bins(1.0, 64, 64, 10, rng)
    with pytest.raises(ValueError):
        decision_bins(0.0, 64, 0, 10, rng)


def test_wrong_bins_spread_uniformly():
    rng = np.random.default_rng(3)
    length, k = 16, 5
    wins = decision_bins(sinr=1e-9, length=length, true_bin=k,
                         n_decisions=60000, rng=rng)
    counts = np.bincount(wins, minlength=length)
    assert counts[k] < 60  # essentially never correct
    others = np.delete(counts, k)
    expected = 60000 / (length - 1)
    sigma = np.sqrt(60000 * (1 / (length - 1)) * (1 - 1 / (length - 1)))
    assert np.all(np.abs(others - expected) < 4 * sigma)


def test_point_matches_theory_bands():
    seq = np.random.SeedSequence(77)
    pt = run_point(DESK, -8.0, 17 * DESK.velocity_bin_width,
                   72 * DESK.range_bin_width, trials=300, seed_seq=seq)
    band_v = binomial_band(pt.p_correct_theory, pt.decisions_vel)
    assert abs(pt.p_correct_mc - pt.p_correct_theory) <= band_v
    band_r = binomial_band(pt.p_correct_range_theory, pt.decisions_range)
    assert abs(pt.p_correct_range_mc - pt.p_correct_range_theory) <= band_r
    assert pt.p_correct_theory == pytest.approx(p_correct_bin(10 ** -0.8, 64))
    assert pt.rmse_vel_mc == pytest.approx(pt.rmse_vel_theory, rel=0.25)
    assert pt.rmse_range_mc == pytest.approx(pt.rmse_range_theory, rel=0.25)


def test_padded_configs_are_refused():
    padded = OfdmConfig(64, 256, 90909.0, 24e9, m_dft=640)
    with pytest.raises(ValueError, match="unpadded"):
        run_point(padded, -8.0, 100.0, 400.0, 10, np.random.SeedSequence(0))


def test_sweep_is_deterministic_and_ordered():
    gammas = [-9.0, -7.0, -5.0]
    a = run_sweep(DESK, gammas, 134.1, 463.7, trials=50, seed=123)
    b = run_sweep(DESK, gammas, 134.1, 463.7, trials=50, seed=123)
    assert [pt.gamma_db for pt in a] == gammas
    for x, y in zip(a, b):
        assert x == y
    c = run_sweep(DESK, gammas, 134.1, 463.7, trials=50, seed=124)
    assert any(x != y for x, y in zip(a, c))
