"""Monte Carlo verification of the closed-form bin-error statistics.

The closed-form expressions model the peak search as one coherently
integrated signal bin of amplitude L*A_s competing against L-1 independent
interference amplitudes of (L/2pi) * Rayleigh(sigma_n^2 + sigma_i^2), the
worst-phase projection of the noise-plus-clutter term.  This module samples
exactly that decision problem, per subcarrier for the velocity axis and per
symbol for the range axis, so the empirical correct-bin rate and RMSE are
directly comparable to the theory columns.

Trials are independent given the seed-splitting rule: the master seed is
split with numpy's SeedSequence into one child per sweep point, and each
child spawns one stream per axis.  Results are therefore identical no matter
how the sweep points are distributed across workers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ofdm_isac import (
    OfdmConfig,
    p_correct_bin,
    rmse_range_theory,
    rmse_velocity_theory,
)

_CHUNK_ROWS = 1 << 16


@dataclass(frozen=True)
class McPoint:
    """One sweep point of the Monte Carlo vs theory comparison."""

    gamma_db: float
    rmse_range_mc: float
    rmse_range_theory: float
    rmse_vel_mc: float
    rmse_vel_theory: float
    p_correct_mc: float            # velocity axis (symbol-count exponent)
    p_correct_theory: float
    p_correct_range_mc: float
    p_correct_range_theory: float
    decisions_vel: int
    decisions_range: int


def decision_bins(
    sinr: float,
    length: int,
    true_bin: int,
    n_decisions: int,
    rng: np.random.Generator,
    amplitude: float = 1.0,
) -> np.ndarray:
    """Winning bin of the modelled peak search for `n_decisions` slices.

    The true bin carries the deterministic statistic length*amplitude; every
    other bin draws (length/2pi) * Rayleigh with per-quadrature variance
    sigma_n^2 + sigma_i^2 = amplitude^2 / (2*sinr).
    """
    if not 0 <= true_bin < length:
        raise ValueError(f"true bin {true_bin} outside [0, {length})")
    if sinr <= 0:
        raise ValueError("SINR must be > 0")
    scale = np.sqrt(amplitude ** 2 / (2.0 * sinr))
    signal_stat = length * amplitude
    wins = np.empty(n_decisions, dtype=np.int64)
    done = 0
    while done < n_decisions:
        m = min(_CHUNK_ROWS, n_decisions - done)
        competitors = rng.rayleigh(scale=scale, size=(m, length - 1))
        competitors *= length / (2.0 * np.pi)
        best = competitors.argmax(axis=1)
        best_val = competitors[np.arange(m), best]
        # competitor indices skip the true bin
        best = np.where(best >= true_bin, best + 1, best)
        wins[done:done + m] = np.where(best_val > signal_stat, best, true_bin)
        done += m
    return wins


def run_point(
    cfg: OfdmConfig,
    gamma_db: float,
    v_true: float,
    r_true: float,
    trials: int,
    seed_seq: np.random.SeedSequence,
) -> McPoint:
    """Monte Carlo vs theory at one SINR for both estimation axes.

    Truths are snapped on-grid; each trial contributes one velocity decision
    per subcarrier and one range decision per symbol, mirroring the
    per-slice structure of the divide-then-transform estimator.  The theory
    is stated for unpadded transforms, so padded configurations are refused.
    """
    if cfg.m_dft != cfg.m_symbols or cfg.n_idft != cfg.n_subcarriers:
        raise ValueError(
            "the bin-error theory assumes unpadded transforms; "
            "use m_dft == m_symbols and n_idft == n_subcarriers"
        )
    gamma = 10.0 ** (gamma_db / 10.0)
    m, n = cfg.m_symbols, cfg.n_subcarriers
    k_v, v_snap = cfg.snap_velocity(v_true)
    k_r, r_snap = cfg.snap_range(r_true)
    vel_seq, rng_seq = seed_seq.spawn(2)

    vel_bins = decision_bins(gamma, m, k_v, trials * n,
                             np.random.default_rng(vel_seq))
    rng_bins = decision_bins(gamma, n, k_r, trials * m,
                             np.random.default_rng(rng_seq))

    v_vals = vel_bins * cfg.velocity_bin_width
    r_vals = rng_bins * cfg.range_bin_width
    return McPoint(
        gamma_db=gamma_db,
        rmse_range_mc=float(np.sqrt(np.mean((r_vals - r_snap) ** 2))),
        rmse_range_theory=rmse_range_theory(r_snap, gamma, n),
        rmse_vel_mc=float(np.sqrt(np.mean((v_vals - v_snap) ** 2))),
        rmse_vel_theory=rmse_velocity_theory(v_snap, gamma, m),
        p_correct_mc=float(np.mean(vel_bins == k_v)),
        p_correct_theory=p_correct_bin(gamma, m),
        p_correct_range_mc=float(np.mean(rng_bins == k_r)),
        p_correct_range_theory=p_correct_bin(gamma, n),
        decisions_vel=trials * n,
        decisions_range=trials * m,
    )


def run_sweep(
    cfg: OfdmConfig,
    gammas_db,
    v_true: float,
    r_true: float,
    trials: int,
    seed: int,
) -> list:
    """Deterministic SINR sweep; one spawned seed per point, merged in order."""
    gammas_db = list(gammas_db)
    children = np.random.SeedSequence(seed).spawn(len(gammas_db))
    return [
        run_point(cfg, g, v_true, r_true, trials, child)
        for g, child in zip(gammas_db, children)
    ]


def binomial_band(p: float, n: int, z: float = 2.5758) -> float:
    """Half-width of the z-sigma binomial band around probability p."""
    return float(z * np.sqrt(max(p * (1.0 - p), 0.0) / n))
