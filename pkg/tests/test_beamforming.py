import math

import numpy as np
import pytest

from sbs_toolkit.array_geometry import ArrayConfig, Direction, steering_matrix
from sbs_toolkit.beamforming import (
    BeamPattern,
    BeamSpec,
    azimuth_cut,
    beam_pattern,
    build_weight_matrix,
    combiner_objective,
    compare_with_superposition,
    cross_cuts,
    desired_response,
    full_grid,
    measure_beamwidth,
    single_beam_weights,
    solve_joint_combiner,
    superposition_weights,
)
from sbs_toolkit.errors import NumericalError

LAM = 0.012491352416666667
ARRAY = ArrayConfig(p=17, b=4, d=1.2 * LAM, lam=LAM)
FIVE_BEAMS = BeamSpec(
    fdb=Direction(0.0, 45.0),
    dcbs=tuple(Direction(p, 45.0) for p in (-120.0, -60.0, 60.0, 120.0)),
    beta=0.01,
)


def test_beam_spec_validation():
    with pytest.raises(ValueError):
        BeamSpec(Direction(0, 45), (Direction(0, 45),))
    with pytest.raises(ValueError):
        BeamSpec(Direction(0, 45), beta=-1.0)
    assert FIVE_BEAMS.n_dcb == 4
    assert FIVE_BEAMS.directions[0] is FIVE_BEAMS.fdb


def test_single_beam_normalization():
    w = single_beam_weights(ARRAY, Direction(0.0, 0.0))
    assert np.allclose(w, np.ones(257) / 257)
    rng = np.random.default_rng(3)
    for _ in range(20):
        d = Direction(rng.uniform(-180, 180), rng.uniform(0, 90))
        w = single_beam_weights(ARRAY, d)
        a = steering_matrix(ARRAY, [d])[:, 0]
        assert abs(np.conj(w) @ a - 1.0) < 1e-9


def test_single_beam_peaks_at_its_direction():
    target = Direction(0.0, 45.0)
    w = single_beam_weights(ARRAY, target)
    grid = full_grid(1.0, 1.0)
    amps = np.abs(np.conj(w) @ steering_matrix(ARRAY, grid))
    best = grid[int(np.argmax(amps))]
    assert abs(best.phi_deg - target.phi_deg) < 1e-9
    assert abs(best.theta_deg - target.theta_deg) < 1e-9


def test_desired_response_placement():
    grid = azimuth_cut(45.0, 1.0)
    lone = desired_response(BeamSpec(Direction(10.0, 45.0)), grid)
    assert lone.values.sum() == 1.0

    resp = desired_response(FIVE_BEAMS, grid)
    assert resp.values.sum() == 5.0
    ones = [grid[i].phi_deg for i in np.flatnonzero(resp.values)]
    assert sorted(ones) == [-120.0, -60.0, 0.0, 60.0, 120.0]

    # snapping tolerance is half a grid cell
    snapped = desired_response(BeamSpec(Direction(10.4, 45.0)), grid)
    assert grid[int(np.argmax(snapped.values))].phi_deg == 10.0
    with pytest.raises(ValueError):
        desired_response(BeamSpec(Direction(10.0, 44.0)), grid)  # off-cut pitch


def test_weight_matrix_layout():
    solo = build_weight_matrix(ARRAY, BeamSpec(Direction(0, 45)))
    assert solo.shape == (257, 1)

    W = build_weight_matrix(ARRAY, FIVE_BEAMS)
    assert W.shape == (257, 5)
    A = steering_matrix(ARRAY, FIVE_BEAMS.directions)
    for i in range(5):
        assert abs(np.conj(W[:, i]) @ A[:, i] - 1.0) < 1e-9
    assert np.array_equal(W[:, 0], single_beam_weights(ARRAY, FIVE_BEAMS.fdb))


def _solve(spec, grid, beta):
    W = build_weight_matrix(ARRAY, spec)
    D = steering_matrix(ARRAY, grid)
    resp = desired_response(spec, grid)
    return W, D, resp, solve_joint_combiner(W, D, resp, beta)


def test_huge_regularisation_shrinks_combiner():
    grid = azimuth_cut(45.0, 1.0)
    _, _, _, sol = _solve(FIVE_BEAMS, grid, beta=1e12)
    assert np.linalg.norm(sol.f_w) < 1e-6


def test_single_beam_least_squares_is_exact():
    # one beam, the grid holding only its direction: f = 1 analytically
    spec = BeamSpec(Direction(0.0, 45.0))
    grid = (spec.fdb,)
    W, D, resp, sol = _solve(spec, grid, beta=0.0)
    a = D[:, 0]
    assert abs(abs(np.conj(sol.w_opt) @ a) - 1.0) < 0.05
    assert abs(sol.f_w[0] - 1.0) < 1e-9


def test_solution_dominates_superposition():
    grid = azimuth_cut(45.0, 1.0)
    W, D, resp, sol = _solve(FIVE_BEAMS, grid, FIVE_BEAMS.beta)
    sup = combiner_objective(W, D, resp, FIVE_BEAMS.beta,
                             np.ones(5, dtype=complex))
    assert sol.objective <= sup + 1e-12
    assert sol.optimality_residual <= 1e-8 * (1.0 + np.linalg.norm(sol.f_w))
    assert np.allclose(sol.w_opt, W @ sol.f_w)


def test_gradient_matches_finite_differences():
    grid = azimuth_cut(45.0, 1.0)
    W = build_weight_matrix(ARRAY, FIVE_BEAMS)
    D = steering_matrix(ARRAY, grid)
    resp = desired_response(FIVE_BEAMS, grid)
    beta = FIVE_BEAMS.beta
    G = np.conj(W.T) @ D
    normal = G @ np.conj(G.T) + beta * (np.conj(W.T) @ W)
    rhs = G @ resp.values

    f0 = np.ones(5, dtype=complex)
    analytic = 2.0 * (normal @ f0 - rhs)
    h = 1e-6
    for k in range(5):
        for part, grad_part in ((1.0, analytic[k].real), (1j, analytic[k].imag)):
            e = np.zeros(5, dtype=complex)
            e[k] = part * h
            fd = (combiner_objective(W, D, resp, beta, f0 + e)
                  - combiner_objective(W, D, resp, beta, f0 - e)) / (2 * h)
            assert fd == pytest.approx(grad_part, rel=1e-4, abs=1e-8)

    # at the optimum the finite-difference gradient is at the noise floor
    sol = solve_joint_combiner(W, D, resp, beta)
    e = np.zeros(5, dtype=complex)
    e[0] = h
    fd = (combiner_objective(W, D, resp, beta, sol.f_w + e)
          - combiner_objective(W, D, resp, beta, sol.f_w - e)) / (2 * h)
    assert abs(fd) < 1e-5 * (1.0 + np.linalg.norm(sol.f_w))


def test_regularisation_monotonically_shrinks_f():
    grid = azimuth_cut(45.0, 1.0)
    norms = []
    for beta in (0.0, 0.01, 0.1, 1.0, 10.0):
        _, _, _, sol = _solve(FIVE_BEAMS, grid, beta)
        norms.append(np.linalg.norm(sol.f_w))
    assert all(n1 >= n2 - 1e-12 for n1, n2 in zip(norms, norms[1:]))


def test_singular_normal_matrix_reports_condition():
    W = build_weight_matrix(ARRAY, FIVE_BEAMS)
    W = np.concatenate([W, W[:, :1]], axis=1)  # duplicated beam column
    grid = azimuth_cut(45.0, 1.0)
    D = steering_matrix(ARRAY, grid)
    resp = desired_response(FIVE_BEAMS, grid)
    with pytest.raises(NumericalError, match="condition"):
        solve_joint_combiner(W, D, resp, beta=0.0)


def test_pattern_reference_level_and_single_point():
    d = Direction(30.0, 45.0)
    w = single_beam_weights(ARRAY, d)
    pat = beam_pattern(ARRAY, w, [d])
    assert pat.gain_db[0] == pytest.approx(0.0, abs=1e-9)

    rng = np.random.default_rng(5)
    w_rand = rng.standard_normal(257) + 1j * rng.standard_normal(257)
    pat = beam_pattern(ARRAY, w_rand, [Direction(0.0, 10.0)])
    assert pat.gain_db.shape == (1,) and np.isfinite(pat.gain_db[0])
    with pytest.raises(ValueError):
        beam_pattern(ARRAY, w, [])


def test_joint_pattern_peaks_near_every_beam():
    comp = compare_with_superposition(ARRAY, FIVE_BEAMS)
    assert np.all(comp.local_max_dist_deg <= 1.0)
    # global argmax of the joint cut lies within 1 deg of some beam
    cut = azimuth_cut(45.0, 0.1)
    sol_pat = beam_pattern(ARRAY, comp.solution.w_opt, cut)
    peak_phi = cut[int(np.argmax(sol_pat.gain_db))].phi_deg
    assert min(abs(peak_phi - d.phi_deg) for d in FIVE_BEAMS.directions) <= 1.0


def test_measure_beamwidth_on_synthetic_lobe():
    # amplitude cos(a*x) around the peak: half power at x = +-pi/(4a)
    center = Direction(0.0, 45.0)
    a = 0.25  # radians of phase per degree of offset
    grid = cross_cuts(center, 10.0, 0.05)
    gains = []
    for g in grid:
        dx = math.hypot(g.phi_deg - center.phi_deg, g.theta_deg - center.theta_deg)
        amp = max(math.cos(a * dx), 1e-6)
        gains.append(20.0 * math.log10(amp))
    pat = BeamPattern(grid, np.array(gains))
    dth, dph = measure_beamwidth(pat, center)
    expected = 2.0 * math.pi / (4.0 * a)  # degrees, since a is per-degree
    assert dth == pytest.approx(expected, abs=0.05)
    assert dph == pytest.approx(expected, abs=0.05)
    assert dth == pytest.approx(dph, abs=0.05)  # symmetric lobe, symmetric widths

    with pytest.raises(ValueError):
        measure_beamwidth(pat, Direction(0.0, 52.0))  # near the cut edge


def test_fdb_widths_within_published_band():
    comp = compare_with_superposition(ARRAY, FIVE_BEAMS)
    dth, dph = comp.fdb_width_deg
    assert 1.0 <= dth <= 3.0
    assert 2.0 <= dph <= 4.0
