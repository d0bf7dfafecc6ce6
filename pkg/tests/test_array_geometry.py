import math

import numpy as np
import pytest

from sbs_toolkit.array_geometry import (
    ArrayConfig,
    Direction,
    angular_distance_deg,
    element_position,
    phase_term,
    steering_matrix,
    steering_vector,
    validate_spacing,
)

from _oracles import steering_entry

LAM = 0.0125
TABLE = ArrayConfig(p=17, b=4, d=0.0149896229, lam=0.012491352416666667)


def test_config_invariants():
    assert TABLE.n_elements == 257
    assert TABLE.elements_per_layer == 16
    with pytest.raises(ValueError):
        ArrayConfig(p=0, b=4, d=0.01, lam=0.01)
    with pytest.raises(ValueError):
        ArrayConfig(p=2, b=0, d=0.01, lam=0.01)
    with pytest.raises(ValueError):
        ArrayConfig(p=2, b=4, d=-1.0, lam=0.01)


def test_direction_wraps_and_validates():
    assert Direction(190.0, 10.0).phi_deg == -170.0
    assert Direction(-180.0, 0.0).phi_deg == -180.0
    assert Direction(180.0, 0.0).phi_deg == -180.0
    with pytest.raises(ValueError):
        Direction(0.0, 90.5)
    with pytest.raises(ValueError):
        Direction(0.0, -1.0)


def test_element_position_reference_values():
    cfg = ArrayConfig(p=3, b=4, d=0.00625, lam=LAM)
    assert np.allclose(element_position(cfg, 0, 0), [0.0, 0.0])
    assert np.allclose(element_position(cfg, 1, 0), [0.00625, 0.0])
    # layer 2, element 4: polar angle pi/2, radius 2d
    assert np.allclose(element_position(cfg, 2, 4), [0.0, 0.0125], atol=1e-12)


def test_element_position_index_errors():
    cfg = ArrayConfig(p=3, b=4, d=0.00625, lam=LAM)
    with pytest.raises(ValueError):
        element_position(cfg, 3, 0)
    with pytest.raises(ValueError):
        element_position(cfg, 0, 1)
    with pytest.raises(ValueError):
        element_position(cfg, 1, 16)


def test_phase_term_reference_values():
    cfg = ArrayConfig(p=3, b=4, d=LAM / 2, lam=LAM)
    boresight = Direction(0.0, 0.0)
    for m, n in ((0, 0), (1, 0), (2, 7)):
        assert phase_term(cfg, m, n, boresight) == pytest.approx(1.0)
    # the reference element sees zero phase from any direction
    assert phase_term(cfg, 0, 0, Direction(123.0, 67.0)) == pytest.approx(1.0)
    # element on the x axis, wave from (0, 90): q.v = d = lam/2 -> exp(-j pi)
    assert phase_term(cfg, 1, 0, Direction(0.0, 90.0)) == pytest.approx(-1.0)


def test_steering_vector_boresight_and_reference_entry():
    a = steering_vector(TABLE, Direction(0.0, 0.0))
    assert np.allclose(a, 1.0)
    for dir_ in (Direction(13.0, 37.0), Direction(-120.0, 45.0)):
        a = steering_vector(TABLE, dir_)
        assert a[0] == 1.0 + 0.0j  # the PFA term is exact


def test_steering_vector_matches_per_element_oracle():
    d = Direction(0.0, 45.0)
    a = steering_vector(TABLE, d)
    idx = 0
    for m in range(TABLE.p):
        for n in range(TABLE.elements_per_layer if m else 1):
            expected = steering_entry(TABLE.lam, TABLE.d, TABLE.b, m, n,
                                      d.phi_deg, d.theta_deg)
            assert a[idx] == pytest.approx(expected, abs=1e-12)
            idx += 1
    assert idx == TABLE.n_elements


def test_unit_modulus_property():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        d = Direction(rng.uniform(-180, 180), rng.uniform(0, 90))
        a = steering_vector(TABLE, d)
        assert np.max(np.abs(np.abs(a) - 1.0)) < 1e-12


def test_rotational_symmetry_permutes_layers():
    rng = np.random.default_rng(11)
    pitch = math.degrees(TABLE.polar_pitch_rad)
    for _ in range(20):
        phi, theta = rng.uniform(-180, 180), rng.uniform(1, 89)
        a = steering_vector(TABLE, Direction(phi, theta))
        rotated = steering_vector(TABLE, Direction(phi + pitch, theta))
        for m in range(1, TABLE.p):
            s = 1 + (m - 1) * 16
            layer, layer_rot = a[s:s + 16], rotated[s:s + 16]
            assert np.allclose(layer_rot, np.roll(layer, 1), atol=1e-9)


def test_conjugate_symmetry():
    rng = np.random.default_rng(13)
    for _ in range(50):
        phi, theta = rng.uniform(-180, 180), rng.uniform(0, 90)
        a = steering_vector(TABLE, Direction(phi, theta))
        mirrored = steering_matrix(TABLE, [Direction(phi + 180.0, theta)])[:, 0]
        assert np.allclose(mirrored, np.conj(a), atol=1e-12)


def test_steering_matrix_contracts():
    d = Direction(10.0, 30.0)
    single = steering_matrix(TABLE, [d])
    assert single.shape == (257, 1)
    assert np.array_equal(single[:, 0], steering_vector(TABLE, d))

    dup = steering_matrix(TABLE, [d, d])
    assert np.array_equal(dup[:, 0], dup[:, 1])

    dirs = [Direction(p, 45.0) for p in (-120.0, -60.0, 0.0, 60.0, 120.0)]
    mat = steering_matrix(TABLE, dirs)
    assert mat.shape == (257, 5)
    assert np.max(np.abs(np.abs(mat) - 1.0)) < 1e-12

    with pytest.raises(ValueError):
        steering_matrix(TABLE, [])


def test_validate_spacing():
    ok = validate_spacing(ArrayConfig(p=17, b=4, d=LAM / 2, lam=LAM))
    assert bool(ok) and "<=" in ok.detail

    too_wide = validate_spacing(ArrayConfig(p=17, b=4, d=LAM, lam=LAM))
    assert not too_wide

    # two elements per layer sit half a turn apart: chord 2d sin(pi/2) = 2d > lam/2
    coarse = validate_spacing(ArrayConfig(p=17, b=1, d=LAM / 2, lam=LAM))
    assert not coarse


def test_angular_distance_wraps():
    a = Direction(179.0, 45.0)
    b = Direction(-179.0, 45.0)
    assert angular_distance_deg(a, b) == pytest.approx(2.0)
    c = Direction(0.0, 44.0)
    assert angular_distance_deg(Direction(0.0, 45.0), c) == pytest.approx(1.0)
