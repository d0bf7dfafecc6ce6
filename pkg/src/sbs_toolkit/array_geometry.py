"""Geometry of the SBS double circular uniform antenna array.

The array has ``p`` concentric layers.  Layer 0 is a single element at the
origin, the phase reference antenna (PFA).  Each outer layer ``m`` carries
``2**b`` elements on a circle of radius ``m*d``, at polar angles
``psi = n * 2*pi/2**b``.  Steering vectors are indexed layer-major, polar
index ascending, with the PFA first, so entry 0 is exactly 1.

All public angle interfaces are in degrees; the math runs in radians.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

C_LIGHT = 299792458.0  # m/s


@dataclass(frozen=True)
class ArrayConfig:
    """Circular-array geometry: layer count, layer population, spacing, wavelength."""

    p: int      # layers, including the central PFA layer
    b: int      # 2**b elements per outer layer
    d: float    # inter-layer element spacing [m]
    lam: float  # carrier wavelength [m]

    def __post_init__(self):
        if self.p < 1:
            raise ValueError(f"layer count p must be >= 1, got {self.p}")
        if self.b < 1:
            raise ValueError(f"layer exponent b must be >= 1, got {self.b}")
        if self.d <= 0:
            raise ValueError(f"element spacing d must be > 0, got {self.d}")
        if self.lam <= 0:
            raise ValueError(f"wavelength must be > 0, got {self.lam}")

    @property
    def elements_per_layer(self) -> int:
        return 2 ** self.b

    @property
    def n_elements(self) -> int:
        """Total element count, one PFA plus (p-1) populated layers."""
        return (self.p - 1) * self.elements_per_layer + 1

    @property
    def polar_pitch_rad(self) -> float:
        """Angle between neighbouring elements within one layer."""
        return 2.0 * math.pi / self.elements_per_layer

    def element_positions(self) -> np.ndarray:
        """(n_elements, 2) x/y positions in meters, PFA first, layer-major order."""
        n_per = self.elements_per_layer
        pos = np.zeros((self.n_elements, 2))
        psi = np.arange(n_per) * self.polar_pitch_rad
        unit = np.stack([np.cos(psi), np.sin(psi)], axis=1)
        for m in range(1, self.p):
            pos[1 + (m - 1) * n_per: 1 + m * n_per] = m * self.d * unit
        return pos


@dataclass(frozen=True)
class Direction:
    """A beam/arrival direction: azimuth in [-180, 180), pitch in [0, 90] degrees."""

    phi_deg: float
    theta_deg: float

    def __post_init__(self):
        wrapped = ((self.phi_deg + 180.0) % 360.0) - 180.0
        object.__setattr__(self, "phi_deg", wrapped)
        if not 0.0 <= self.theta_deg <= 90.0:
            raise ValueError(f"pitch angle must be in [0, 90] deg, got {self.theta_deg}")


def direction_cosines(direction: Direction) -> np.ndarray:
    """Planar mapping vector [cos(phi) sin(theta), sin(phi) sin(theta)]."""
    phi = math.radians(direction.phi_deg)
    theta = math.radians(direction.theta_deg)
    return np.array([math.cos(phi) * math.sin(theta), math.sin(phi) * math.sin(theta)])


def element_position(cfg: ArrayConfig, m: int, n: int) -> np.ndarray:
    """Position of element (layer m, polar index n) in meters.

    The PFA is (0, 0); layer m element n sits at radius m*d, polar angle
    n * 2*pi/2**b.
    """
    if not 0 <= m < cfg.p:
        raise ValueError(f"layer index m={m} out of range [0, {cfg.p})")
    if m == 0:
        if n != 0:
            raise ValueError(f"layer 0 holds only the PFA, got n={n}")
        return np.zeros(2)
    if not 0 <= n < cfg.elements_per_layer:
        raise ValueError(f"polar index n={n} out of range [0, {cfg.elements_per_layer})")
    psi = n * cfg.polar_pitch_rad
    return np.array([math.cos(psi) * m * cfg.d, math.sin(psi) * m * cfg.d])


def phase_term(cfg: ArrayConfig, m: int, n: int, direction: Direction) -> complex:
    """Unit-modulus phase of element (m, n) relative to the PFA.

    exp(-j * 2*pi/lam * q_{m,n}^T v) for a plane wave from `direction`.
    """
    q = element_position(cfg, m, n)
    v = direction_cosines(direction)
    return complex(np.exp(-1j * 2.0 * math.pi / cfg.lam * float(q @ v)))


def steering_vector(cfg: ArrayConfig, direction: Direction) -> np.ndarray:
    """Length-n_elements steering vector; entry 0 (the PFA) is exactly 1."""
    q = cfg.element_positions()
    v = direction_cosines(direction)
    return np.exp(-1j * 2.0 * math.pi / cfg.lam * (q @ v))


def steering_matrix(cfg: ArrayConfig, directions) -> np.ndarray:
    """(n_elements, l) matrix whose column i is steering_vector(directions[i])."""
    directions = list(directions)
    if not directions:
        raise ValueError("steering_matrix needs at least one direction")
    q = cfg.element_positions()
    v = np.stack([direction_cosines(d) for d in directions], axis=1)  # (2, l)
    return np.exp(-1j * 2.0 * math.pi / cfg.lam * (q @ v))


@dataclass(frozen=True)
class SpacingCheck:
    ok: bool
    detail: str

    def __bool__(self) -> bool:
        return self.ok


def validate_spacing(cfg: ArrayConfig) -> SpacingCheck:
    """Check the printed phase-ambiguity bounds on the element spacing.

    Both the inter-layer spacing d and the innermost-layer chord
    2*d*sin(pi/2**b) must not exceed half a wavelength.
    """
    half = cfg.lam / 2.0
    chord = 2.0 * cfg.d * math.sin(cfg.polar_pitch_rad / 2.0)
    ok_radial = cfg.d <= half
    ok_chord = chord <= half
    detail = (
        f"d={cfg.d:.6g} m ({'<=' if ok_radial else '>'} lam/2={half:.6g}), "
        f"layer-1 chord={chord:.6g} m ({'<=' if ok_chord else '>'} lam/2)"
    )
    return SpacingCheck(ok_radial and ok_chord, detail)


def wrap_deg(angle: float) -> float:
    """Wrap an angle difference into [-180, 180)."""
    return ((angle + 180.0) % 360.0) - 180.0


def angular_distance_deg(a: Direction, b: Direction) -> float:
    """Euclidean distance in (azimuth, pitch) degrees with azimuth wrap."""
    return math.hypot(wrap_deg(a.phi_deg - b.phi_deg), a.theta_deg - b.theta_deg)
