"""FDB footprint geometry and the beam-scanning period.

The conical FDB pointed at (phi0, theta0) from height h illuminates an
elliptical sensing unit on the ground.  The scanning schedule raster-scans
azimuth in steps of the azimuth beamwidth, stepping the pitch down one pitch
beamwidth per full turn, counting a dwell whenever the footprint centre lies
in the cross-traffic road region and no DCB occupies the beam direction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .array_geometry import Direction, wrap_deg
from .errors import NumericalError

DEFAULT_ITERATION_CAP = 50_000_000


@dataclass(frozen=True)
class SceneGeometry:
    """Roadside deployment: mast height, road width, sensing reach, dwell."""

    h: float            # SBS height [m]
    w_r: float          # road width [m]
    r_max_s: float      # maximum sensing range [m]
    tau: float = 0.010  # beam dwell duration [s]

    def __post_init__(self):
        for name in ("h", "w_r", "r_max_s", "tau"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")


@dataclass(frozen=True)
class Footprint:
    """Elliptical sensing unit on the ground plane."""

    center: tuple       # (X0, Y0) [m]
    r_a: float          # semi-major axis [m]
    r_b: float          # semi-minor axis [m]


def footprint_center(geom: SceneGeometry, phi0_deg: float, theta0_deg: float) -> tuple:
    phi = math.radians(phi0_deg)
    theta = math.radians(theta0_deg)
    reach = geom.h * math.tan(theta)
    return (reach * math.cos(phi), reach * math.sin(phi))


def footprint(geom: SceneGeometry, beam_dir: Direction, widths_deg: tuple) -> Footprint:
    """Footprint of a beam with (pitch, azimuth) widths in degrees.

    Semi-major axis uses the small-angle form h*dtheta/cos^2(theta0); the
    semi-minor axis keeps the tangent and the half factor.
    """
    dtheta_deg, dphi_deg = widths_deg
    if not 0.0 < beam_dir.theta_deg < 90.0:
        raise ValueError(
            f"footprint defined for pitch in (0, 90) deg, got {beam_dir.theta_deg}"
        )
    theta0 = math.radians(beam_dir.theta_deg)
    r_a = geom.h * math.radians(dtheta_deg) / math.cos(theta0) ** 2
    r_b = geom.h * math.tan(math.radians(dphi_deg)) / (2.0 * math.cos(theta0))
    return Footprint(
        center=footprint_center(geom, beam_dir.phi_deg, beam_dir.theta_deg),
        r_a=r_a,
        r_b=r_b,
    )


def in_road_region(geom: SceneGeometry, point: tuple) -> bool:
    """Membership in the cross-traffic region: two perpendicular road strips
    clipped to the sensing sphere."""
    x, y = point
    in_strips = (0.0 <= x <= geom.w_r) or (-geom.w_r <= y <= 0.0)
    in_sphere = x * x + y * y + geom.h * geom.h <= geom.r_max_s ** 2
    return in_strips and in_sphere


@dataclass(frozen=True)
class ScanResult:
    n_dwells: int
    t_sc: float                # n_dwells * tau [s]
    visited: tuple             # beam directions that accumulated a dwell


def scanning_period(
    geom: SceneGeometry,
    widths_deg: tuple,
    dcb_dirs=(),
    iteration_cap: int = DEFAULT_ITERATION_CAP,
) -> ScanResult:
    """Raster-scan dwell count for the FDB.

    Starting from (phi0, theta0) = (0, dtheta), azimuth advances by dphi and
    wraps at 360 deg with a pitch step of dtheta.  A dwell is counted when
    the footprint centre is inside the road region and no DCB sits within
    half the larger beamwidth of the beam direction.  The walk stops once the
    centre leaves the sensing sphere (pitch is capped below the horizon,
    where the footprint is unbounded).
    """
    dtheta, dphi = widths_deg
    if dtheta <= 0 or dphi <= 0:
        raise ValueError(f"beamwidths must be > 0, got {widths_deg}")
    dcbs = tuple(dcb_dirs)
    exclusion = max(dtheta, dphi) / 2.0

    phi0, theta0 = 0.0, dtheta
    center = footprint_center(geom, phi0, theta0)
    n_dwells = 0
    visited = []
    iterations = 0
    r2 = geom.r_max_s ** 2
    while center[0] ** 2 + center[1] ** 2 + geom.h ** 2 <= r2:
        iterations += 1
        if iterations > iteration_cap:
            raise NumericalError(
                f"scan did not terminate within {iteration_cap} iterations "
                f"(widths {widths_deg} deg); raise the cap or widen the beam"
            )
        phi0 += dphi
        if phi0 >= 360.0:
            phi0 -= 360.0
            theta0 += dtheta
        if theta0 >= 90.0:
            break  # horizon: the beam no longer intersects the ground plane
        center = footprint_center(geom, phi0, theta0)
        if in_road_region(geom, center):
            blocked = any(
                math.hypot(wrap_deg(phi0 - d.phi_deg), theta0 - d.theta_deg)
                <= exclusion
                for d in dcbs
            )
            if not blocked:
                n_dwells += 1
                visited.append(Direction(phi0, theta0))
    return ScanResult(n_dwells, n_dwells * geom.tau, tuple(visited))
