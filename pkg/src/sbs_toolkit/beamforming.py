"""Joint beamforming for one free detection beam (FDB) and several
directional communication beams (DCBs).

Per-beam weights are matched filters w = a(dir)/N normalised to unit response
at their own direction.  The joint combiner solves the regularised
least-squares fit of the combined response against a 0/1 desired directional
response over a direction grid,

    min_f  || (W f)^H D_d - r ||^2 + beta * || W f ||^2,

which reduces to (G G^H + beta W^H W) f = G r with G = W^H D_d.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .array_geometry import (
    ArrayConfig,
    Direction,
    angular_distance_deg,
    steering_matrix,
    steering_vector,
    wrap_deg,
)
from .errors import NumericalError

GAIN_FLOOR_DB = -120.0
_AMPLITUDE_FLOOR = 10.0 ** (GAIN_FLOOR_DB / 20.0)
HALF_POWER_DB = 20.0 * math.log10(math.sqrt(2.0))  # 3.0103 dB


@dataclass(frozen=True)
class BeamSpec:
    """One FDB direction, the DCB directions it coexists with, and the
    regularisation factor of the joint combiner."""

    fdb: Direction
    dcbs: tuple = ()
    beta: float = 0.01

    def __post_init__(self):
        object.__setattr__(self, "dcbs", tuple(self.dcbs))
        if self.beta < 0:
            raise ValueError(f"regularisation factor must be >= 0, got {self.beta}")
        dirs = self.directions
        for i in range(len(dirs)):
            for j in range(i + 1, len(dirs)):
                if angular_distance_deg(dirs[i], dirs[j]) < 1e-9:
                    raise ValueError(f"duplicate beam direction {dirs[i]}")

    @property
    def n_dcb(self) -> int:
        return len(self.dcbs)

    @property
    def directions(self) -> tuple:
        """FDB first, then the DCBs, in the weight-matrix column order."""
        return (self.fdb,) + self.dcbs


@dataclass(frozen=True)
class DesiredResponse:
    """0/1 amplitude target over a direction grid; 1 exactly on the beam set."""

    grid: tuple
    values: np.ndarray


@dataclass(frozen=True)
class BeamPattern:
    """Per-direction power gain in dB relative to unit response |w^H a| = 1."""

    grid: tuple
    gain_db: np.ndarray


@dataclass(frozen=True)
class CombinerSolution:
    f_w: np.ndarray           # combining coefficients, FDB first
    w_opt: np.ndarray         # combined weight vector W @ f_w
    objective: float          # value of the regularised fit at the solution
    optimality_residual: float  # |grad| / (1 + |f_w|), should be ~0


def single_beam_weights(cfg: ArrayConfig, direction: Direction) -> np.ndarray:
    """Matched-filter beam for one direction, scaled so that w^H a(dir) = 1."""
    return steering_vector(cfg, direction) / cfg.n_elements


def build_weight_matrix(cfg: ArrayConfig, spec: BeamSpec) -> np.ndarray:
    """(n_elements, n_dcb+1) per-beam weights; column 0 is the FDB."""
    return np.stack([single_beam_weights(cfg, d) for d in spec.directions], axis=1)


def superposition_weights(weight_matrix: np.ndarray) -> np.ndarray:
    """Plain linear superposition of the per-beam weights (all-ones combiner)."""
    return weight_matrix.sum(axis=1)


def azimuth_cut(theta_deg: float, step_deg: float = 1.0) -> tuple:
    """Azimuth grid over [-180, 180) at fixed pitch, the default response grid."""
    n = int(round(360.0 / step_deg))
    return tuple(Direction(-180.0 + i * step_deg, theta_deg) for i in range(n))


def full_grid(phi_step_deg: float = 1.0, theta_step_deg: float = 1.0) -> tuple:
    """Full 2-D direction grid (azimuth x pitch), for 2-D response targets."""
    nphi = int(round(360.0 / phi_step_deg))
    nth = int(math.floor(90.0 / theta_step_deg)) + 1
    return tuple(
        Direction(-180.0 + i * phi_step_deg, min(j * theta_step_deg, 90.0))
        for j in range(nth)
        for i in range(nphi)
    )


def _half_cell_tolerances(grid) -> tuple:
    """Half the smallest positive grid step along each axis (inf if constant)."""
    phis = np.array([g.phi_deg for g in grid])
    thetas = np.array([g.theta_deg for g in grid])

    def half_step(vals, wrap):
        u = np.unique(vals)
        if u.size < 2:
            return 0.0  # a constant axis can only represent its own value
        gaps = np.diff(u)
        if wrap:
            gaps = np.append(gaps, 360.0 - (u[-1] - u[0]))
        return float(np.min(gaps[gaps > 1e-12])) / 2.0

    return half_step(phis, wrap=True), half_step(thetas, wrap=False)


def desired_response(spec: BeamSpec, grid) -> DesiredResponse:
    """0/1 target: 1 at each beam direction (snapped within half a grid cell)."""
    grid = tuple(grid)
    tol_phi, tol_theta = _half_cell_tolerances(grid)
    phis = np.array([g.phi_deg for g in grid])
    thetas = np.array([g.theta_deg for g in grid])
    values = np.zeros(len(grid))
    taken = {}
    for d in spec.directions:
        dphi = np.abs(((phis - d.phi_deg + 180.0) % 360.0) - 180.0)
        dth = np.abs(thetas - d.theta_deg)
        idx = int(np.argmin(dphi ** 2 + dth ** 2))
        if dphi[idx] > tol_phi + 1e-12 or dth[idx] > tol_theta + 1e-12:
            raise ValueError(
                f"beam direction ({d.phi_deg}, {d.theta_deg}) deg is not "
                f"representable on the grid (nearest point off by "
                f"{dphi[idx]:.3g}/{dth[idx]:.3g} deg)"
            )
        if idx in taken:
            raise ValueError(
                f"beam directions {taken[idx]} and {d} snap to the same grid point"
            )
        taken[idx] = d
        values[idx] = 1.0
    return DesiredResponse(grid, values)


def combiner_objective(
    weight_matrix: np.ndarray,
    steering_grid: np.ndarray,
    response: DesiredResponse,
    beta: float,
    f_w: np.ndarray,
) -> float:
    """Regularised fit value for a given combining vector."""
    w = weight_matrix @ f_w
    err = np.conj(w) @ steering_grid - response.values
    return float(np.linalg.norm(err) ** 2 + beta * np.linalg.norm(w) ** 2)


def solve_joint_combiner(
    weight_matrix: np.ndarray,
    steering_grid: np.ndarray,
    response: DesiredResponse,
    beta: float,
) -> CombinerSolution:
    """Closed-form minimiser of the reduced regularised least squares.

    The combined-weight constraint w = W f is a linear substitution, so the
    fit is an unconstrained least squares in f solved via normal equations.
    Raises NumericalError when the reduced normal matrix is singular.
    """
    if beta < 0:
        raise ValueError("beta must be >= 0")
    W = np.asarray(weight_matrix)
    D = np.asarray(steering_grid)
    r = np.asarray(response.values, dtype=float)
    if D.shape[0] != W.shape[0] or D.shape[1] != r.size:
        raise ValueError(
            f"inconsistent shapes: W {W.shape}, grid {D.shape}, response {r.shape}"
        )
    G = np.conj(W.T) @ D                                # (K, N_d)
    normal = G @ np.conj(G.T) + beta * (np.conj(W.T) @ W)
    rhs = G @ r
    try:
        f_w = np.linalg.solve(normal, rhs)
    except np.linalg.LinAlgError as exc:
        cond = float(np.linalg.cond(normal))
        raise NumericalError(
            f"reduced normal matrix is singular (condition estimate {cond:.3e}); "
            f"check for coincident beams or beta=0"
        ) from exc
    grad = 2.0 * (normal @ f_w - rhs)
    residual = float(np.linalg.norm(grad) / (1.0 + np.linalg.norm(f_w)))
    obj = combiner_objective(W, D, response, beta, f_w)
    return CombinerSolution(f_w=f_w, w_opt=W @ f_w, objective=obj,
                            optimality_residual=residual)


def beam_pattern(cfg: ArrayConfig, weights: np.ndarray, grid) -> BeamPattern:
    """Evaluate 20*log10|w^H a(dir)| over a grid, clamped at -120 dB."""
    grid = tuple(grid)
    if not grid:
        raise ValueError("pattern grid must not be empty")
    D = steering_matrix(cfg, grid)
    amp = np.abs(np.conj(weights) @ D)
    gain = 20.0 * np.log10(np.maximum(amp, _AMPLITUDE_FLOOR))
    return BeamPattern(grid, gain)


def _extract_cut(pattern: BeamPattern, peak: Direction, axis: str):
    """Pull the theta- or phi-cut through the peak out of a pattern grid."""
    phis = np.array([g.phi_deg for g in pattern.grid])
    thetas = np.array([g.theta_deg for g in pattern.grid])
    if axis == "theta":
        on = np.abs(((phis - peak.phi_deg + 180.0) % 360.0) - 180.0) < 1e-9
        x = thetas[on]
    else:
        on = np.abs(thetas - peak.theta_deg) < 1e-9
        x = np.array([wrap_deg(p - peak.phi_deg) for p in phis[on]]) + peak.phi_deg
    y = pattern.gain_db[on]
    order = np.argsort(x)
    return x[order], y[order]


def _cut_width(x: np.ndarray, y: np.ndarray, center: float) -> float:
    """Half-power width of the local lobe nearest `center` on one cut."""
    if x.size < 3:
        raise ValueError("cut through the peak has too few points")
    step = np.max(np.diff(x))
    if step > 0.1 + 1e-9:
        raise ValueError(f"cut resolution {step:.3g} deg is coarser than 0.1 deg")
    if x.min() > center - 10.0 + 1e-9 or x.max() < center + 10.0 - 1e-9:
        raise ValueError("cut must cover +-10 deg around the peak direction")
    i = int(np.argmin(np.abs(x - center)))
    while 0 < i < y.size - 1:
        if y[i + 1] > y[i]:
            i += 1
        elif y[i - 1] > y[i]:
            i -= 1
        else:
            break
    thr = y[i] - HALF_POWER_DB

    def cross(idx, direction):
        j = idx
        while 0 < j < y.size - 1 and y[j] > thr:
            j += direction
        if y[j] > thr:
            raise ValueError("half-power point not interior to the cut grid")
        # linear interpolation between the bracketing samples
        x0, x1 = x[j - direction], x[j]
        y0, y1 = y[j - direction], y[j]
        return x0 + (thr - y0) * (x1 - x0) / (y1 - y0)

    return float(cross(i, +1) - cross(i, -1))


def measure_beamwidth(pattern: BeamPattern, peak_dir: Direction) -> tuple:
    """(delta_theta, delta_phi) half-power widths through `peak_dir`, degrees.

    The pattern grid must contain a pitch cut and an azimuth cut through the
    peak covering +-10 deg at 0.1 deg resolution or better.
    """
    xt, yt = _extract_cut(pattern, peak_dir, "theta")
    xp, yp = _extract_cut(pattern, peak_dir, "phi")
    return (
        _cut_width(xt, yt, peak_dir.theta_deg),
        _cut_width(xp, yp, peak_dir.phi_deg),
    )


def cross_cuts(center: Direction, half_span_deg: float = 10.0,
               step_deg: float = 0.1) -> tuple:
    """Grid of a theta-cut plus an azimuth-cut through `center`, for widths."""
    n = int(round(half_span_deg / step_deg))
    dirs = []
    for k in range(-n, n + 1):
        th = center.theta_deg + k * step_deg
        if 0.0 <= th <= 90.0:
            dirs.append(Direction(center.phi_deg, th))
    for k in range(-n, n + 1):
        if k == 0:
            continue  # already present in the theta cut
        dirs.append(Direction(center.phi_deg + k * step_deg, center.theta_deg))
    return tuple(dirs)


@dataclass(frozen=True)
class BeamComparison:
    """Joint combiner vs plain superposition on the same per-beam basis.

    Gains are peak-normalised per pattern (pattern maximum on the evaluation
    cut = 0 dB), the convention of beam-gain plots.
    """

    directions: tuple
    joint_gain_db: np.ndarray
    superposition_gain_db: np.ndarray
    local_max_dist_deg: np.ndarray  # joint pattern, per beam
    fdb_width_deg: tuple            # (delta_theta, delta_phi) of the single FDB
    joint_objective: float
    superposition_objective: float
    solution: CombinerSolution
    w_superposition: np.ndarray

    @property
    def improvement_db(self) -> np.ndarray:
        return self.joint_gain_db - self.superposition_gain_db

    @property
    def worst_beam_improvement_db(self) -> float:
        return float(self.joint_gain_db.min() - self.superposition_gain_db.min())


def compare_with_superposition(
    cfg: ArrayConfig,
    spec: BeamSpec,
    grid=None,
    eval_step_deg: float = 0.1,
) -> BeamComparison:
    """Solve the joint combiner and rate it against linear superposition."""
    if grid is None:
        grid = azimuth_cut(spec.fdb.theta_deg, 1.0)
    response = desired_response(spec, grid)
    W = build_weight_matrix(cfg, spec)
    D = steering_matrix(cfg, grid)
    sol = solve_joint_combiner(W, D, response, spec.beta)
    w_sup = superposition_weights(W)
    sup_obj = combiner_objective(W, D, response, spec.beta,
                                 np.ones(W.shape[1], dtype=complex))

    cut = azimuth_cut(spec.fdb.theta_deg, eval_step_deg)
    Dc = steering_matrix(cfg, cut)
    amp_joint = np.abs(np.conj(sol.w_opt) @ Dc)
    amp_sup = np.abs(np.conj(w_sup) @ Dc)
    A = steering_matrix(cfg, spec.directions)
    at_joint = np.abs(np.conj(sol.w_opt) @ A)
    at_sup = np.abs(np.conj(w_sup) @ A)
    g_joint = 20.0 * np.log10(np.maximum(at_joint / amp_joint.max(), _AMPLITUDE_FLOOR))
    g_sup = 20.0 * np.log10(np.maximum(at_sup / amp_sup.max(), _AMPLITUDE_FLOOR))

    # distance from each beam to the nearest local maximum of the joint cut
    cut_phi = np.array([g.phi_deg for g in cut])
    interior = (amp_joint[1:-1] > amp_joint[:-2]) & (amp_joint[1:-1] >= amp_joint[2:])
    lm_phi = cut_phi[1:-1][interior]
    dists = np.array([
        min(abs(wrap_deg(p - d.phi_deg)) for p in lm_phi) for d in spec.directions
    ])

    fdb_pattern = beam_pattern(cfg, W[:, 0], cross_cuts(spec.fdb, 10.0, eval_step_deg))
    widths = measure_beamwidth(fdb_pattern, spec.fdb)

    return BeamComparison(
        directions=spec.directions,
        joint_gain_db=g_joint,
        superposition_gain_db=g_sup,
        local_max_dist_deg=dists,
        fdb_width_deg=widths,
        joint_objective=sol.objective,
        superposition_objective=sup_obj,
        solution=sol,
        w_superposition=w_sup,
    )
