"""Closed-form communication and sensing performance of the SBS.

Communication runs over a Rician fading channel: the outage probability at
distance x is the Rician SNR CDF at the threshold, expressed through the
first-order Marcum Q-function, and the maximum communication range inverts
it at the outage target.  Sensing range follows the radar equation with
clutter added to thermal noise.  The split of the transmit power is governed
by rho, the fraction assigned to communication (1-rho goes to sensing).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import special

FOUR_PI = 4.0 * math.pi


@dataclass(frozen=True)
class RadioParams:
    """Link-budget scalars, all in linear units (conversion happens at
    config-load time)."""

    p_t_w: float        # total transmit power [W]
    rho: float          # communication power fraction in [0, 1]
    g_t: float          # transmit beam gain
    g_r_c: float        # communication receive beam gain
    g_r_s: float        # sensing receive beam gain
    g_p_c: float        # communication processing gain
    g_p_s: float        # sensing processing gain
    lam: float          # wavelength [m]
    alpha: float        # path-loss exponent
    k_factor: float     # Rician K factor
    p_n_w: float        # thermal noise power [W]
    f_n: float          # noise figure
    xi_th: float        # SNR threshold for successful reception
    epsilon: float      # outage probability target in (0, 1)
    sigma_rcs: float    # sensing cross section [m^2]
    p_i_w: float        # ground clutter power [W]
    gamma_min: float    # minimum sensing SINR
    bandwidth: float    # total signal bandwidth [Hz]

    def __post_init__(self):
        positive = (
            "p_t_w g_t g_r_c g_r_s g_p_c g_p_s lam alpha p_n_w f_n xi_th "
            "sigma_rcs p_i_w gamma_min bandwidth"
        )
        for name in positive.split():
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")
        if not 0.0 <= self.rho <= 1.0:
            raise ValueError(f"rho must be in [0, 1], got {self.rho}")
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError(f"epsilon must be in (0, 1), got {self.epsilon}")
        if self.k_factor < 0:
            raise ValueError(f"k_factor must be >= 0, got {self.k_factor}")

    @property
    def g_com(self) -> float:
        """Combined communication beam gain g_t * g_r_c."""
        return self.g_t * self.g_r_c

    def with_rho(self, rho: float) -> "RadioParams":
        return replace(self, rho=rho)


# ---------------------------------------------------------------------------
# Marcum Q machinery
# ---------------------------------------------------------------------------

_SERIES_TAIL = 1e-14


def marcum_q(a: float, b: float) -> float:
    """First-order Marcum Q-function Q1(a, b).

    Series of Poisson(a^2/2)-weighted Erlang survival terms; truncation stops
    once the unaccumulated Poisson mass (an upper bound on the remainder,
    since each survival factor is <= 1) drops below 1e-14.
    """
    if a < 0 or b < 0:
        raise ValueError("Marcum Q arguments must be >= 0")
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError("Marcum Q arguments must be finite")
    if b == 0.0:
        return 1.0
    x = a * a / 2.0
    y = b * b / 2.0
    w = math.exp(-x)          # Poisson weight at k = 0
    cum_w = w
    t = math.exp(-y)          # Erlang term y^m e^-y / m!
    g = t                     # survival partial sum at k = 0
    q = w * g
    k = 0
    while 1.0 - cum_w > _SERIES_TAIL:
        k += 1
        w *= x / k
        cum_w += w
        t *= y / k
        g += t
        q += w * g
    return min(q, 1.0)


def inv_marcum_q(a: float, q: float) -> float:
    """b such that Q1(a, b) = q to within 1e-9, by bisection on the
    decreasing map b -> Q1(a, b).

    Valid for q in (0, 1); the bracket [0, a + 40] always straddles the root.
    """
    if not 0.0 < q < 1.0:
        raise ValueError(f"target probability must be in (0, 1), got {q}")
    lo, hi = 0.0, a + 40.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        val = marcum_q(a, mid)
        if abs(val - q) <= 1e-12:
            return mid
        if val > q:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-13 * (1.0 + hi):
            break
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# Communication performance
# ---------------------------------------------------------------------------

def received_comm_power(p: RadioParams, x: float) -> float:
    """Mean received communication power at distance x [W]."""
    if x <= 0:
        raise ValueError(f"distance must be > 0, got {x}")
    return (p.rho * p.p_t_w * p.g_com * p.g_p_c * p.lam ** 2
            / (FOUR_PI ** 2 * x ** p.alpha))


def mean_snr(p: RadioParams, x: float) -> float:
    """Statistically averaged received SNR at distance x."""
    return received_comm_power(p, x) / (p.p_n_w * p.f_n)


def rician_snr_pdf(p: RadioParams, x: float, w) -> np.ndarray:
    """Density of the instantaneous received SNR at distance x.

    Rician power fading with K factor around the mean SNR; evaluated with the
    exponentially scaled Bessel term for numerical stability at large K*w.
    """
    w = np.asarray(w, dtype=float)
    xi_bar = mean_snr(p, x)
    k = p.k_factor
    arg = 2.0 * np.sqrt(k * (k + 1.0) * np.maximum(w, 0.0) / xi_bar)
    dens = ((k + 1.0) / xi_bar) * special.i0e(arg) * np.exp(
        arg - (k + 1.0) * w / xi_bar - k
    )
    return np.where(w >= 0, dens, 0.0)


def outage_probability(p: RadioParams, x: float) -> float:
    """Probability that the instantaneous SNR falls below the threshold."""
    if x <= 0:
        raise ValueError(f"distance must be > 0, got {x}")
    if p.rho == 0.0:
        return 1.0  # no communication power at all
    k = p.k_factor
    b = math.sqrt(
        2.0 * FOUR_PI ** 2 * p.xi_th * (1.0 + k) * x ** p.alpha * p.p_n_w * p.f_n
        / (p.rho * p.p_t_w * p.g_com * p.g_p_c * p.lam ** 2)
    )
    return 1.0 - marcum_q(math.sqrt(2.0 * k), b)


def success_probability(p: RadioParams, x: float) -> float:
    return 1.0 - outage_probability(p, x)


def outage_capacity(p: RadioParams, x: float) -> float:
    """Outage-weighted throughput B log2(1+xi_th) P_success [bit/s]."""
    return p.bandwidth * math.log2(1.0 + p.xi_th) * success_probability(p, x)


def max_comm_range(p: RadioParams) -> float:
    """Largest distance at which the outage probability stays at epsilon."""
    if p.rho <= 0.0:
        raise ValueError("communication range undefined for rho = 0")
    k = p.k_factor
    b = inv_marcum_q(math.sqrt(2.0 * k), 1.0 - p.epsilon)
    num = b * b * p.rho * p.p_t_w * p.g_com * p.g_p_c * p.lam ** 2
    den = 2.0 * FOUR_PI ** 2 * p.xi_th * (1.0 + k) * p.p_n_w * p.f_n
    return (num / den) ** (1.0 / p.alpha)


# ---------------------------------------------------------------------------
# Sensing performance
# ---------------------------------------------------------------------------

def sensing_sinr(p: RadioParams, x: float) -> float:
    """Radar-equation echo SINR at range x, clutter included."""
    if x <= 0:
        raise ValueError(f"range must be > 0, got {x}")
    num = (1.0 - p.rho) * p.p_t_w * p.g_t * p.g_r_s * p.g_p_s * p.sigma_rcs * p.lam ** 2
    return num / (FOUR_PI ** 3 * (p.p_n_w * p.f_n + p.p_i_w) * x ** 4)


def max_sensing_range(p: RadioParams) -> float:
    """Largest range at which the echo SINR stays above gamma_min."""
    if p.rho >= 1.0:
        raise ValueError("sensing range undefined for rho = 1")
    num = ((1.0 - p.rho) * p.p_t_w * p.g_t * p.g_r_s * p.g_p_s
           * p.sigma_rcs * p.lam ** 2)
    den = FOUR_PI ** 3 * (p.p_n_w * p.f_n + p.p_i_w) * p.gamma_min
    return (num / den) ** 0.25


@dataclass(frozen=True)
class CrossoverResult:
    rho: float
    common_range_m: float


def range_crossover(p: RadioParams, tol: float = 1e-4):
    """Power split where communication and sensing reach the same range.

    Bisects rho in (0, 1) on the increasing difference R_comm - R_sense;
    returns None when no crossing exists in the open interval.
    """
    lo, hi = 1e-9, 1.0 - 1e-9

    def diff(rho: float) -> float:
        q = p.with_rho(rho)
        return max_comm_range(q) - max_sensing_range(q)

    if diff(lo) > 0 or diff(hi) < 0:
        return None
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if diff(mid) < 0:
            lo = mid
        else:
            hi = mid
    rho_star = 0.5 * (lo + hi)
    return CrossoverResult(rho_star, max_comm_range(p.with_rho(rho_star)))
