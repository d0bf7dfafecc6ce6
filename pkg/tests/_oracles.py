"""Independent numerical oracles shared by the test modules.

These deliberately avoid the implementation paths they check: the Marcum
oracle integrates the defining integral, the steering oracle evaluates the
per-element phase with scalar math.
"""

import math

from scipy import integrate, special


def marcum_q_quad(a: float, b: float) -> float:
    """Q1(a, b) by adaptive quadrature of x exp(-(x^2+a^2)/2) I0(ax) on [b, inf).

    Written with the exponentially scaled Bessel function so the integrand
    stays finite for large a*x.
    """
    if b == 0.0:
        return 1.0

    def integrand(x):
        return x * math.exp(-((x - a) ** 2) / 2.0) * special.i0e(a * x)

    upper = max(b, a) + 40.0
    value, _ = integrate.quad(integrand, b, upper, limit=400, epsabs=1e-13,
                              epsrel=1e-12)
    return value


def steering_entry(lam, d, b, m, n, phi_deg, theta_deg) -> complex:
    """Scalar steering-vector entry from first principles (no numpy)."""
    psi = n * 2.0 * math.pi / (2 ** b)
    qx, qy = math.cos(psi) * m * d, math.sin(psi) * m * d
    phi, theta = math.radians(phi_deg), math.radians(theta_deg)
    vx, vy = math.cos(phi) * math.sin(theta), math.sin(phi) * math.sin(theta)
    return complex(math.cos(-2.0 * math.pi / lam * (qx * vx + qy * vy)),
                   math.sin(-2.0 * math.pi / lam * (qx * vx + qy * vy)))
