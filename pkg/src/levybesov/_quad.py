"""Quadrature helpers for symmetric power-law Levy densities.

The layered-stable and Farkas exponents are built from the two integrals

    small(a, xi) = int_0^1 (cos(t xi) - 1) t^(-a-1) dt
    large(a, xi) = int_1^inf (cos(t xi) - 1) t^(-a-1) dt

which are evaluated here by adaptive quadrature (QUADPACK through scipy),
with a substitution that keeps the oscillatory part on [1, inf) where the
Fourier-weighted rule applies.
"""

from __future__ import annotations

import math
import warnings

import mpmath
from scipy import integrate, special

from .errors import InvalidParameter, NonConvergentQuadrature

# beyond this frequency the Fourier integral is replaced by its
# integration-by-parts expansion (error O(xi^-4))
_ASYMPTOTIC_XI = 2.0**20


def _checked_quad(f, a, b, *, rel=1e-10, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, err = integrate.quad(f, a, b, limit=400, epsabs=1e-13, epsrel=rel, **kw)
        except integrate.IntegrationWarning as exc:
            raise NonConvergentQuadrature(str(exc)) from None
    if not math.isfinite(val) or err > max(1e-8, 1e-6 * abs(val)):
        raise NonConvergentQuadrature(f"quadrature error {err:.3g} for value {val:.6g}")
    return val


def one_minus_cos_moment(a: float) -> float:
    """int_0^inf (1 - cos u) u^(-a-1) du for 0 < a < 2."""
    if not 0.0 < a < 2.0:
        raise InvalidParameter(f"power-law exponent must lie in (0, 2), got {a}")
    if a == 1.0:
        return math.pi / 2.0
    return special.gamma(1.0 - a) * math.cos(math.pi * a / 2.0) / a


def fourier_tail(s: float, xi: float) -> float:
    """int_1^inf cos(xi t) t^(-s) dt for s > 1, xi > 0."""
    if xi >= _ASYMPTOTIC_XI:
        sn, cs = math.sin(xi), math.cos(xi)
        return (-sn + (s * cs + s * (s + 1.0) * sn / xi) / xi) / xi
    try:
        return _checked_quad(lambda t: t ** (-s), 1.0, math.inf, weight="cos", wvar=xi)
    except NonConvergentQuadrature:
        # slow decay defeats QAWF; use xi^(s-1) Re[i^(1-s) Gamma(1-s, -i xi)]
        v = mpmath.exp(0.5j * mpmath.pi * (1 - s)) * mpmath.gammainc(1 - s, -1j * xi)
        return float(mpmath.re(v)) * xi ** (s - 1.0)


def _head(a: float, x: float) -> float:
    """int_0^x (1 - cos u) u^(-a-1) du for 0 < x <= 1, no oscillation."""
    if x == 0.0:
        return 0.0
    return _checked_quad(lambda u: 2.0 * math.sin(u / 2.0) ** 2 * u ** (-a - 1.0), 0.0, x)


def small_jump_integral(a: float, xi: float) -> float:
    """int_0^1 (cos(t xi) - 1) t^(-a-1) dt  (always <= 0)."""
    xi = abs(xi)
    if xi == 0.0:
        return 0.0
    if xi <= 1.0:
        return -_checked_quad(
            lambda t: 2.0 * math.sin(t * xi / 2.0) ** 2 * t ** (-a - 1.0), 0.0, 1.0
        )
    return -(xi**a) * one_minus_cos_moment(a) + 1.0 / a - fourier_tail(a + 1.0, xi)


def large_jump_integral(a: float, xi: float) -> float:
    """int_1^inf (cos(t xi) - 1) t^(-a-1) dt for a > 0 (always <= 0)."""
    if a <= 0.0:
        raise InvalidParameter(f"tail exponent must be positive for a finite tail, got {a}")
    xi = abs(xi)
    if xi == 0.0:
        return 0.0
    if xi <= 1.0 and a < 2.0:
        return -(xi**a) * (one_minus_cos_moment(a) - _head(a, xi))
    return fourier_tail(a + 1.0, xi) - 1.0 / a
