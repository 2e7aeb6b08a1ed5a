# This file is part of ts_radon_inversion.
#
# Developed for the Vera C. Rubin Observatory Telescope and Site Systems.
# This product includes software developed by the LSST Project
# (https://www.lsst.org).
# See the COPYRIGHT file at the top-level directory of this distribution
# for details of code ownership.
#
# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this program.  If not, see <https://www.gnu.org/licenses/>.

"""Bessel J0, adaptive Simpson quadrature and the circular constant c_alpha."""

__all__ = [
    "QuadratureResult",
    "CAlphaResult",
    "bessel_j0",
    "adaptive_quad",
    "c_alpha",
    "c_alpha_details",
    "k_alpha",
    "J0_SWITCH",
]

import functools
import logging
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError, QuadratureError

logger = logging.getLogger(__name__)

# Below this argument J0 is summed from its power series, above it the
# Hankel asymptotic form with rational corrections is used.
J0_SWITCH = 8.0

# Rational coefficients of the Hankel P and Q factors in w = 5/x
# (Cephes j0.c, valid for x > 5).
_PP = (
    7.96936729297347051624e-4,
    8.28352392107440799803e-2,
    1.23953371646414299388e0,
    5.44725003058768775090e0,
    8.74716500199817011941e0,
    5.30324038235394892183e0,
    9.99999999999999997821e-1,
)
_PQ = (
    9.24408810558863637013e-4,
    8.56288474354474431428e-2,
    1.25352743901058953537e0,
    5.47097740330417105182e0,
    8.76190883237069594232e0,
    5.30605288235394617618e0,
    1.00000000000000000218e0,
)
_QP = (
    -1.13663838898469149931e-2,
    -1.28252718670509318512e0,
    -1.95539544257735972385e1,
    -9.32060152123768231369e1,
    -1.77681167980488050595e2,
    -1.47077505154951170175e2,
    -5.14105326766599330220e1,
    -6.05014350600728481186e0,
)
# leading coefficient 1 implied
_QQ = (
    6.43178256118178023184e1,
    8.56430025976980587198e2,
    3.88240183605401609683e3,
    7.24046774195652478189e3,
    5.93072701187316984827e3,
    2.06209331660327847417e3,
    2.42005740240291393179e2,
)
_SQ2OPI = 7.9788456080286535587989e-1  # sqrt(2/pi)
_PIO4 = 7.85398163397448309616e-1  # pi/4

# Enough series terms for |x| < J0_SWITCH to reach 1e-17.
_SERIES_TERMS = 32

# Truncation radius bounds for c_alpha.
_R_MIN = 16.0
_R_MAX = 2.0**17


def _polevl(x, coef):
    ans = coef[0]
    for c in coef[1:]:
        ans = ans * x + c
    return ans


def _p1evl(x, coef):
    ans = x + coef[0]
    for c in coef[1:]:
        ans = ans * x + c
    return ans


def _j0_series_scalar(x):
    q = -0.25 * x * x
    term = 1.0
    total = 1.0
    k = 0
    while abs(term) > 1e-17:
        k += 1
        term *= q / (k * k)
        total += term
    return total


def _j0_hankel(x, cos, sin, sqrt):
    w = 5.0 / x
    q = w * w
    p = _polevl(q, _PP) / _polevl(q, _PQ)
    qq = _polevl(q, _QP) / _p1evl(q, _QQ)
    xn = x - _PIO4
    return _SQ2OPI * (p * cos(xn) - w * qq * sin(xn)) / sqrt(x)


def _j0_scalar(x):
    x = abs(x)
    if x < J0_SWITCH:
        return _j0_series_scalar(x)
    return _j0_hankel(x, math.cos, math.sin, math.sqrt)


def _j0_array(x):
    x = np.abs(x)
    out = np.empty_like(x)
    small = x < J0_SWITCH
    if np.any(small):
        xs = x[small]
        q = -0.25 * xs * xs
        term = np.ones_like(xs)
        total = np.ones_like(xs)
        for k in range(1, _SERIES_TERMS + 1):
            term = term * q / (k * k)
            total = total + term
        out[small] = total
    if np.any(~small):
        out[~small] = _j0_hankel(x[~small], np.cos, np.sin, np.sqrt)
    return out


def bessel_j0(x):
    """Bessel function of the first kind of order zero.

    Parameters
    ----------
    x : `float` or array_like
        Argument; J0 is even so the sign is ignored.

    Returns
    -------
    value : `float` or `numpy.ndarray`
        Scalar input gives a Python float, array input an array of the same
        shape.
    """
    if np.isscalar(x):
        return _j0_scalar(float(x))
    arr = np.asarray(x, dtype=float)
    return _j0_array(arr.ravel()).reshape(arr.shape)


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error_estimate: float


def _simpson(fa, fm, fb, h):
    return h / 6.0 * (fa + 4.0 * fm + fb)


def adaptive_quad(f, a, b, tol=1e-10, max_depth=50):
    """Integrate ``f`` over [a, b] by adaptive Simpson subdivision.

    Parameters
    ----------
    f : callable
        Scalar integrand.
    a, b : `float`
        Integration bounds; ``b < a`` flips the sign.
    tol : `float`
        Absolute error tolerance, shared among subintervals.
    max_depth : `int`
        Maximum recursion depth.

    Returns
    -------
    result : `QuadratureResult`
        Integral value and Richardson error estimate.

    Raises
    ------
    QuadratureError
        If ``f`` returns a non-finite value or a subinterval reaches
        ``max_depth`` without meeting its share of ``tol``.
    """
    if a == b:
        return QuadratureResult(0.0, 0.0)
    if b < a:
        result = adaptive_quad(f, b, a, tol, max_depth)
        return QuadratureResult(-result.value, result.error_estimate)

    def _eval(x):
        value = float(f(x))
        if not math.isfinite(value):
            raise QuadratureError(f"integrand is not finite at x={x}: {value}")
        return value

    def _adaptive(lo, hi, f_lo, f_mid, f_hi, s_whole, depth, tol):
        mid = (lo + hi) / 2.0
        left_mid = (lo + mid) / 2.0
        right_mid = (mid + hi) / 2.0
        f_left_mid = _eval(left_mid)
        f_right_mid = _eval(right_mid)

        s_left = _simpson(f_lo, f_left_mid, f_mid, mid - lo)
        s_right = _simpson(f_mid, f_right_mid, f_hi, hi - mid)
        s_combined = s_left + s_right

        # Richardson extrapolation error estimate
        error_estimate = (s_combined - s_whole) / 15.0

        if abs(error_estimate) < tol:
            return s_combined + error_estimate, abs(error_estimate)
        if depth >= max_depth:
            raise QuadratureError(
                f"no convergence on [{lo}, {hi}] after {max_depth} subdivisions "
                f"(error estimate {abs(error_estimate):.3e} > {tol:.3e})"
            )

        left_value, left_error = _adaptive(lo, mid, f_lo, f_left_mid, f_mid, s_left, depth + 1, tol / 2.0)
        right_value, right_error = _adaptive(mid, hi, f_mid, f_right_mid, f_hi, s_right, depth + 1, tol / 2.0)
        return left_value + right_value, left_error + right_error

    f_a = _eval(a)
    f_b = _eval(b)
    f_m = _eval((a + b) / 2.0)
    s_whole = _simpson(f_a, f_m, f_b, b - a)
    value, error = _adaptive(a, b, f_a, f_m, f_b, s_whole, 0, tol)
    return QuadratureResult(value, error)


@dataclass(frozen=True)
class CAlphaResult:
    """c_alpha with its pieces; near, far and tail exclude the (2 pi)^(alpha+1) prefactor."""

    alpha: float
    scheme: str
    value: float
    near: float
    far: float
    tail: float
    radius: float

    @property
    def k_alpha(self):
        return self.value**-0.5


def _check_alpha(alpha):
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"c_alpha is finite only for 0 < alpha < 1, got {alpha}")


def _near_integrand(alpha):
    # substitution u = r^(1 - alpha) removes the r^-alpha singularity
    power = 1.0 / (1.0 - alpha)
    scale = 1.0 / (1.0 - alpha)

    def integrand(u):
        return scale * _j0_scalar(u**power) ** 2

    return integrand


def _truncation_radius(alpha, near):
    # neglected oscillatory remainder ~ 1 / (pi R^(1+alpha))
    radius = (1.0 / (math.pi * 1e-6 * near)) ** (1.0 / (1.0 + alpha))
    if radius > _R_MAX:
        logger.warning(f"c_alpha truncation radius {radius:.3g} capped at {_R_MAX:g} for alpha={alpha}")
        radius = _R_MAX
    return max(_R_MIN, radius)


def _tail(alpha, radius):
    return 1.0 / (math.pi * alpha * radius**alpha)


def _adaptive_parts(alpha, radius):
    near = adaptive_quad(_near_integrand(alpha), 0.0, 1.0, tol=1e-12).value
    if radius is None:
        radius = _truncation_radius(alpha, near)

    def far_integrand(r):
        return _j0_scalar(r) ** 2 * r**-alpha

    # chunks of one half period of J0^2
    edges = np.arange(1.0, radius, math.pi)
    edges = np.append(edges, radius)
    far = math.fsum(
        adaptive_quad(far_integrand, float(lo), float(hi), tol=1e-10).value
        for lo, hi in zip(edges[:-1], edges[1:])
        if hi > lo
    )
    return near, far, radius


def _midpoint_parts(alpha, radius, n_points):
    power = 1.0 / (1.0 - alpha)
    u = (np.arange(n_points) + 0.5) / n_points
    near = float(np.sum(_j0_array(u**power) ** 2)) / n_points / (1.0 - alpha)
    if radius is None:
        radius = _truncation_radius(alpha, near)
    h = (radius - 1.0) / n_points
    r = 1.0 + (np.arange(n_points) + 0.5) * h
    far = float(np.sum(_j0_array(r) ** 2 * r**-alpha)) * h
    return near, far, radius


def c_alpha_details(alpha, scheme="adaptive", radius=None, n_points=1_000_000):
    """Compute c_alpha = (2 pi)^(alpha+1) int_0^inf J0(r)^2 r^-alpha dr.

    Parameters
    ----------
    alpha : `float`
        Exponent in (0, 1).
    scheme : `str`
        ``"adaptive"`` (adaptive Simpson on [0, 1] and on half-period chunks
        of [1, R]) or ``"midpoint"`` (fixed ``n_points`` midpoint rule on each
        of the two pieces).
    radius : `float`, optional
        Truncation radius R; chosen from alpha when omitted.

    Returns
    -------
    result : `CAlphaResult`
    """
    _check_alpha(alpha)
    if scheme == "adaptive":
        near, far, radius = _adaptive_parts(alpha, radius)
    elif scheme == "midpoint":
        near, far, radius = _midpoint_parts(alpha, radius, n_points)
    else:
        raise DomainError(f"unknown c_alpha scheme {scheme!r}")
    tail = _tail(alpha, radius)
    value = (2.0 * math.pi) ** (alpha + 1.0) * (near + far + tail)
    logger.debug(f"c_alpha({alpha}) [{scheme}] R={radius:.4g} near={near:.10g} far={far:.10g} tail={tail:.4g}")
    return CAlphaResult(alpha, scheme, value, near, far, tail, radius)


@functools.lru_cache(maxsize=None)
def c_alpha(alpha):
    """c_alpha by the adaptive scheme (cached)."""
    return c_alpha_details(float(alpha)).value


def k_alpha(alpha):
    """k_alpha = c_alpha^(-1/2), the constant of the circular multiplier."""
    return c_alpha(alpha) ** -0.5
