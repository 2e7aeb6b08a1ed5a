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

"""Exact arithmetic of SIM(2) and of the parabolic shearlet group.

SIM(2) elements are ``(b, phi, a)`` acting on the plane by
``x -> b + a R_phi x``.  Shearlet elements are ``(b, s, a)`` acting by
``x -> b + N_s A_a x`` with ``A_a = diag(a, sign(a) |a|^(1/2))`` and
``N_s = [[1, -s], [0, 1]]``.

Besides the plane, the groups act on three parameter spaces:

* polar lines ``(theta, t)``, the line ``{x : x . w(theta) = t}``;
* affine lines ``(v, t)``, the line ``{x : x1 + v x2 = t}``;
* circles ``(c, r)``.

Polar angles live in [0, pi).  Since ``(theta + pi, t)`` and
``(theta, -t)`` name the same line, reducing an angle by an odd multiple
of pi flips the sign of the offset; that keeps the polar action a true
group action.
"""

__all__ = [
    "Sim2Element",
    "ShearletElement",
    "LineParamPolar",
    "LineParamAffine",
    "CircleParam",
    "RadonFamily",
    "sim2_compose",
    "sim2_inverse",
    "sim2_haar_weight",
    "sim2_modular",
    "sim2_act_plane",
    "sim2_act_lines",
    "sim2_act_circles",
    "shear_compose",
    "shear_inverse",
    "shear_haar_weight",
    "shear_modular",
    "shear_act_plane",
    "shear_act_lines",
    "compose",
    "inverse",
    "haar_weight",
    "modular",
    "params_close",
    "parabolic_dilation",
    "shear_matrix",
    "act",
    "base_point",
    "character",
    "character_from_structure",
    "section_sigma",
    "section_s",
    "cocycle_m",
    "polar_lines_pullback",
    "affine_lines_pullback",
    "circles_pullback",
    "elements_close",
    "random_sim2",
    "random_shearlet",
]

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError, FamilyMismatchError, InconsistencyError
from .utils import TWO_PI, angle_distance, reduce_angle, rotation

FAMILY_KINDS = ("polar", "affine", "circular")

# Absolute tolerance of the stabilizer check in cocycle_m.
STABILIZER_TOL = 1e-10


def _as_vector(b):
    vec = np.asarray(b, dtype=float).reshape(2)
    if not np.all(np.isfinite(vec)):
        raise DomainError(f"non-finite translation {vec!r}")
    return (float(vec[0]), float(vec[1]))


@dataclass(frozen=True)
class Sim2Element:
    """Element (b, phi, a) of SIM(2); phi is kept in [0, 2 pi), a > 0."""

    b: tuple
    phi: float
    a: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and self.a > 0):
            raise DomainError(f"SIM(2) scale must be positive, got {self.a}")
        object.__setattr__(self, "b", _as_vector(self.b))
        object.__setattr__(self, "phi", reduce_angle(float(self.phi), TWO_PI))
        object.__setattr__(self, "a", float(self.a))

    @classmethod
    def identity(cls):
        return cls((0.0, 0.0), 0.0, 1.0)

    @property
    def bvec(self):
        return np.array(self.b)

    @property
    def linear(self):
        """Linear part R_phi A_a."""
        return self.a * rotation(self.phi)

    def __matmul__(self, other):
        return sim2_compose(self, other)


@dataclass(frozen=True)
class ShearletElement:
    """Element (b, s, a) of the shearlet group; a is any non-zero real."""

    b: tuple
    s: float
    a: float

    def __post_init__(self):
        if not math.isfinite(self.a) or self.a == 0.0:
            raise DomainError(f"shearlet scale must be non-zero, got {self.a}")
        if not math.isfinite(self.s):
            raise DomainError(f"non-finite shear {self.s}")
        object.__setattr__(self, "b", _as_vector(self.b))
        object.__setattr__(self, "s", float(self.s))
        object.__setattr__(self, "a", float(self.a))

    @classmethod
    def identity(cls):
        return cls((0.0, 0.0), 0.0, 1.0)

    @property
    def bvec(self):
        return np.array(self.b)

    @property
    def linear(self):
        """Linear part N_s A_a."""
        return shear_matrix(self.s) @ parabolic_dilation(self.a)

    def __matmul__(self, other):
        return shear_compose(self, other)


@dataclass(frozen=True)
class LineParamPolar:
    theta: float
    t: float

    def __post_init__(self):
        theta, t = _reduce_line_angle(float(self.theta), float(self.t))
        object.__setattr__(self, "theta", float(theta))
        object.__setattr__(self, "t", float(t))


@dataclass(frozen=True)
class LineParamAffine:
    v: float
    t: float

    def __post_init__(self):
        if not (math.isfinite(self.v) and math.isfinite(self.t)):
            raise DomainError(f"non-finite affine line ({self.v}, {self.t})")
        object.__setattr__(self, "v", float(self.v))
        object.__setattr__(self, "t", float(self.t))


@dataclass(frozen=True)
class CircleParam:
    c: tuple
    r: float

    def __post_init__(self):
        if not (math.isfinite(self.r) and self.r > 0):
            raise DomainError(f"circle radius must be positive, got {self.r}")
        object.__setattr__(self, "c", _as_vector(self.c))
        object.__setattr__(self, "r", float(self.r))


@dataclass(frozen=True)
class RadonFamily:
    """Which of the three Radon transforms is in use.

    ``alpha`` only matters for the circular family, where it must lie in
    (0, 1); outside that range the circular transform is not square
    integrable.
    """

    kind: str
    alpha: float = 0.5

    def __post_init__(self):
        if self.kind not in FAMILY_KINDS:
            raise DomainError(f"unknown Radon family {self.kind!r}; expected one of {FAMILY_KINDS}")
        if self.kind == "circular" and not (0.0 < self.alpha < 1.0):
            raise DomainError(f"circular exponent alpha must lie in (0, 1), got {self.alpha}")

    @classmethod
    def polar(cls):
        return cls("polar")

    @classmethod
    def affine(cls):
        return cls("affine")

    @classmethod
    def circular(cls, alpha=0.5):
        return cls("circular", alpha)

    @property
    def group(self):
        return "shearlet" if self.kind == "affine" else "sim2"

    @property
    def element_type(self):
        return ShearletElement if self.kind == "affine" else Sim2Element

    def check_element(self, g):
        if not isinstance(g, self.element_type):
            raise FamilyMismatchError(
                f"{type(g).__name__} does not belong to the group of the {self.kind} family"
            )

    def __str__(self):
        if self.kind == "circular":
            return f"circular(alpha={self.alpha:g})"
        return self.kind


# --- matrices -------------------------------------------------------------


def parabolic_dilation(a):
    """A_a = diag(a, sign(a) |a|^(1/2))."""
    return np.array([[a, 0.0], [0.0, math.copysign(math.sqrt(abs(a)), a)]])


def shear_matrix(s):
    """N_s = [[1, -s], [0, 1]]."""
    return np.array([[1.0, -s], [0.0, 1.0]])


# --- SIM(2) ---------------------------------------------------------------


def sim2_compose(g1, g2):
    """(b1 + R_phi1 A_a1 b2, phi1 + phi2 mod 2 pi, a1 a2)."""
    b = g1.bvec + g1.linear @ g2.bvec
    return Sim2Element(b, g1.phi + g2.phi, g1.a * g2.a)


def sim2_inverse(g):
    """(-A_a^-1 R_phi^-1 b, -phi mod 2 pi, 1/a)."""
    b = -(rotation(-g.phi) @ g.bvec) / g.a
    return Sim2Element(b, -g.phi, 1.0 / g.a)


def sim2_haar_weight(g):
    """Density a^-3 of the left Haar measure."""
    return g.a**-3


def sim2_modular(g):
    """Modular function a^-2."""
    return g.a**-2


def sim2_act_plane(g, x):
    """b + R_phi A_a x; ``x`` may be a batch of shape (..., 2)."""
    x = np.asarray(x, dtype=float)
    return g.bvec + x @ g.linear.T


def _reduce_line_angle(theta, t):
    k = np.floor(np.asarray(theta) / math.pi)
    theta = theta - k * math.pi
    t = np.where(np.mod(k, 2) == 0, t, -t)
    # rounding can land exactly on pi
    wrap = theta >= math.pi
    theta = np.where(wrap, theta - math.pi, theta)
    t = np.where(wrap, -t, t)
    return theta, t


def polar_lines_pullback(g, theta, t):
    """g^-1 . (theta, t) on arrays: (theta - phi, (t - w(theta).b)/a) reduced mod pi."""
    theta = np.asarray(theta, dtype=float)
    t = np.asarray(t, dtype=float)
    b1, b2 = g.b
    new_t = (t - (np.cos(theta) * b1 + np.sin(theta) * b2)) / g.a
    return _reduce_line_angle(theta - g.phi, new_t)


def sim2_act_lines(g, xi, inverse=False):
    """Action of SIM(2) on polar lines; ``inverse=True`` applies g^-1."""
    h = g if inverse else sim2_inverse(g)
    theta, t = polar_lines_pullback(h, xi.theta, xi.t)
    return LineParamPolar(float(theta), float(t))


def circles_pullback(g, c, r):
    """g^-1 . (c, r) = (a^-1 R_-phi (c - b), r / a) on arrays; c has shape (..., 2)."""
    c = np.asarray(c, dtype=float)
    shifted = (c - g.bvec) @ rotation(-g.phi).T
    return shifted / g.a, np.asarray(r, dtype=float) / g.a


def sim2_act_circles(g, xi, inverse=False):
    """(b + a R_phi c, a r), or its inverse."""
    if inverse:
        c, r = circles_pullback(g, xi.c, xi.r)
        return CircleParam(c, float(r))
    return CircleParam(sim2_act_plane(g, xi.c), g.a * xi.r)


# --- shearlet group -------------------------------------------------------


def shear_compose(g1, g2):
    """(b + N_s A_a b', s + |a|^(1/2) s', a a')."""
    b = g1.bvec + g1.linear @ g2.bvec
    return ShearletElement(b, g1.s + math.sqrt(abs(g1.a)) * g2.s, g1.a * g2.a)


def shear_inverse(g):
    """(-A_a^-1 N_s^-1 b, -|a|^(-1/2) s, 1/a)."""
    b = -np.linalg.solve(g.linear, g.bvec)
    return ShearletElement(b, -g.s / math.sqrt(abs(g.a)), 1.0 / g.a)


def shear_haar_weight(g):
    """Density |a|^-3 of the left Haar measure."""
    return abs(g.a) ** -3


def shear_modular(g):
    """Modular function |a|^-2."""
    return abs(g.a) ** -2


def shear_act_plane(g, x):
    x = np.asarray(x, dtype=float)
    return g.bvec + x @ g.linear.T


def affine_lines_pullback(g, v, t):
    """g^-1 . (v, t) = (|a|^(-1/2) (v - s), (t - n(v).b) / a) on arrays."""
    v = np.asarray(v, dtype=float)
    t = np.asarray(t, dtype=float)
    b1, b2 = g.b
    return (v - g.s) / math.sqrt(abs(g.a)), (t - (b1 + v * b2)) / g.a


def shear_act_lines(g, xi, inverse=False):
    h = g if inverse else shear_inverse(g)
    v, t = affine_lines_pullback(h, xi.v, xi.t)
    return LineParamAffine(float(v), float(t))


# --- generic dispatch -----------------------------------------------------


def _same_group(g1, g2):
    if type(g1) is not type(g2):
        raise FamilyMismatchError(f"cannot combine {type(g1).__name__} with {type(g2).__name__}")


def compose(g1, g2):
    _same_group(g1, g2)
    if isinstance(g1, Sim2Element):
        return sim2_compose(g1, g2)
    return shear_compose(g1, g2)


def inverse(g):
    if isinstance(g, Sim2Element):
        return sim2_inverse(g)
    return shear_inverse(g)


def haar_weight(g):
    if isinstance(g, Sim2Element):
        return sim2_haar_weight(g)
    return shear_haar_weight(g)


def modular(g):
    if isinstance(g, Sim2Element):
        return sim2_modular(g)
    return shear_modular(g)


def act(family, g, xi, inverse=False):
    """Action of ``g`` on a parameter of ``family``'s space."""
    family.check_element(g)
    if family.kind == "polar":
        return sim2_act_lines(g, xi, inverse=inverse)
    if family.kind == "affine":
        return shear_act_lines(g, xi, inverse=inverse)
    return sim2_act_circles(g, xi, inverse=inverse)


def base_point(family):
    """The reference point xi0 of the family's parameter space."""
    if family.kind == "polar":
        return LineParamPolar(0.0, 0.0)
    if family.kind == "affine":
        return LineParamAffine(0.0, 0.0)
    return CircleParam((1.0, 0.0), 1.0)


def params_close(family, xi1, xi2, tol=STABILIZER_TOL):
    if family.kind == "polar":
        # (theta, t) and (theta + pi, -t) agree; angle_distance works mod pi
        # only when the offsets are compared with matching sign.
        if angle_distance(xi1.theta, xi2.theta, math.pi) > tol:
            return False
        same_side = abs(xi1.theta - xi2.theta) < math.pi / 2
        t2 = xi2.t if same_side else -xi2.t
        return abs(xi1.t - t2) <= tol
    if family.kind == "affine":
        return abs(xi1.v - xi2.v) <= tol and abs(xi1.t - xi2.t) <= tol
    return (
        abs(xi1.c[0] - xi2.c[0]) <= tol and abs(xi1.c[1] - xi2.c[1]) <= tol and abs(xi1.r - xi2.r) <= tol
    )


# --- characters, sections, cocycle ----------------------------------------


def character(family, which, g):
    """beta, gamma or chi of ``family`` evaluated at ``g``.

    Parameters
    ----------
    family : `RadonFamily`
        Selects the formulas (and alpha for circles).
    which : `str`
        One of ``"beta"``, ``"gamma"``, ``"chi"``.
    g : `Sim2Element` or `ShearletElement`
        Must belong to the family's group.

    Returns
    -------
    value : `float`
        A positive real, multiplicative in ``g``.
    """
    family.check_element(g)
    a = abs(g.a)
    if family.kind == "polar":
        values = {"beta": a, "gamma": a, "chi": a**-0.5}
    elif family.kind == "affine":
        values = {"beta": a**1.5, "gamma": a**0.5, "chi": a**-0.5}
    else:
        alpha = family.alpha
        values = {"beta": a ** (3.0 - alpha), "gamma": 1.0, "chi": a ** ((alpha - 1.0) / 2.0)}
    if which not in values:
        raise DomainError(f"unknown character {which!r}; expected beta, gamma or chi")
    return values[which]


def section_sigma(family, xi):
    """Group element carrying xi0 to ``xi``."""
    if family.kind == "polar":
        w = np.array([math.cos(xi.theta), math.sin(xi.theta)])
        return Sim2Element(xi.t * w, xi.theta, 1.0)
    if family.kind == "affine":
        return ShearletElement((xi.t, 0.0), xi.v, 1.0)
    return Sim2Element((xi.c[0] - xi.r, xi.c[1]), 0.0, xi.r)


def section_s(x, group="sim2"):
    """Base section s(x) = (x, 0, 1) of the plane."""
    if group == "shearlet":
        return ShearletElement(x, 0.0, 1.0)
    return Sim2Element(x, 0.0, 1.0)


def cocycle_m(family, g, xi):
    """m(g, xi) = sigma(xi)^-1 g sigma(g^-1 . xi), an element of the isotropy of xi0.

    Raises `InconsistencyError` if the result fails to fix xi0.
    """
    family.check_element(g)
    pulled = act(family, g, xi, inverse=True)
    m = compose(compose(inverse(section_sigma(family, xi)), g), section_sigma(family, pulled))
    xi0 = base_point(family)
    if not params_close(family, act(family, m, xi0), xi0, STABILIZER_TOL):
        raise InconsistencyError(f"cocycle {m} does not stabilize {xi0}")
    return m


def character_from_structure(family, g):
    """chi assembled from beta, det k and gamma on the cocycle at xi0.

    chi(g) = beta(g)^(-1/2) |det k|^(1/2) gamma(m(g, xi0))^(-1)
    """
    m = cocycle_m(family, g, base_point(family))
    det_k = abs(np.linalg.det(g.linear))
    return character(family, "beta", g) ** -0.5 * math.sqrt(det_k) / character(family, "gamma", m)


def elements_close(g1, g2, tol=1e-10):
    """Componentwise comparison; SIM(2) angles compared on the circle."""
    _same_group(g1, g2)
    if abs(g1.b[0] - g2.b[0]) > tol or abs(g1.b[1] - g2.b[1]) > tol or abs(g1.a - g2.a) > tol:
        return False
    if isinstance(g1, Sim2Element):
        return angle_distance(g1.phi, g2.phi) <= tol
    return abs(g1.s - g2.s) <= tol


def random_sim2(rng, b_max=1.0, a_range=(0.5, 2.0)):
    """Random SIM(2) element with |b_i| <= b_max and log-uniform a."""
    b = rng.uniform(-b_max, b_max, size=2)
    log_a = rng.uniform(math.log(a_range[0]), math.log(a_range[1]))
    return Sim2Element(b, rng.uniform(0.0, TWO_PI), math.exp(log_a))


def random_shearlet(rng, b_max=1.0, s_max=1.0, a_range=(0.5, 2.0), signed=True):
    """Random shearlet element; the scale sign is random when ``signed``."""
    b = rng.uniform(-b_max, b_max, size=2)
    a = math.exp(rng.uniform(math.log(a_range[0]), math.log(a_range[1])))
    if signed and rng.uniform() < 0.5:
        a = -a
    return ShearletElement(b, rng.uniform(-s_max, s_max), a)
