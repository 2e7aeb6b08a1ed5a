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


"""Forward Radon transforms on polar lines, affine lines and circles.

Sinograms carry their parameter axes and evaluate ``L^2(d xi)`` norms with
the measure of their family: ``d theta dt`` for polar lines, ``dv dt`` for
affine lines and ``dc r^-alpha dr`` for circles.  The line transforms use
the trapezoid rule in ``v`` and the rectangle rule in the periodic ``theta``
and in ``t`` (sinogram rows vanish at both ends of the ``t`` axis).
"""

__all__ = [
    "PolarAxes",
    "AffineAxes",
    "CircularAxes",
    "PolarSinogram",
    "AffineSinogram",
    "CircularSinogram",
    "geometric_radii",
    "linear_radii",
    "hybrid_radii",
    "radon_polar",
    "radon_affine",
    "radon_circular",
    "radon_transform",
    "slice_check_polar",
    "slice_check_affine",
    "slice_check_circular",
    "measure_weights",
    "sinogram_inner",
    "sinogram_norm",
    "circular_r_energy",
]

import logging
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import ndimage

from .exceptions import DomainError, FamilyMismatchError, ShapeMismatchError
from .groups import RadonFamily
from .sampling import (
    Grid2,
    centered_axis,
    FORWARD_ORDER,
    circle_integrals,
    dft1_rows,
    dft2_stack,
    dft2_unitary,
    line_integrals_arclength,
    line_integrals_graph,
    spectrum_on_points,
)
from .special import bessel_j0
from .utils import TWO_PI, ordered_map

logger = logging.getLogger(__name__)

# Fraction of the Nyquist band compared by the slice checks.
SLICE_BAND = 0.8

# Physical width the image is zero-padded to before its DFT is looked up
# bilinearly by the slice checks.
SLICE_PERIOD = 64.0

# Upper bound on interpolated points per circle_integrals call.
_CHUNK_POINTS = 1 << 21


# --- axes -----------------------------------------------------------------


@dataclass(frozen=True)
class PolarAxes:
    """theta_k = pi k / n_theta on [0, pi) and a centered t axis."""

    n_theta: int
    n_t: int
    dt: float

    def __post_init__(self):
        if self.n_theta < 2 or self.n_t < 2:
            raise DomainError(f"polar axes need at least 2 angles and offsets, got {self.n_theta}x{self.n_t}")
        if not self.dt > 0:
            raise DomainError(f"offset spacing must be positive, got {self.dt}")

    @classmethod
    def for_image(cls, grid, n_theta, n_t):
        """Offsets reaching sqrt(2) times the image half-width."""
        extent = math.sqrt(2.0) * max(grid.half_width)
        return cls(int(n_theta), int(n_t), 2.0 * extent / (n_t - 1))

    @property
    def thetas(self):
        return math.pi * np.arange(self.n_theta) / self.n_theta

    @property
    def dtheta(self):
        return math.pi / self.n_theta

    @property
    def ts(self):
        return centered_axis(self.n_t, self.dt)

    @property
    def t_origin(self):
        return -(self.n_t - 1) / 2.0 * self.dt

    @property
    def shape(self):
        return (self.n_theta, self.n_t)

    def weights(self):
        return np.full(self.shape, self.dtheta * self.dt)

    def refined(self):
        """Twice the angles and offsets over the same offset extent."""
        return PolarAxes(2 * self.n_theta, 2 * self.n_t, self.dt * (self.n_t - 1) / (2 * self.n_t - 1))


@dataclass(frozen=True)
class AffineAxes:
    """Slopes v on [-v_max, v_max] (endpoints included) and a centered t axis."""

    n_v: int
    v_max: float
    n_t: int
    dt: float

    def __post_init__(self):
        if self.n_v < 2 or self.n_t < 2:
            raise DomainError(f"affine axes need at least 2 slopes and offsets, got {self.n_v}x{self.n_t}")
        if not (math.isfinite(self.v_max) and self.v_max > 0):
            raise DomainError(f"v_max must be positive and finite, got {self.v_max}")
        if not self.dt > 0:
            raise DomainError(f"offset spacing must be positive, got {self.dt}")

    @classmethod
    def for_image(cls, grid, n_v, n_t, v_max=2.0):
        """Offsets covering every line x1 + v x2 = t that meets the image."""
        hw1, hw2 = grid.half_width
        extent = hw1 + v_max * hw2
        return cls(int(n_v), float(v_max), int(n_t), 2.0 * extent / (n_t - 1))

    @property
    def vs(self):
        return np.linspace(-self.v_max, self.v_max, self.n_v)

    @property
    def dv(self):
        return 2.0 * self.v_max / (self.n_v - 1)

    @property
    def ts(self):
        return centered_axis(self.n_t, self.dt)

    @property
    def t_origin(self):
        return -(self.n_t - 1) / 2.0 * self.dt

    @property
    def shape(self):
        return (self.n_v, self.n_t)

    def v_weights(self):
        w = np.full(self.n_v, self.dv)
        w[0] = w[-1] = self.dv / 2.0
        return w

    def weights(self):
        return np.outer(self.v_weights(), np.full(self.n_t, self.dt))


def geometric_radii(r_min, r_max, n):
    if not (0 < r_min < r_max) or n < 2:
        raise DomainError(f"need 0 < r_min < r_max and n >= 2, got {r_min}, {r_max}, {n}")
    return tuple(float(r) for r in np.geomspace(r_min, r_max, n))


def linear_radii(r_min, r_max, n):
    if not (0 < r_min < r_max) or n < 2:
        raise DomainError(f"need 0 < r_min < r_max and n >= 2, got {r_min}, {r_max}, {n}")
    return tuple(float(r) for r in np.linspace(r_min, r_max, n))


def hybrid_radii(r_min, r_switch, r_max, n_geometric, dr):
    """Geometric radii from r_min to r_switch, then steps of dr up to r_max.

    The geometric part resolves the r^-alpha weight near zero, the linear
    part the oscillation of J0(2 pi |tau| r) at large r.
    """
    if not (0 < r_min < r_switch < r_max) or dr <= 0:
        raise DomainError(f"need 0 < r_min < r_switch < r_max and dr > 0, got {r_min}, {r_switch}, {r_max}, {dr}")
    head = np.geomspace(r_min, r_switch, n_geometric)
    n_lin = int(math.floor((r_max - r_switch) / dr + 1e-9))
    tail = r_switch + dr * np.arange(1, n_lin + 1)
    return tuple(float(r) for r in np.concatenate([head, tail]))


@dataclass(frozen=True)
class CircularAxes:
    """Circle centers on ``cgrid`` and an increasing tuple of radii."""

    cgrid: Grid2
    rs: tuple

    def __post_init__(self):
        rs = tuple(float(r) for r in self.rs)
        if len(rs) < 2:
            raise DomainError("circular axes need at least 2 radii")
        if rs[0] <= 0 or any(r2 <= r1 for r1, r2 in zip(rs[:-1], rs[1:])):
            raise DomainError("radii must be positive and strictly increasing")
        object.__setattr__(self, "rs", rs)

    @classmethod
    def for_image(cls, grid, rs, c_spacing=None):
        """Centers covering every circle of radius <= max(rs) meeting the image."""
        spacing = c_spacing or grid.dx
        extent = max(grid.half_width) + max(rs)
        n = 2 * int(math.ceil(extent / spacing))
        return cls(Grid2.square(n, spacing), tuple(rs))

    @property
    def radii(self):
        return np.array(self.rs)

    @property
    def shape(self):
        return self.cgrid.shape + (len(self.rs),)

    def r_weights(self, alpha):
        """Trapezoid weights of dr / r^alpha on the radii."""
        r = self.radii
        dr = np.diff(r)
        w = np.zeros_like(r)
        w[:-1] += dr / 2.0
        w[1:] += dr / 2.0
        return w * r**-alpha

    def weights(self, alpha):
        return self.cgrid.cell_area * self.r_weights(alpha)[None, None, :] * np.ones(self.shape)


# --- sinograms ------------------------------------------------------------


class _SinogramArithmetic:
    """Linear-space operations shared by the three sinogram types."""

    def _check(self, other):
        if type(other) is not type(self) or other.axes != self.axes:
            raise ShapeMismatchError(f"sinograms live on different axes: {self.axes} vs {other.axes}")

    def with_samples(self, samples):
        return replace(self, samples=samples)

    def __add__(self, other):
        self._check(other)
        return self.with_samples(self.samples + other.samples)

    def __sub__(self, other):
        self._check(other)
        return self.with_samples(self.samples - other.samples)

    def __mul__(self, scalar):
        return self.with_samples(self.samples * scalar)

    __rmul__ = __mul__

    def norm(self):
        return sinogram_norm(self)

    def inner(self, other):
        return sinogram_inner(self, other)


def _validated(samples, shape, what):
    samples = np.asarray(samples, dtype=np.complex128)
    if samples.shape != tuple(shape):
        raise ShapeMismatchError(f"{what} samples of shape {samples.shape} do not match axes {tuple(shape)}")
    if not np.all(np.isfinite(samples)):
        raise DomainError(f"{what} samples must be finite")
    return samples


@dataclass(eq=False)
class PolarSinogram(_SinogramArithmetic):
    """Samples of R f on (theta, t), theta-major."""

    axes: PolarAxes
    samples: np.ndarray
    kind = "sino_polar"

    def __post_init__(self):
        self.samples = _validated(self.samples, self.axes.shape, "polar sinogram")

    @property
    def family(self):
        return RadonFamily.polar()


@dataclass(eq=False)
class AffineSinogram(_SinogramArithmetic):
    """Samples of R^aff f on (v, t), v-major."""

    axes: AffineAxes
    samples: np.ndarray
    kind = "sino_affine"

    def __post_init__(self):
        self.samples = _validated(self.samples, self.axes.shape, "affine sinogram")

    @property
    def family(self):
        return RadonFamily.affine()


@dataclass(eq=False)
class CircularSinogram(_SinogramArithmetic):
    """Samples of R^cir f on (c1, c2, r); alpha fixes the measure dc dr / r^alpha."""

    axes: CircularAxes
    samples: np.ndarray
    alpha: float = 0.5
    kind = "sino_circular"

    def __post_init__(self):
        if not (0.0 < self.alpha < 1.0):
            raise DomainError(f"circular exponent alpha must lie in (0, 1), got {self.alpha}")
        self.samples = _validated(self.samples, self.axes.shape, "circular sinogram")

    @property
    def family(self):
        return RadonFamily.circular(self.alpha)


def measure_weights(sino):
    """Quadrature weights of the family measure, broadcast to the samples."""
    if isinstance(sino, CircularSinogram):
        return sino.axes.weights(sino.alpha)
    return sino.axes.weights()


def sinogram_inner(sino1, sino2):
    """<sino1, sino2> in L^2(d xi), linear in the first argument."""
    sino1._check(sino2)
    return complex(np.sum(sino1.samples * np.conj(sino2.samples) * measure_weights(sino1)))


def sinogram_norm(sino):
    return math.sqrt(float(np.sum(np.abs(sino.samples) ** 2 * measure_weights(sino))))


def circular_r_energy(sino, alpha):
    """Squared norm of a circular sinogram under dc dr / r^alpha for any alpha > 0.

    Unlike `sinogram_norm` this accepts exponents outside (0, 1), where the
    norm stops being finite in the limit of radii reaching zero.
    """
    if alpha <= 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    w = sino.axes.cgrid.cell_area * sino.axes.r_weights(alpha)
    return float(np.sum(np.abs(sino.samples) ** 2 * w[None, None, :]))


# --- forward transforms ---------------------------------------------------


def radon_polar(img, axes, step=None, order=FORWARD_ORDER):
    """Polar Radon transform R f(theta, t) = int f(t w(theta) + y w(theta)^perp) dy.

    Parameters
    ----------
    img : `Image`
        Input samples.
    axes : `PolarAxes`
        Sinogram axes.
    step : `float`, optional
        Midpoint cell length along each line; half the finest pixel
        spacing by default.
    order : `int`, optional
        Interpolation order of the line samples; bilinear by default,
        3 selects the cubic spline.

    Returns
    -------
    sino : `PolarSinogram`
    """
    step = step or 0.5 * min(img.grid.dx, img.grid.dy)
    ts = axes.ts

    def row(theta):
        return line_integrals_arclength(img, (math.cos(theta), math.sin(theta)), ts, step, order)

    samples = np.array(ordered_map(row, axes.thetas))
    logger.info(f"polar sinogram {axes.n_theta}x{axes.n_t} from image {img.grid.describe()}")
    return PolarSinogram(axes, samples)


def radon_affine(img, axes, step=None, order=FORWARD_ORDER):
    """Affine Radon transform R^aff f(v, t) = int f(t - v y, y) dy.

    The midpoint cells are measured in y; they shrink with the slope so
    that their arclength stays at ``step``.
    """
    step = step or 0.5 * min(img.grid.dx, img.grid.dy)
    ts = axes.ts

    def row(v):
        return line_integrals_graph(img, v, ts, step / math.sqrt(1.0 + v * v), order)

    samples = np.array(ordered_map(row, axes.vs))
    logger.info(f"affine sinogram {axes.n_v}x{axes.n_t} (|v| <= {axes.v_max:g}) from image {img.grid.describe()}")
    return AffineSinogram(axes, samples)


def _auto_nphi(r, grid):
    return int(np.clip(math.ceil(TWO_PI * r / min(grid.dx, grid.dy)), 16, 2048))


def radon_circular(img, axes, alpha=0.5, nphi=None, order=FORWARD_ORDER):
    """Spherical means R^cir f(c, r) = int_0^2pi f(c - r w(phi)) dphi.

    ``nphi`` defaults to about one node per pixel along each circle.
    """
    centers = np.stack(axes.cgrid.mesh(), axis=-1).reshape(-1, 2)

    def slice_(r):
        n = nphi or _auto_nphi(r, img.grid)
        chunk = max(1, _CHUNK_POINTS // n)
        parts = [circle_integrals(img, centers[i : i + chunk], r, n, order) for i in range(0, len(centers), chunk)]
        return np.concatenate(parts).reshape(axes.cgrid.shape)

    samples = np.stack(ordered_map(slice_, axes.rs), axis=-1)
    logger.info(
        f"circular sinogram {axes.cgrid.describe()} x {len(axes.rs)} radii "
        f"[{axes.rs[0]:g}, {axes.rs[-1]:g}] from image {img.grid.describe()}"
    )
    return CircularSinogram(axes, samples, alpha)


def radon_transform(img, family, axes, **kwargs):
    """Dispatch to the forward transform of ``family``."""
    expected = {"polar": PolarAxes, "affine": AffineAxes, "circular": CircularAxes}[family.kind]
    if not isinstance(axes, expected):
        raise FamilyMismatchError(f"{type(axes).__name__} cannot carry a {family} sinogram")
    if family.kind == "polar":
        return radon_polar(img, axes, **kwargs)
    if family.kind == "affine":
        return radon_affine(img, axes, **kwargs)
    return radon_circular(img, axes, alpha=family.alpha, **kwargs)


# --- Fourier slice checks -------------------------------------------------


def _max_relative(values, reference):
    scale = float(np.max(np.abs(reference))) if reference.size else 0.0
    error = float(np.max(np.abs(values - reference))) if values.size else 0.0
    if scale == 0.0:
        return 0.0 if error == 0.0 else math.inf
    return error / scale


def _slice_padded(img):
    grid = img.grid
    n1 = max(grid.n1, math.ceil(SLICE_PERIOD / grid.dx))
    n2 = max(grid.n2, math.ceil(SLICE_PERIOD / grid.dy))
    n1 += (n1 - grid.n1) % 2
    n2 += (n2 - grid.n2) % 2
    return img.embed(Grid2(n1, n2, grid.dx, grid.dy))


def _image_spectrum(img, xi1, xi2, oracle):
    """F f at arbitrary frequencies, either exactly or by bilinear lookup in the 2D DFT."""
    if oracle == "direct":
        return spectrum_on_points(img, xi1, xi2).reshape(np.shape(xi1))
    if oracle != "bilinear":
        raise DomainError(f"unknown slice oracle {oracle!r}")
    spec = dft2_unitary(_slice_padded(img))
    f1, f2 = spec.xi1, spec.xi2
    i = (np.asarray(xi1) - f1[0]) / (f1[1] - f1[0])
    j = (np.asarray(xi2) - f2[0]) / (f2[1] - f2[0])
    coords = np.stack([i.ravel(), j.ravel()])
    kwargs = dict(order=1, mode="constant", cval=0.0, prefilter=False)
    re = ndimage.map_coordinates(spec.samples.real, coords, **kwargs)
    im = ndimage.map_coordinates(spec.samples.imag, coords, **kwargs)
    return (re + 1j * im).reshape(np.shape(xi1))


def slice_check_polar(img, sino, band=SLICE_BAND, oracle="bilinear"):
    """Max relative deviation from (I x F) R f(theta, tau) = F f(tau w(theta)).

    Compares every row frequency with ``|tau|`` inside ``band`` times the
    image Nyquist frequency.  The default ``oracle="bilinear"`` interpolates
    the 2D DFT of the zero-padded image; ``"direct"`` evaluates F f exactly
    on the rays.
    """
    axes = sino.axes
    freqs, rows = dft1_rows(sino.samples, axes.dt, axes.t_origin)
    keep = np.abs(freqs) <= band * min(img.grid.nyquist)
    tau = freqs[keep]
    thetas = axes.thetas
    xi1 = np.outer(np.cos(thetas), tau)
    xi2 = np.outer(np.sin(thetas), tau)
    error = _max_relative(rows[:, keep], _image_spectrum(img, xi1, xi2, oracle))
    logger.debug(f"polar slice check: {keep.sum()} frequencies per row, error {error:.3e}")
    return error


def slice_check_affine(img, sino, band=SLICE_BAND, oracle="bilinear"):
    """Max relative deviation from (I x F) R^aff f(v, tau) = F f(tau, tau v)."""
    axes = sino.axes
    freqs, rows = dft1_rows(sino.samples, axes.dt, axes.t_origin)
    nyq1, nyq2 = img.grid.nyquist
    vs = axes.vs
    xi1 = np.broadcast_to(freqs[None, :], rows.shape)
    xi2 = np.outer(vs, freqs)
    keep = (np.abs(xi1) <= band * nyq1) & (np.abs(xi2) <= band * nyq2)
    ref = np.zeros(rows.shape, dtype=np.complex128)
    ref[keep] = _image_spectrum(img, xi1[keep], xi2[keep], oracle)
    error = _max_relative(rows[keep], ref[keep])
    logger.debug(f"affine slice check: {keep.sum()} frequencies, error {error:.3e}")
    return error


def slice_check_circular(img, sino, band=SLICE_BAND, oracle="bilinear"):
    """Max relative deviation from (F x I) R^cir f(tau, r) = 2 pi J0(2 pi |tau| r) F f(tau)."""
    cgrid = sino.axes.cgrid
    spec = dft2_stack(sino.samples, cgrid)
    xi1, xi2 = cgrid.freq_mesh()
    limit = band * min(min(img.grid.nyquist), min(cgrid.nyquist))
    keep = (np.abs(xi1) <= limit) & (np.abs(xi2) <= limit)
    f_hat = _image_spectrum(img, xi1[keep], xi2[keep], oracle)
    rho = np.hypot(xi1[keep], xi2[keep])
    ref = np.stack([TWO_PI * bessel_j0(TWO_PI * rho * r) * f_hat for r in sino.axes.rs], axis=-1)
    error = _max_relative(spec[keep], ref)
    logger.debug(f"circular slice check: {keep.sum()} frequencies x {len(sino.axes.rs)} radii, error {error:.3e}")
    return error
