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

"""Sampled functions on uniform centered grids.

Fourier transforms here approximate the continuous transform
``F f(xi) = int f(x) exp(-2 pi i xi . x) dx``: the FFT is rescaled by the
sample spacing and phase-corrected for the grid origin, and frequencies are
returned in ``fftshift`` order, ``xi_k = k / (N dx)`` for ``k`` in
``[-N/2, N/2)``.  Norms are measure weighted (``dx dy`` in space,
``dxi1 dxi2`` in frequency), so Parseval holds to rounding.
"""

__all__ = [
    "Grid2",
    "Image",
    "Spectrum",
    "dft2_unitary",
    "idft2_unitary",
    "dft1_rows",
    "idft1_rows",
    "pad_centered",
    "centered_axis",
    "sample",
    "sample_many",
    "bilinear_sample",
    "line_integral_arclength",
    "line_integrals_arclength",
    "line_integral_graph",
    "line_integrals_graph",
    "circle_integral",
    "circle_integrals",
    "spectrum_on_points",
    "spectrum_on_grid",
    "dft2_stack",
    "idft2_stack",
]

import math
from dataclasses import dataclass

import numpy as np
import scipy.fft
from scipy import ndimage

from .exceptions import DomainError, ShapeMismatchError
from .utils import TWO_PI, get_thread_count

# Interpolation order behind line and circle quadrature (bilinear).
FORWARD_ORDER = 1
# Spline order used when resampling images under the group action.
SPLINE_ORDER = 3


def centered_axis(n, spacing):
    """n samples with the given spacing, symmetric about zero."""
    return (np.arange(n) - (n - 1) / 2.0) * spacing


def frequency_axis(n, spacing):
    return scipy.fft.fftshift(scipy.fft.fftfreq(n, d=spacing))


@dataclass(frozen=True)
class Grid2:
    """Uniform centered 2D grid; axis 0 is x1, axis 1 is x2."""

    n1: int
    n2: int
    dx: float
    dy: float = None

    def __post_init__(self):
        if self.dy is None:
            object.__setattr__(self, "dy", self.dx)
        if self.n1 < 2 or self.n2 < 2:
            raise DomainError(f"grid needs at least 2 samples per axis, got {self.n1}x{self.n2}")
        if not (self.dx > 0 and self.dy > 0):
            raise DomainError(f"grid spacings must be positive, got {self.dx}, {self.dy}")
        object.__setattr__(self, "n1", int(self.n1))
        object.__setattr__(self, "n2", int(self.n2))
        object.__setattr__(self, "dx", float(self.dx))
        object.__setattr__(self, "dy", float(self.dy))

    @classmethod
    def square(cls, n, spacing):
        return cls(n, n, spacing, spacing)

    @property
    def shape(self):
        return (self.n1, self.n2)

    @property
    def origin(self):
        """Coordinates of sample (0, 0)."""
        return (-(self.n1 - 1) / 2.0 * self.dx, -(self.n2 - 1) / 2.0 * self.dy)

    @property
    def x1(self):
        return centered_axis(self.n1, self.dx)

    @property
    def x2(self):
        return centered_axis(self.n2, self.dy)

    def mesh(self):
        return np.meshgrid(self.x1, self.x2, indexing="ij")

    @property
    def half_width(self):
        """Largest coordinate magnitude along each axis."""
        return ((self.n1 - 1) / 2.0 * self.dx, (self.n2 - 1) / 2.0 * self.dy)

    @property
    def cell_area(self):
        return self.dx * self.dy

    @property
    def freq1(self):
        return frequency_axis(self.n1, self.dx)

    @property
    def freq2(self):
        return frequency_axis(self.n2, self.dy)

    def freq_mesh(self):
        return np.meshgrid(self.freq1, self.freq2, indexing="ij")

    @property
    def freq_cell_area(self):
        return 1.0 / (self.n1 * self.dx * self.n2 * self.dy)

    @property
    def nyquist(self):
        return (0.5 / self.dx, 0.5 / self.dy)

    def padded(self, factor):
        """Grid with ``factor`` times the samples on the same spacing, aligned on ours."""
        grid = Grid2(self.n1 * factor, self.n2 * factor, self.dx, self.dy)
        grid.crop_offsets(self)
        return grid

    def crop_offsets(self, inner):
        """Index of ``inner``'s sample (0, 0) inside this grid."""
        d1, d2 = self.n1 - inner.n1, self.n2 - inner.n2
        if inner.dx != self.dx or inner.dy != self.dy or d1 < 0 or d2 < 0 or d1 % 2 or d2 % 2:
            raise ShapeMismatchError(f"{inner} is not a centered sub-grid of {self}")
        return d1 // 2, d2 // 2

    def describe(self):
        return f"{self.n1}x{self.n2} @ ({self.dx:g}, {self.dy:g})"


@dataclass
class Image:
    """Complex samples f(x1_i, x2_j) on a `Grid2`."""

    grid: Grid2
    samples: np.ndarray

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.complex128)
        if self.samples.shape != self.grid.shape:
            raise ShapeMismatchError(f"samples of shape {self.samples.shape} do not fit grid {self.grid.shape}")
        if not np.all(np.isfinite(self.samples)):
            raise DomainError("image samples must be finite")

    @classmethod
    def zeros(cls, grid):
        return cls(grid, np.zeros(grid.shape, dtype=np.complex128))

    @classmethod
    def from_function(cls, grid, func):
        """Sample ``func(x1, x2)`` (vectorized) on the grid."""
        x1, x2 = grid.mesh()
        return cls(grid, func(x1, x2))

    @property
    def real(self):
        return self.samples.real

    def norm(self):
        return math.sqrt(float(np.sum(np.abs(self.samples) ** 2)) * self.grid.cell_area)

    def inner(self, other):
        """<self, other> = sum f conj(g) dx dy."""
        self._check(other)
        return complex(np.vdot(other.samples, self.samples)) * self.grid.cell_area

    def mean(self):
        return complex(np.mean(self.samples))

    def crop(self, inner_grid):
        i0, j0 = self.grid.crop_offsets(inner_grid)
        return Image(inner_grid, self.samples[i0 : i0 + inner_grid.n1, j0 : j0 + inner_grid.n2])

    def embed(self, outer_grid):
        i0, j0 = outer_grid.crop_offsets(self.grid)
        out = np.zeros(outer_grid.shape, dtype=np.complex128)
        out[i0 : i0 + self.grid.n1, j0 : j0 + self.grid.n2] = self.samples
        return Image(outer_grid, out)

    def _check(self, other):
        if other.grid != self.grid:
            raise ShapeMismatchError(f"grids differ: {self.grid} vs {other.grid}")

    def __add__(self, other):
        self._check(other)
        return Image(self.grid, self.samples + other.samples)

    def __sub__(self, other):
        self._check(other)
        return Image(self.grid, self.samples - other.samples)

    def __mul__(self, scalar):
        return Image(self.grid, self.samples * scalar)

    __rmul__ = __mul__


@dataclass
class Spectrum:
    """Samples of F f on the frequency grid conjugate to ``grid``."""

    grid: Grid2
    samples: np.ndarray

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.complex128)
        if self.samples.shape != self.grid.shape:
            raise ShapeMismatchError(f"spectrum of shape {self.samples.shape} does not fit grid {self.grid.shape}")

    @property
    def xi1(self):
        return self.grid.freq1

    @property
    def xi2(self):
        return self.grid.freq2

    def norm(self):
        return math.sqrt(float(np.sum(np.abs(self.samples) ** 2)) * self.grid.freq_cell_area)


def _origin_phase(freqs, origin, sign):
    return np.exp(sign * 2j * math.pi * freqs * origin)


def dft2_unitary(img, workers=None):
    """Physical 2D Fourier transform of an `Image`."""
    grid = img.grid
    workers = workers or get_thread_count()
    raw = scipy.fft.fftshift(scipy.fft.fft2(img.samples, workers=workers))
    x0, y0 = grid.origin
    phase = np.outer(_origin_phase(grid.freq1, x0, -1), _origin_phase(grid.freq2, y0, -1))
    return Spectrum(grid, raw * phase * grid.cell_area)


def idft2_unitary(spec, workers=None):
    """Inverse of `dft2_unitary`."""
    grid = spec.grid
    workers = workers or get_thread_count()
    x0, y0 = grid.origin
    phase = np.outer(_origin_phase(grid.freq1, x0, 1), _origin_phase(grid.freq2, y0, 1))
    raw = scipy.fft.ifft2(scipy.fft.ifftshift(spec.samples * phase), workers=workers)
    return Image(grid, raw / grid.cell_area)


def pad_centered(samples, n_out, origin, spacing):
    """Zero-pad the last axis to ``n_out`` keeping the data in the middle.

    Returns the padded array and the origin of its first sample.
    """
    n = samples.shape[-1]
    if n_out < n:
        raise ShapeMismatchError(f"cannot pad {n} samples down to {n_out}")
    left = (n_out - n) // 2
    widths = [(0, 0)] * (samples.ndim - 1) + [(left, n_out - n - left)]
    return np.pad(samples, widths), origin - left * spacing


def dft1_rows(samples, spacing, origin, workers=None):
    """Physical 1D Fourier transform along the last axis.

    Parameters
    ----------
    samples : `numpy.ndarray`
        Rows sampled at ``origin + j * spacing``.
    spacing, origin : `float`
        Sample spacing and position of the first sample.

    Returns
    -------
    freqs : `numpy.ndarray`
        Frequencies in fftshift order.
    values : `numpy.ndarray`
        Transformed rows, same shape as ``samples``.
    """
    n = samples.shape[-1]
    workers = workers or get_thread_count()
    freqs = frequency_axis(n, spacing)
    raw = scipy.fft.fftshift(scipy.fft.fft(samples, axis=-1, workers=workers), axes=-1)
    return freqs, raw * _origin_phase(freqs, origin, -1) * spacing


def idft1_rows(values, spacing, origin, workers=None):
    """Inverse of `dft1_rows` for rows living on the same sample grid."""
    n = values.shape[-1]
    workers = workers or get_thread_count()
    freqs = frequency_axis(n, spacing)
    shifted = scipy.fft.ifftshift(values * _origin_phase(freqs, origin, 1), axes=-1)
    return scipy.fft.ifft(shifted, axis=-1, workers=workers) / spacing


# --- interpolation ---------------------------------------------------------


def _fractional_indices(grid, points):
    points = np.asarray(points, dtype=float)
    x0, y0 = grid.origin
    return (points[..., 0] - x0) / grid.dx, (points[..., 1] - y0) / grid.dy


def sample_many(img, points, order=FORWARD_ORDER):
    """Interpolated values of ``img`` at an array of points of shape (..., 2).

    ``order=1`` is bilinear, higher orders use a prefiltered spline.  Values
    outside the convex hull of the grid are exactly zero.
    """
    grid = img.grid
    i, j = _fractional_indices(grid, points)
    inside = (i >= 0) & (i <= grid.n1 - 1) & (j >= 0) & (j <= grid.n2 - 1)
    coords = np.stack([i.ravel(), j.ravel()])
    kwargs = dict(order=order, mode="constant", cval=0.0, prefilter=order > 1)
    re = ndimage.map_coordinates(img.samples.real, coords, **kwargs)
    im = ndimage.map_coordinates(img.samples.imag, coords, **kwargs)
    values = (re + 1j * im).reshape(i.shape)
    return np.where(inside, values, 0.0)


def sample(img, p, order=FORWARD_ORDER):
    return complex(sample_many(img, np.asarray(p, dtype=float).reshape(1, 2), order)[0])


def bilinear_sample(img, p):
    """Bilinear value of ``img`` at ``p``; zero outside the grid."""
    return sample(img, p, order=1)


# --- line and circle quadrature --------------------------------------------


def _clip_to_hull(grid, base, direction):
    """Parameter interval of ``base + y * direction`` inside the grid hull.

    ``base`` has shape (n, 2); returns lower and upper bounds (upper < lower
    when the line misses the hull).
    """
    lo = np.full(base.shape[0], -np.inf)
    hi = np.full(base.shape[0], np.inf)
    hw = grid.half_width
    for k in range(2):
        if abs(direction[k]) < 1e-15:
            outside = np.abs(base[:, k]) > hw[k]
            hi = np.where(outside, -np.inf, hi)
            continue
        y1 = (-hw[k] - base[:, k]) / direction[k]
        y2 = (hw[k] - base[:, k]) / direction[k]
        lo = np.maximum(lo, np.minimum(y1, y2))
        hi = np.minimum(hi, np.maximum(y1, y2))
    return lo, hi


def _midpoint_along(img, base, direction, lo, hi, step, order):
    length = np.clip(hi - lo, 0.0, None)
    length = np.where(np.isfinite(length), length, 0.0)
    if not np.any(length > 0):
        return np.zeros(base.shape[0], dtype=np.complex128)
    n_mid = max(1, math.ceil(float(length.max()) / step))
    frac = (np.arange(n_mid) + 0.5) / n_mid
    lo = np.where(length > 0, lo, 0.0)
    y = lo[:, None] + length[:, None] * frac[None, :]
    points = base[:, None, :] + y[..., None] * np.asarray(direction)[None, None, :]
    values = sample_many(img, points, order)
    return values.sum(axis=1) * (length / n_mid)


def line_integrals_arclength(img, omega, ts, step, order=FORWARD_ORDER):
    """Integrals of ``img`` over the lines x . omega = t, for every t in ``ts``.

    The lines are parametrized by arclength, x = t omega + y omega_perp, and
    clipped to the grid hull; all lines share one midpoint count, chosen so
    that the longest segment uses cells no longer than ``step``.  Samples are
    bilinear unless ``order`` asks for a spline.
    """
    if step <= 0:
        raise DomainError(f"step must be positive, got {step}")
    omega = np.asarray(omega, dtype=float)
    perp = np.array([-omega[1], omega[0]])
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    base = ts[:, None] * omega[None, :]
    lo, hi = _clip_to_hull(img.grid, base, perp)
    return _midpoint_along(img, base, perp, lo, hi, step, order)


def line_integral_arclength(img, omega, t, step, order=FORWARD_ORDER):
    return complex(line_integrals_arclength(img, omega, [t], step, order)[0])


def line_integrals_graph(img, v, ts, step, order=FORWARD_ORDER):
    """Integrals of ``img`` over the graphs x1 = t - v x2, measured in dx2."""
    if step <= 0:
        raise DomainError(f"step must be positive, got {step}")
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    base = np.stack([ts, np.zeros_like(ts)], axis=1)
    direction = np.array([-float(v), 1.0])
    lo, hi = _clip_to_hull(img.grid, base, direction)
    return _midpoint_along(img, base, direction, lo, hi, step, order)


def line_integral_graph(img, v, t, step, order=FORWARD_ORDER):
    return complex(line_integrals_graph(img, v, [t], step, order)[0])


def circle_integrals(img, centers, r, nphi, order=FORWARD_ORDER):
    """Trapezoid rule for int_0^2pi f(c - r w(phi)) dphi at many centers."""
    if not r > 0:
        raise DomainError(f"circle radius must be positive, got {r}")
    if nphi < 8:
        raise DomainError(f"nphi must be at least 8, got {nphi}")
    centers = np.asarray(centers, dtype=float).reshape(-1, 2)
    phis = TWO_PI * np.arange(nphi) / nphi
    offsets = r * np.stack([np.cos(phis), np.sin(phis)], axis=1)
    points = centers[:, None, :] - offsets[None, :, :]
    return sample_many(img, points, order).sum(axis=1) * (TWO_PI / nphi)


def circle_integral(img, c, r, nphi, order=FORWARD_ORDER):
    return complex(circle_integrals(img, [c], r, nphi, order)[0])


# --- off-grid evaluation of the image spectrum -----------------------------


def spectrum_on_points(img, xi1, xi2, chunk=2048):
    """Discrete-time Fourier transform dx dy sum f(x) exp(-2 pi i xi . x) at arbitrary points.

    This is the trigonometric interpolant of `dft2_unitary` and coincides
    with it on the grid frequencies.
    """
    grid = img.grid
    xi1 = np.asarray(xi1, dtype=float).ravel()
    xi2 = np.asarray(xi2, dtype=float).ravel()
    out = np.empty(xi1.shape, dtype=np.complex128)
    for start in range(0, xi1.size, chunk):
        sl = slice(start, start + chunk)
        e1 = np.exp(-2j * math.pi * np.outer(xi1[sl], grid.x1))
        e2 = np.exp(-2j * math.pi * np.outer(xi2[sl], grid.x2))
        out[sl] = np.sum((e1 @ img.samples) * e2, axis=1)
    return out * grid.cell_area


def spectrum_on_grid(img, freq1, freq2):
    """Same transform on the tensor grid freq1 x freq2."""
    grid = img.grid
    e1 = np.exp(-2j * math.pi * np.outer(freq1, grid.x1))
    e2 = np.exp(-2j * math.pi * np.outer(freq2, grid.x2))
    return e1 @ img.samples @ e2.T * grid.cell_area


def _stack_phase(grid, sign):
    x0, y0 = grid.origin
    return np.outer(_origin_phase(grid.freq1, x0, sign), _origin_phase(grid.freq2, y0, sign))


def dft2_stack(samples, grid, workers=None):
    """`dft2_unitary` over the two leading axes of an (n1, n2, ...) array."""
    workers = workers or get_thread_count()
    raw = scipy.fft.fftshift(scipy.fft.fft2(samples, axes=(0, 1), workers=workers), axes=(0, 1))
    phase = _stack_phase(grid, -1).reshape(grid.shape + (1,) * (samples.ndim - 2))
    return raw * phase * grid.cell_area


def idft2_stack(values, grid, workers=None):
    """Inverse of `dft2_stack`."""
    workers = workers or get_thread_count()
    phase = _stack_phase(grid, 1).reshape(grid.shape + (1,) * (values.ndim - 2))
    shifted = scipy.fft.ifftshift(values * phase, axes=(0, 1))
    return scipy.fft.ifft2(shifted, axes=(0, 1), workers=workers) / grid.cell_area
