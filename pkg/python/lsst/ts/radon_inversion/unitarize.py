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


"""Fourier multipliers that unitarize the Radon transforms.

The polar and affine operators multiply the ``t`` spectrum of every row by
``|tau|^(1/2)``; the circular operator multiplies the spectrum over the
centers by ``k_alpha |tau|^((1 - alpha)/2)``.  ``A_s`` multiplies the image
spectrum by ``|xi|^s``.  Every multiplier is 0 at zero frequency.

Row and center transforms are zero-padded before multiplying and cropped
back afterwards; with ``pad=1`` the multipliers are exactly periodic and
compose exactly.
"""

__all__ = [
    "MultiplierSpec",
    "apply_multiplier_rows",
    "apply_multiplier_planes",
    "apply_I_polar",
    "apply_I_affine",
    "apply_I_circular",
    "apply_I",
    "apply_As",
    "unitarized_radon",
    "unitarized_energy",
    "ROW_PADDING",
    "CENTER_PADDING",
]

import logging
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError, ShapeMismatchError
from .radon import AffineSinogram, CircularSinogram, PolarSinogram, radon_transform
from .sampling import (
    Image,
    dft1_rows,
    dft2_stack,
    dft2_unitary,
    idft1_rows,
    idft2_stack,
    idft2_unitary,
    pad_centered,
)
from .special import bessel_j0, k_alpha
from .utils import TWO_PI

logger = logging.getLogger(__name__)

ROW_PADDING = 4
CENTER_PADDING = 2

# Relative size of |F f(0)| tolerated by negative-exponent multipliers.
DC_TOLERANCE = 1e-10

MULTIPLIER_AXES = ("t", "c", "image")


@dataclass(frozen=True)
class MultiplierSpec:
    """scale * |frequency|^exponent on one kind of frequency axis."""

    axis: str
    exponent: float
    scale: float = 1.0

    def __post_init__(self):
        if self.axis not in MULTIPLIER_AXES:
            raise DomainError(f"unknown multiplier axis {self.axis!r}; expected one of {MULTIPLIER_AXES}")
        if not math.isfinite(self.exponent):
            raise DomainError(f"multiplier exponent must be finite, got {self.exponent}")
        if not (math.isfinite(self.scale) and self.scale > 0):
            raise DomainError(f"multiplier scale must be positive, got {self.scale}")

    def values(self, frequency):
        rho = np.abs(np.asarray(frequency, dtype=float))
        out = np.zeros_like(rho)
        nonzero = rho > 0
        out[nonzero] = self.scale * rho[nonzero] ** self.exponent
        return out

    def then(self, other):
        """The multiplier of applying ``self`` and then ``other``."""
        if other.axis != self.axis:
            raise DomainError(f"cannot compose multipliers on axes {self.axis} and {other.axis}")
        return MultiplierSpec(self.axis, self.exponent + other.exponent, self.scale * other.scale)


def apply_multiplier_rows(samples, spacing, origin, spec, pad=ROW_PADDING):
    """Apply ``spec`` along the last axis of ``samples``."""
    n = samples.shape[-1]
    padded, p_origin = pad_centered(samples, pad * n, origin, spacing)
    freqs, spectra = dft1_rows(padded, spacing, p_origin)
    out = idft1_rows(spectra * spec.values(freqs), spacing, p_origin)
    left = (pad * n - n) // 2
    return out[..., left : left + n]


def apply_multiplier_planes(samples, grid, spec, pad=CENTER_PADDING):
    """Apply ``spec`` over the two leading axes, sampled on ``grid``."""
    if samples.shape[:2] != grid.shape:
        raise ShapeMismatchError(f"planes of shape {samples.shape[:2]} do not fit grid {grid.shape}")
    outer = grid.padded(pad) if pad > 1 else grid
    i0, j0 = outer.crop_offsets(grid)
    work = np.zeros(outer.shape + samples.shape[2:], dtype=np.complex128)
    work[i0 : i0 + grid.n1, j0 : j0 + grid.n2] = samples
    xi1, xi2 = outer.freq_mesh()
    mult = spec.values(np.hypot(xi1, xi2)).reshape(outer.shape + (1,) * (samples.ndim - 2))
    out = idft2_stack(dft2_stack(work, outer) * mult, outer)
    return out[i0 : i0 + grid.n1, j0 : j0 + grid.n2]


def apply_I_polar(sino, pad=ROW_PADDING):
    """|tau|^(1/2) on the offset spectrum of every polar row."""
    if not isinstance(sino, PolarSinogram):
        raise ShapeMismatchError(f"expected a polar sinogram, got {type(sino).__name__}")
    axes = sino.axes
    spec = MultiplierSpec("t", 0.5)
    return sino.with_samples(apply_multiplier_rows(sino.samples, axes.dt, axes.t_origin, spec, pad))


def apply_I_affine(sino, pad=ROW_PADDING):
    """|tau|^(1/2) on the offset spectrum of every affine row."""
    if not isinstance(sino, AffineSinogram):
        raise ShapeMismatchError(f"expected an affine sinogram, got {type(sino).__name__}")
    axes = sino.axes
    spec = MultiplierSpec("t", 0.5)
    return sino.with_samples(apply_multiplier_rows(sino.samples, axes.dt, axes.t_origin, spec, pad))


def apply_I_circular(sino, pad=CENTER_PADDING):
    """k_alpha |tau|^((1 - alpha)/2) on the center spectrum of every radius slice."""
    if not isinstance(sino, CircularSinogram):
        raise ShapeMismatchError(f"expected a circular sinogram, got {type(sino).__name__}")
    spec = MultiplierSpec("c", (1.0 - sino.alpha) / 2.0, k_alpha(sino.alpha))
    return sino.with_samples(apply_multiplier_planes(sino.samples, sino.axes.cgrid, spec, pad))


def apply_I(sino, pad=None):
    """The unitarizing operator of the sinogram's family."""
    if isinstance(sino, CircularSinogram):
        return apply_I_circular(sino, pad or CENTER_PADDING)
    if isinstance(sino, AffineSinogram):
        return apply_I_affine(sino, pad or ROW_PADDING)
    return apply_I_polar(sino, pad or ROW_PADDING)


def apply_As(img, s):
    """A_s f with F A_s f(xi) = |xi|^s F f(xi).

    Raises
    ------
    DomainError
        If ``s < 0`` and the image has a non-zero mean.
    """
    spectrum = dft2_unitary(img)
    if s < 0:
        dc = abs(complex(np.sum(img.samples))) * img.grid.cell_area
        if dc > DC_TOLERANCE * max(img.norm(), np.finfo(float).tiny):
            raise DomainError(f"A_s with s={s} needs a zero-mean image; |F f(0)| = {dc:.3e}")
    xi1, xi2 = img.grid.freq_mesh()
    spectrum.samples = spectrum.samples * MultiplierSpec("image", s).values(np.hypot(xi1, xi2))
    return Image(img.grid, idft2_unitary(spectrum).samples)


def unitarized_radon(img, family, axes, **kwargs):
    """Q f = I R f on the given sinogram axes."""
    return apply_I(radon_transform(img, family, axes, **kwargs))


def _line_energy(sino, weight, angle_points):
    axes = sino.axes
    n = axes.n_t
    padded, p_origin = pad_centered(sino.samples, ROW_PADDING * n, axes.t_origin, axes.dt)
    freqs, spectra = dft1_rows(padded, axes.dt, p_origin)
    density = np.abs(spectra) ** 2
    if weight is not None:
        xi1, xi2 = angle_points(freqs)
        density = density * weight(xi1, xi2)
    return density, freqs[1] - freqs[0]


def unitarized_energy(sino, weight=None):
    """int weight(xi) |F Q f|^2 evaluated from a unitarized sinogram.

    For lines this is the measure-weighted norm computed on the offset
    spectrum, with each row frequency tau mapped to its slice point of the
    image plane.  For circles the radius integral is completed below the
    first radius (where J0 is 1) and beyond the last radius (where J0^2
    averages to 1 / (pi x)), both from the slice at the smallest radius.

    Parameters
    ----------
    sino : `PolarSinogram`, `AffineSinogram` or `CircularSinogram`
        The unitarized sinogram Q f.
    weight : callable, optional
        ``weight(xi1, xi2)`` on the image frequency plane; 1 when omitted.

    Returns
    -------
    energy : `float`
    """
    if isinstance(sino, PolarSinogram):
        thetas = sino.axes.thetas

        def points(freqs):
            return np.outer(np.cos(thetas), freqs), np.outer(np.sin(thetas), freqs)

        density, dtau = _line_energy(sino, weight, points)
        return float(np.sum(density)) * dtau * sino.axes.dtheta

    if isinstance(sino, AffineSinogram):
        vs = sino.axes.vs

        def points(freqs):
            return np.broadcast_to(freqs[None, :], (len(vs), len(freqs))), np.outer(vs, freqs)

        density, dtau = _line_energy(sino, weight, points)
        return float(np.sum(density * sino.axes.v_weights()[:, None])) * dtau

    axes = sino.axes
    alpha = sino.alpha
    cgrid = axes.cgrid
    spectra = dft2_stack(sino.samples, cgrid)
    xi1, xi2 = cgrid.freq_mesh()
    rho = np.hypot(xi1, xi2)
    density = np.sum(np.abs(spectra) ** 2 * axes.r_weights(alpha)[None, None, :], axis=-1)

    r_min, r_max = axes.rs[0], axes.rs[-1]
    j0 = bessel_j0(TWO_PI * rho * r_min)
    usable = np.abs(j0) > 0.5
    base = np.zeros(rho.shape)
    base[usable] = np.abs(spectra[..., 0][usable] / j0[usable]) ** 2
    head = base * r_min ** (1.0 - alpha) / (1.0 - alpha)
    tail = np.zeros(rho.shape)
    nonzero = rho > 0
    tail[nonzero] = base[nonzero] * r_max**-alpha / (2.0 * math.pi**2 * alpha * rho[nonzero])
    cell = cgrid.freq_cell_area
    logger.debug(
        f"circular energy: body {float(np.sum(density)) * cell:.6g}, "
        f"head {float(np.sum(head)) * cell:.3g}, tail {float(np.sum(tail)) * cell:.3g}"
    )
    density = density + head + tail
    if weight is not None:
        density = density * weight(xi1, xi2)
    return float(np.sum(density)) * cell
