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


"""Quasi-regular representations as resampling operators.

``pi_image`` applies pi(g) to an image by cubic spline interpolation and
``hat_pi`` applies pi-hat(g) to a sinogram by linear interpolation.  Both
are zero wherever the pulled-back point leaves the sampled domain:

* SIM(2) on images:      pi(g) f(x) = a^-1 f(g^-1 [x])
* shearlets on images:   pi(g) f(x) = |a|^-3/4 f(g^-1 [x])
* polar lines:           pi-hat(g) F(theta, t) = a^-1/2 F(g^-1 . (theta, t))
* affine lines:          pi-hat(g) F(v, t) = |a|^-3/4 F(g^-1 . (v, t))
* circles:               pi-hat(g) F(c, r) = a^((alpha-3)/2) F(g^-1 . (c, r))
"""

__all__ = ["pi_image", "hat_pi", "representation_scale"]

import numpy as np
from scipy import ndimage

from .groups import (
    Sim2Element,
    affine_lines_pullback,
    circles_pullback,
    polar_lines_pullback,
)
from .radon import AffineSinogram, PolarSinogram
from .sampling import SPLINE_ORDER, Image, sample_many

_LINEAR = dict(order=1, mode="nearest", prefilter=False)


def _interpolate(samples, coords, inside):
    re = ndimage.map_coordinates(samples.real, coords, **_LINEAR)
    im = ndimage.map_coordinates(samples.imag, coords, **_LINEAR)
    return np.where(inside, re + 1j * im, 0.0)


def pi_image(img, g, out_grid=None):
    """pi(g) f sampled on ``out_grid`` (the input grid by default)."""
    grid = out_grid or img.grid
    x = np.stack(grid.mesh(), axis=-1) - g.bvec
    pulled = x @ np.linalg.inv(g.linear).T
    scale = 1.0 / g.a if isinstance(g, Sim2Element) else abs(g.a) ** -0.75
    return Image(grid, scale * sample_many(img, pulled, SPLINE_ORDER))


def representation_scale(sino, g):
    """The scalar factor of pi-hat(g) on ``sino``'s family."""
    if isinstance(sino, PolarSinogram):
        return g.a**-0.5
    if isinstance(sino, AffineSinogram):
        return abs(g.a) ** -0.75
    return g.a ** ((sino.alpha - 3.0) / 2.0)


def _hat_pi_polar(sino, g):
    axes = sino.axes
    theta, t = np.meshgrid(axes.thetas, axes.ts, indexing="ij")
    theta_p, t_p = polar_lines_pullback(g, theta, t)
    # one extra row at theta = pi holds F(pi, t) = F(0, -t)
    extended = np.concatenate([sino.samples, sino.samples[:1, ::-1]], axis=0)
    i = theta_p / axes.dtheta
    j = (t_p - axes.t_origin) / axes.dt
    inside = (j >= 0) & (j <= axes.n_t - 1)
    return _interpolate(extended, np.stack([i, j]), inside), inside


def _hat_pi_affine(sino, g):
    axes = sino.axes
    v, t = np.meshgrid(axes.vs, axes.ts, indexing="ij")
    v_p, t_p = affine_lines_pullback(g, v, t)
    i = (v_p + axes.v_max) / axes.dv
    j = (t_p - axes.t_origin) / axes.dt
    inside = (i >= 0) & (i <= axes.n_v - 1) & (j >= 0) & (j <= axes.n_t - 1)
    return _interpolate(sino.samples, np.stack([i, j]), inside), inside


def _hat_pi_circular(sino, g):
    axes = sino.axes
    cgrid = axes.cgrid
    centers = np.stack(cgrid.mesh(), axis=-1)
    c_p, r_p = circles_pullback(g, centers, axes.radii)
    x0, y0 = cgrid.origin
    i = (c_p[..., 0] - x0) / cgrid.dx
    j = (c_p[..., 1] - y0) / cgrid.dy
    # radii are not uniform: fractional index by piecewise-linear lookup
    k = np.interp(r_p, axes.radii, np.arange(len(axes.rs)), left=-1.0, right=-1.0)
    shape = axes.shape
    i = np.broadcast_to(i[..., None], shape)
    j = np.broadcast_to(j[..., None], shape)
    k = np.broadcast_to(k[None, None, :], shape)
    inside = (i >= 0) & (i <= cgrid.n1 - 1) & (j >= 0) & (j <= cgrid.n2 - 1) & (k >= 0)
    return _interpolate(sino.samples, np.stack([i, j, k]), inside), inside


def hat_pi(sino, g, return_mask=False):
    """pi-hat(g) applied to a sinogram, on the sinogram's own axes.

    Parameters
    ----------
    sino : `PolarSinogram`, `AffineSinogram` or `CircularSinogram`
        Function on the parameter space.
    g : `Sim2Element` or `ShearletElement`
        Group element of the sinogram's family.
    return_mask : `bool`
        Also return the boolean mask of samples whose pulled-back parameter
        falls inside the sampled domain.

    Returns
    -------
    result : sinogram of the same type
    mask : `numpy.ndarray`, only when ``return_mask``
    """
    sino.family.check_element(g)
    if isinstance(sino, PolarSinogram):
        values, inside = _hat_pi_polar(sino, g)
    elif isinstance(sino, AffineSinogram):
        values, inside = _hat_pi_affine(sino, g)
    else:
        values, inside = _hat_pi_circular(sino, g)
    result = sino.with_samples(representation_scale(sino, g) * values)
    if return_mask:
        return result, inside
    return result
