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


"""Closed-form test images.

Every phantom knows its values, most know their Fourier transform, and all
can be rendered moved by a group element, which gives exact references for
the intertwining and semi-invariance checks.
"""

__all__ = [
    "Phantom",
    "GaussianPhantom",
    "DogPhantom",
    "DiskPhantom",
    "BarsPhantom",
    "ConeDogPhantom",
    "RandomBlobsPhantom",
    "PHANTOM_KINDS",
    "make_phantom",
]

import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.special

from .exceptions import DomainError
from .groups import Sim2Element
from .representations import pi_image
from .sampling import Image, Spectrum, idft2_unitary

logger = logging.getLogger(__name__)


class Phantom:
    """Base class; subclasses define `values` and, when known, `spectrum`."""

    kind = "phantom"
    has_values = True

    def values(self, x1, x2):
        raise NotImplementedError()

    def spectrum(self, xi1, xi2):
        return None

    def check_grid(self, grid):
        pass

    def render(self, grid):
        self.check_grid(grid)
        if not self.has_values:
            xi1, xi2 = grid.freq_mesh()
            return idft2_unitary(Spectrum(grid, self.spectrum(xi1, xi2)))
        return Image.from_function(grid, self.values)

    def render_transformed(self, grid, g):
        """pi(g) f on ``grid``, exact wherever the values are closed form."""
        if not self.has_values:
            return pi_image(self.render(grid), g)
        x = np.stack(grid.mesh(), axis=-1) - g.bvec
        y = x @ np.linalg.inv(g.linear).T
        scale = 1.0 / g.a if isinstance(g, Sim2Element) else abs(g.a) ** -0.75
        return Image(grid, scale * self.values(y[..., 0], y[..., 1]))


def _gaussian(x1, x2, center, width):
    return np.exp(-math.pi * ((x1 - center[0]) ** 2 + (x2 - center[1]) ** 2) / width**2)


def _shift_phase(xi1, xi2, center):
    return np.exp(-2j * math.pi * (center[0] * xi1 + center[1] * xi2))


@dataclass(frozen=True)
class GaussianPhantom(Phantom):
    """amplitude exp(-pi |x - center|^2 / width^2)."""

    width: float = 0.25
    center: tuple = (0.0, 0.0)
    amplitude: float = 1.0
    kind = "gaussian"

    def __post_init__(self):
        if not self.width > 0:
            raise DomainError(f"gaussian width must be positive, got {self.width}")

    def values(self, x1, x2):
        return self.amplitude * _gaussian(x1, x2, self.center, self.width)

    def spectrum(self, xi1, xi2):
        xi1 = np.asarray(xi1, dtype=float)
        xi2 = np.asarray(xi2, dtype=float)
        envelope = self.width**2 * np.exp(-math.pi * self.width**2 * (xi1**2 + xi2**2))
        return self.amplitude * envelope * _shift_phase(xi1, xi2, self.center)


@dataclass(frozen=True)
class DogPhantom(Phantom):
    """Difference of two unit-mass Gaussians: zero mean, smooth and band-limited."""

    inner_width: float = 0.25
    outer_width: float = 0.5
    center: tuple = (0.0, 0.0)
    amplitude: float = 1.0
    kind = "dog"

    def __post_init__(self):
        if not 0 < self.inner_width < self.outer_width:
            raise DomainError(
                f"dog widths must satisfy 0 < inner < outer, got {self.inner_width}, {self.outer_width}"
            )

    def values(self, x1, x2):
        inner = _gaussian(x1, x2, self.center, self.inner_width) / self.inner_width**2
        outer = _gaussian(x1, x2, self.center, self.outer_width) / self.outer_width**2
        return self.amplitude * (inner - outer)

    def spectrum(self, xi1, xi2):
        xi1 = np.asarray(xi1, dtype=float)
        xi2 = np.asarray(xi2, dtype=float)
        rho2 = xi1**2 + xi2**2
        radial = np.exp(-math.pi * self.inner_width**2 * rho2) - np.exp(-math.pi * self.outer_width**2 * rho2)
        return self.amplitude * radial * _shift_phase(xi1, xi2, self.center)


@dataclass(frozen=True)
class DiskPhantom(Phantom):
    radius: float = 0.5
    center: tuple = (0.0, 0.0)
    amplitude: float = 1.0
    kind = "disk"

    def __post_init__(self):
        if not self.radius > 0:
            raise DomainError(f"disk radius must be positive, got {self.radius}")

    def check_grid(self, grid):
        reach = max(abs(self.center[0]), abs(self.center[1])) + self.radius
        if reach > min(grid.half_width):
            raise DomainError(
                f"disk of radius {self.radius:g} at {self.center} leaves the grid half-width "
                f"{min(grid.half_width):g}"
            )

    def values(self, x1, x2):
        r2 = (x1 - self.center[0]) ** 2 + (x2 - self.center[1]) ** 2
        return np.where(r2 <= self.radius**2, self.amplitude, 0.0)

    def spectrum(self, xi1, xi2):
        """amplitude R J1(2 pi R |xi|) / |xi|, with the limit pi R^2 at 0."""
        xi1 = np.asarray(xi1, dtype=float)
        xi2 = np.asarray(xi2, dtype=float)
        rho = np.hypot(xi1, xi2)
        safe = np.where(rho > 0, rho, 1.0)
        radial = np.where(
            rho > 0, self.radius * scipy.special.j1(2.0 * math.pi * self.radius * safe) / safe, math.pi * self.radius**2
        )
        return self.amplitude * radial * _shift_phase(xi1, xi2, self.center)


@dataclass(frozen=True)
class BarsPhantom(Phantom):
    """``n_bars`` parallel rectangles along x2, alternating in sign when ``balanced``."""

    n_bars: int = 3
    width: float = 0.2
    length: float = 1.2
    spacing: float = 0.4
    balanced: bool = False
    kind = "bars"

    def __post_init__(self):
        if self.n_bars < 1 or not (self.width > 0 and self.length > 0 and self.spacing >= self.width):
            raise DomainError(
                f"bars need n >= 1, positive sizes and spacing >= width, got "
                f"{self.n_bars}, {self.width}, {self.length}, {self.spacing}"
            )

    @property
    def offsets(self):
        return (np.arange(self.n_bars) - (self.n_bars - 1) / 2.0) * self.spacing

    def _signs(self):
        if self.balanced:
            return np.where(np.arange(self.n_bars) % 2 == 0, 1.0, -1.0)
        return np.ones(self.n_bars)

    def check_grid(self, grid):
        hw1, hw2 = grid.half_width
        if abs(self.offsets[0]) + self.width / 2 > hw1 or self.length / 2 > hw2:
            raise DomainError(f"bars do not fit in the grid half-widths {grid.half_width}")

    def values(self, x1, x2):
        out = np.zeros(np.broadcast(x1, x2).shape)
        along = np.abs(x2) <= self.length / 2
        for offset, sign in zip(self.offsets, self._signs()):
            out = out + sign * ((np.abs(x1 - offset) <= self.width / 2) & along)
        return out

    def spectrum(self, xi1, xi2):
        xi1 = np.asarray(xi1, dtype=float)
        xi2 = np.asarray(xi2, dtype=float)
        box = self.width * self.length * np.sinc(self.width * xi1) * np.sinc(self.length * xi2)
        comb = sum(sign * np.exp(-2j * math.pi * offset * xi1) for offset, sign in zip(self.offsets, self._signs()))
        return box * comb


@dataclass(frozen=True)
class ConeDogPhantom(Phantom):
    """`DogPhantom` spectrum restricted to the cone |xi2| < slope |xi1|.

    The restriction is a smooth taper, so the image is smooth and real but
    has no closed-form values; rendering goes through the inverse DFT.
    """

    inner_width: float = 0.25
    outer_width: float = 0.5
    slope: float = 1.0
    kind = "cone_dog"
    has_values = False

    def __post_init__(self):
        if not self.slope > 0:
            raise DomainError(f"cone slope must be positive, got {self.slope}")
        DogPhantom(self.inner_width, self.outer_width)

    def spectrum(self, xi1, xi2):
        xi1, xi2 = np.broadcast_arrays(np.asarray(xi1, dtype=float), np.asarray(xi2, dtype=float))
        taper = np.zeros(xi1.shape)
        nonzero = xi1 != 0.0
        u = xi2[nonzero] / (self.slope * xi1[nonzero])
        inside = np.abs(u) < 1.0
        values = np.zeros(u.shape)
        values[inside] = np.exp(1.0 - 1.0 / (1.0 - u[inside] ** 2))
        taper[nonzero] = values
        dog = DogPhantom(self.inner_width, self.outer_width).spectrum(xi1, xi2)
        return dog * taper


@dataclass(frozen=True)
class RandomBlobsPhantom(Phantom):
    """Sum of randomly placed and sized `DogPhantom` blobs, reproducible from ``seed``."""

    seed: int = 0
    n_blobs: int = 6
    extent: float = 1.0
    min_width: float = 0.1
    max_width: float = 0.25
    kind = "random"

    def __post_init__(self):
        if self.n_blobs < 1 or not (0 < self.min_width <= self.max_width):
            raise DomainError(
                f"need at least one blob and 0 < min_width <= max_width, got "
                f"{self.n_blobs}, {self.min_width}, {self.max_width}"
            )

    @property
    def blobs(self):
        rng = np.random.default_rng(self.seed)
        centers = rng.uniform(-self.extent, self.extent, size=(self.n_blobs, 2))
        widths = rng.uniform(self.min_width, self.max_width, size=self.n_blobs)
        amplitudes = rng.normal(size=self.n_blobs)
        return [
            DogPhantom(w, 2.0 * w, (float(c[0]), float(c[1])), float(amp))
            for c, w, amp in zip(centers, widths, amplitudes)
        ]

    def values(self, x1, x2):
        return sum(blob.values(x1, x2) for blob in self.blobs)

    def spectrum(self, xi1, xi2):
        return sum(blob.spectrum(xi1, xi2) for blob in self.blobs)


_PHANTOMS = {
    cls.kind: cls
    for cls in (GaussianPhantom, DogPhantom, DiskPhantom, BarsPhantom, ConeDogPhantom, RandomBlobsPhantom)
}

PHANTOM_KINDS = tuple(_PHANTOMS)


def make_phantom(kind, **params):
    """Phantom of the given kind; ``params`` are its dataclass fields."""
    try:
        cls = _PHANTOMS[kind]
    except KeyError:
        raise DomainError(f"unknown phantom {kind!r}; expected one of {PHANTOM_KINDS}") from None
    try:
        phantom = cls(**params)
    except TypeError as e:
        raise DomainError(f"bad parameters for the {kind} phantom: {e}") from None
    logger.debug(f"phantom {phantom}")
    return phantom
