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


"""Discretized group, voice transforms and synthesis.

A `GroupGrid` discretizes G as a translation lattice times a list of
(angle, scale) pairs -- (shear, scale) for the shearlet group -- with Haar
quadrature weights.  For every pair the coefficients on the whole lattice
come from one inverse FFT:

* `voice_analyze` correlates the image with pi(0, angle, a) psi;
* `sinogram_analyze` computes chi(g) <R f, pi-hat(g) Psi> from the sinogram
  alone: a 1D correlation of every row with the window followed by a
  backprojection onto the lattice for lines, a 2D correlation over the
  centers folded with the radius integral for circles;
* `Synthesizer` accumulates sum_g w V(g) pi(g) psi in frequency.

Coefficient planes live on the lattice zero-padded by ``GroupGrid.pad``,
so that the coefficients of an image supported in the lattice do not wrap.
"""

__all__ = [
    "GroupPlane",
    "GroupGrid",
    "CoefficientField",
    "Synthesizer",
    "voice_analyze",
    "iter_voice_planes",
    "sinogram_analyze",
    "iter_sinogram_planes",
    "lowpass_analyze",
    "synthesize",
    "coverage",
    "direct_coefficient",
    "UPSAMPLE",
]

import logging
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError, FamilyMismatchError, ShapeMismatchError
from .groups import ShearletElement, Sim2Element, character
from .radon import CircularSinogram, PolarSinogram, sinogram_inner
from .representations import hat_pi
from .sampling import Image, dft1_rows, dft2_stack, idft1_rows, idft2_stack, pad_centered
from .special import bessel_j0
from .unitarize import ROW_PADDING
from .utils import TWO_PI, ordered_map

logger = logging.getLogger(__name__)

# Oversampling of correlated sinogram rows before linear backprojection.
UPSAMPLE = 4

GROUPS = ("sim2", "shearlet")


@dataclass(frozen=True)
class GroupPlane:
    """One (angle, scale) cell; ``angle`` is phi for SIM(2) and the shear s otherwise."""

    index: int
    angle: float
    scale: float
    weight: float

    def element(self, group, b=(0.0, 0.0)):
        if group == "sim2":
            return Sim2Element(b, self.angle, self.scale)
        return ShearletElement(b, self.angle, self.scale)


@dataclass(frozen=True)
class GroupGrid:
    """Quadrature of the Haar measure on a finite window of G.

    Scales: the log-uniform partition of [a_min, a_max] into ``n_scales``
    cells, node a = a_min q^(k + 1/2) with q = (a_max / a_min)^(1 / n) and
    cell length a ln q.  Angles: ``n_angles`` nodes 2 pi k / n (SIM(2)) or
    the cell midpoints of [-s_max, s_max] (shearlets).  A cell carries
    weight |a|^-3 * angle step * a ln q; the lattice contributes dx dy.
    Signed shearlet grids repeat every scale with a < 0.
    """

    group: str
    lattice: object
    n_angles: int
    a_min: float
    a_max: float
    n_scales: int
    s_max: float = 0.0
    signed: bool = False
    pad: int = 2

    def __post_init__(self):
        if self.group not in GROUPS:
            raise DomainError(f"unknown group {self.group!r}; expected one of {GROUPS}")
        if self.n_angles < 1 or self.n_scales < 1:
            raise DomainError(f"need positive angle and scale counts, got {self.n_angles}, {self.n_scales}")
        if not (0 < self.a_min < self.a_max):
            raise DomainError(f"need 0 < a_min < a_max, got {self.a_min}, {self.a_max}")
        if self.group == "shearlet" and not self.s_max > 0:
            raise DomainError(f"shear range must be positive, got {self.s_max}")
        if self.pad < 1:
            raise DomainError(f"lattice padding must be at least 1, got {self.pad}")

    @classmethod
    def sim2(cls, lattice, n_phi, a_min, a_max, n_a, pad=2):
        return cls("sim2", lattice, int(n_phi), float(a_min), float(a_max), int(n_a), pad=int(pad))

    @classmethod
    def shearlet(cls, lattice, n_s, s_max, a_min, a_max, n_a, signed=True, pad=2):
        return cls(
            "shearlet", lattice, int(n_s), float(a_min), float(a_max), int(n_a), float(s_max), bool(signed), int(pad)
        )

    @property
    def work_grid(self):
        return self.lattice.padded(self.pad) if self.pad > 1 else self.lattice

    @property
    def log_step(self):
        return math.log(self.a_max / self.a_min) / self.n_scales

    @property
    def magnitudes(self):
        return self.a_min * np.exp((np.arange(self.n_scales) + 0.5) * self.log_step)

    @property
    def scales(self):
        mags = self.magnitudes
        if self.signed:
            return np.concatenate([-mags[::-1], mags])
        return mags

    @property
    def angle_step(self):
        if self.group == "sim2":
            return TWO_PI / self.n_angles
        return 2.0 * self.s_max / self.n_angles

    @property
    def angles(self):
        if self.group == "sim2":
            return self.angle_step * np.arange(self.n_angles)
        return -self.s_max + (np.arange(self.n_angles) + 0.5) * self.angle_step

    def planes(self):
        """All cells, by increasing scale and then angle."""
        out = []
        for a in self.scales:
            weight = abs(a) ** -3 * self.angle_step * abs(a) * self.log_step
            for angle in self.angles:
                out.append(GroupPlane(len(out), float(angle), float(a), float(weight)))
        return out

    @property
    def n_planes(self):
        return self.n_angles * self.n_scales * (2 if self.signed else 1)

    def refined(self):
        """Twice the angles and scales over a range widened by sqrt(2) at each end."""
        root2 = math.sqrt(2.0)
        return GroupGrid(
            self.group,
            self.lattice,
            2 * self.n_angles,
            self.a_min / root2,
            self.a_max * root2,
            2 * self.n_scales,
            self.s_max,
            self.signed,
            self.pad,
        )

    def describe(self):
        angle = "phi" if self.group == "sim2" else f"s in [-{self.s_max:g}, {self.s_max:g}]"
        sign = " (both signs)" if self.signed else ""
        return (
            f"{self.group}: {self.n_angles} {angle} x {self.n_scales} scales in "
            f"[{self.a_min:g}, {self.a_max:g}]{sign} on {self.lattice.describe()} padded x{self.pad}"
        )


@dataclass(eq=False)
class CoefficientField:
    """Coefficient planes, one per `GroupPlane`, on the padded lattice."""

    grid: GroupGrid
    planes: np.ndarray

    def __post_init__(self):
        self.planes = np.asarray(self.planes, dtype=np.complex128)
        expected = (self.grid.n_planes,) + self.grid.work_grid.shape
        if self.planes.shape != expected:
            raise ShapeMismatchError(f"coefficient planes of shape {self.planes.shape}, expected {expected}")
        if not np.all(np.isfinite(self.planes)):
            raise DomainError("coefficients must be finite")

    def energy(self):
        """sum_g w |V(g)|^2 dx dy."""
        weights = np.array([p.weight for p in self.grid.planes()])
        per_plane = np.sum(np.abs(self.planes) ** 2, axis=(1, 2))
        return float(np.dot(weights, per_plane)) * self.grid.work_grid.cell_area

    def items(self):
        return zip(self.grid.planes(), self.planes)

    def _check(self, other):
        if other.grid != self.grid:
            raise ShapeMismatchError("coefficient fields live on different group grids")

    def __add__(self, other):
        self._check(other)
        return CoefficientField(self.grid, self.planes + other.planes)

    def __sub__(self, other):
        self._check(other)
        return CoefficientField(self.grid, self.planes - other.planes)

    def __mul__(self, scalar):
        return CoefficientField(self.grid, self.planes * scalar)

    __rmul__ = __mul__


def _check_wavelet(psi, grid):
    if psi.group != grid.group:
        raise FamilyMismatchError(f"{psi.kind} wavelet cannot analyse on a {grid.group} grid")


def _on_work_grid(img, grid):
    work = grid.work_grid
    if img.grid == work:
        return img
    if img.grid == grid.lattice:
        return img.embed(work)
    raise ShapeMismatchError(f"image grid {img.grid.describe()} is neither the lattice nor its padding")


# --- analysis from the image ----------------------------------------------


def iter_voice_planes(f, psi, grid):
    """Yield (plane, coefficients) for every cell of ``grid``, in order.

    V(b, angle, a) = int F f(xi) conj(F[pi(0, angle, a) psi](xi)) e^(2 pi i b.xi) dxi.
    """
    _check_wavelet(psi, grid)
    work = grid.work_grid
    f_hat = dft2_stack(_on_work_grid(f, grid).samples, work)
    xi1, xi2 = work.freq_mesh()
    for plane in grid.planes():
        window = psi.dilated_spectrum(plane.angle, plane.scale, xi1, xi2)
        yield plane, idft2_stack(f_hat * np.conj(window), work)


def voice_analyze(f, psi, grid):
    """Voice transform <f, pi(g) psi> on every lattice point and cell of ``grid``."""
    planes = [samples for _, samples in iter_voice_planes(f, psi, grid)]
    logger.info(f"voice transform on {grid.describe()}")
    return CoefficientField(grid, np.array(planes))


# --- analysis from the sinogram -------------------------------------------


class _LineCorrelator:
    """Row spectra of a line sinogram and the backprojection onto the work grid."""

    def __init__(self, sino, work, upsample=UPSAMPLE):
        axes = sino.axes
        self.work = work
        self.dt = axes.dt
        self.n_pad = ROW_PADDING * axes.n_t
        self.n_up = upsample * self.n_pad
        self.upsample = upsample
        padded, self.origin = pad_centered(sino.samples, self.n_pad, axes.t_origin, axes.dt)
        self.freqs, self.spectra = dft1_rows(padded, axes.dt, self.origin)

        b1, b2 = work.mesh()
        if isinstance(sino, PolarSinogram):
            self.params = axes.thetas
            self.row_weights = np.full(axes.n_theta, axes.dtheta)
            u = np.outer(np.cos(self.params), b1.ravel()) + np.outer(np.sin(self.params), b2.ravel())
        else:
            self.params = axes.vs
            self.row_weights = axes.v_weights()
            u = b1.ravel()[None, :] + np.outer(self.params, b2.ravel())
        pos = (u - self.origin) / (self.dt / upsample)
        idx = np.floor(pos).astype(np.int64)
        self.valid = (idx >= 0) & (idx < self.n_up - 1)
        idx = np.clip(idx, 0, self.n_up - 2)
        self.frac = pos - idx
        self.flat = idx + (np.arange(len(self.params)) * self.n_up)[:, None]

    def correlate(self, window_conj):
        """Rows of int F(row)(tau) window_conj(tau) e^(2 pi i u tau) dtau on a fine u grid."""
        up = np.zeros((len(self.params), self.n_up), dtype=np.complex128)
        left = (self.n_up - self.n_pad) // 2
        up[:, left : left + self.n_pad] = self.spectra * window_conj
        return idft1_rows(up, self.dt / self.upsample, self.origin)

    def backproject(self, rows):
        flat = rows.ravel()
        values = flat[self.flat] * (1.0 - self.frac) + flat[self.flat + 1] * self.frac
        values = np.where(self.valid, values, 0.0)
        return (self.row_weights @ values).reshape(self.work.shape)


class _CircularCorrelator:
    """The radius integral G(tau) = int r^-alpha F_c R f(tau, r) 2 pi J0(2 pi |tau| r) dr.

    The integral is completed below the first radius and beyond the last
    one as in `unitarized_energy`.
    """

    def __init__(self, sino, work):
        axes = sino.axes
        cgrid = axes.cgrid
        # correlate on the larger of the two nested grids, report on ``work``
        try:
            if cgrid.n1 <= work.n1 and cgrid.n2 <= work.n2:
                calc = work
                i0, j0 = work.crop_offsets(cgrid)
                samples = np.zeros(work.shape + (len(axes.rs),), dtype=np.complex128)
                samples[i0 : i0 + cgrid.n1, j0 : j0 + cgrid.n2] = sino.samples
            else:
                calc = cgrid
                cgrid.crop_offsets(work)
                samples = sino.samples
        except ShapeMismatchError:
            raise ShapeMismatchError(
                f"circle centers {cgrid.describe()} and the padded lattice {work.describe()} "
                "must be centered sub-grids of one another"
            ) from None
        alpha = sino.alpha
        self.work = work
        self.calc = calc
        self.alpha = alpha
        self.xi1, self.xi2 = calc.freq_mesh()
        rho = np.hypot(self.xi1, self.xi2)
        spectra = dft2_stack(samples, calc)
        radii = axes.radii
        weights = axes.r_weights(alpha)
        g = np.zeros(calc.shape, dtype=np.complex128)
        for k, r in enumerate(radii):
            g += weights[k] * spectra[..., k] * TWO_PI * bessel_j0(TWO_PI * rho * r)

        r_min, r_max = radii[0], radii[-1]
        kernel = TWO_PI * bessel_j0(TWO_PI * rho * r_min)
        usable = np.abs(kernel) > 0.5 * TWO_PI
        f_est = np.zeros(calc.shape, dtype=np.complex128)
        f_est[usable] = spectra[..., 0][usable] / kernel[usable]
        g += TWO_PI**2 * f_est * r_min ** (1.0 - alpha) / (1.0 - alpha)
        nonzero = rho > 0
        g[nonzero] += 2.0 * f_est[nonzero] * r_max**-alpha / (alpha * rho[nonzero])
        self.g = g

    def plane(self, window, plane):
        a = plane.scale
        c, s = math.cos(plane.angle), math.sin(plane.angle)
        factor = window.plane_factor(a * (c * self.xi1 + s * self.xi2), a * (-s * self.xi1 + c * self.xi2))
        # chi(g) a^((alpha-3)/2) from pi-hat and a^2 from the center dilation
        values = a**self.alpha * idft2_stack(self.g * np.conj(factor), self.calc)
        if self.calc == self.work:
            return values
        i0, j0 = self.calc.crop_offsets(self.work)
        return values[i0 : i0 + self.work.n1, j0 : j0 + self.work.n2]


def _line_plane(corr, window, plane, kind):
    a = plane.scale
    if kind == "polar":
        window_conj = np.conj(window.row_spectrum(corr.params[:, None] - plane.angle, a * corr.freqs[None, :]))
        return corr.backproject(corr.correlate(window_conj))
    # chi(g) |a|^-3/4 from pi-hat and |a| from the offset dilation
    slopes = (corr.params - plane.angle) / math.sqrt(abs(a))
    window_conj = np.conj(window.row_spectrum(slopes[:, None], a * corr.freqs[None, :]))
    return abs(a) ** -0.25 * corr.backproject(corr.correlate(window_conj))


def _check_sinogram(sino, window, grid):
    family = sino.family
    if window.family.kind != family.kind:
        raise FamilyMismatchError(f"{window.family} window cannot analyse a {family} sinogram")
    if family.group != grid.group:
        raise FamilyMismatchError(f"{family} sinograms need a {family.group} grid, got {grid.group}")


def iter_sinogram_planes(sino, window, grid, upsample=UPSAMPLE):
    """Yield (plane, chi(g) <sino, pi-hat(g) Psi>) over ``grid``, in order."""
    _check_sinogram(sino, window, grid)
    work = grid.work_grid
    if isinstance(sino, CircularSinogram):
        corr = _CircularCorrelator(sino, work)
        for plane in grid.planes():
            yield plane, corr.plane(window, plane)
        return
    corr = _LineCorrelator(sino, work, upsample)
    kind = sino.family.kind
    for plane in grid.planes():
        yield plane, _line_plane(corr, window, plane, kind)


def sinogram_analyze(sino, window, grid, upsample=UPSAMPLE):
    """Voice coefficients of f computed from its sinogram only.

    Parameters
    ----------
    sino : `PolarSinogram`, `AffineSinogram` or `CircularSinogram`
        R f on the family's parameter space.
    window : `SinogramWindow`
        Psi = I^2 R psi of the same family.
    grid : `GroupGrid`
        Cells and lattice of the analysis.
    upsample : `int`
        Oversampling of the correlated rows before backprojection.

    Returns
    -------
    coeffs : `CoefficientField`
    """
    _check_sinogram(sino, window, grid)
    work = grid.work_grid
    planes = grid.planes()
    if isinstance(sino, CircularSinogram):
        corr = _CircularCorrelator(sino, work)
        values = ordered_map(lambda plane: corr.plane(window, plane), planes)
    else:
        corr = _LineCorrelator(sino, work, upsample)
        kind = sino.family.kind
        values = ordered_map(lambda plane: _line_plane(corr, window, plane, kind), planes)
    logger.info(f"{sino.family} sinogram analysed on {grid.describe()}")
    return CoefficientField(grid, np.array(values))


def lowpass_analyze(sino, phi, grid, upsample=UPSAMPLE):
    """<f, T_b Phi> on the padded lattice from a polar sinogram.

    The row window is |tau| F Phi(tau w(theta)), the offset spectrum of
    I^2 R Phi.
    """
    if not isinstance(sino, PolarSinogram):
        raise FamilyMismatchError(f"the low-pass branch needs a polar sinogram, got {sino.family}")
    corr = _LineCorrelator(sino, grid.work_grid, upsample)
    tau = corr.freqs[None, :]
    theta = corr.params[:, None]
    window = np.abs(tau) * phi.spectrum(tau * np.cos(theta), tau * np.sin(theta))
    return corr.backproject(corr.correlate(np.conj(window)))


# --- synthesis ------------------------------------------------------------


class Synthesizer:
    """Accumulates sum_g w V(g) pi(g) psi plane by plane.

    Planes are added in the caller's order, so a fixed plane order gives
    bitwise reproducible images.
    """

    def __init__(self, psi, grid):
        _check_wavelet(psi, grid)
        self.psi = psi
        self.grid = grid
        self.work = grid.work_grid
        self.xi1, self.xi2 = self.work.freq_mesh()
        self.accumulator = np.zeros(self.work.shape, dtype=np.complex128)
        self.energy = 0.0
        self.n_added = 0

    def add(self, plane, samples):
        window = self.psi.dilated_spectrum(plane.angle, plane.scale, self.xi1, self.xi2)
        self.accumulator += plane.weight * dft2_stack(samples, self.work) * window
        self.energy += plane.weight * float(np.sum(np.abs(samples) ** 2)) * self.work.cell_area
        self.n_added += 1

    def add_lowpass(self, samples, phi):
        """Add int <f, T_b Phi> T_b Phi db."""
        self.accumulator += dft2_stack(samples, self.work) * phi.spectrum(self.xi1, self.xi2)

    def result(self):
        """The synthesized image on the lattice."""
        full = Image(self.work, idft2_stack(self.accumulator, self.work))
        return full.crop(self.grid.lattice) if self.work != self.grid.lattice else full


def synthesize(coeffs, psi, grid=None):
    """Image sum_g w V(g) pi(g) psi of a coefficient field."""
    grid = grid or coeffs.grid
    if grid != coeffs.grid:
        raise ShapeMismatchError("coefficients were computed on another group grid")
    synth = Synthesizer(psi, grid)
    for plane, samples in coeffs.items():
        synth.add(plane, samples)
    logger.info(f"synthesized {synth.n_added} planes on {grid.describe()}")
    return synth.result()


def coverage(grid, psi, xi1, xi2):
    """Discrete frame diagonal S(xi) = sum_g w |F[pi(g) psi](xi)|^2.

    Synthesis after analysis multiplies F f by S, so S = 1 on the band the
    grid resolves.
    """
    xi1 = np.asarray(xi1, dtype=float)
    xi2 = np.asarray(xi2, dtype=float)
    total = np.zeros(np.broadcast(xi1, xi2).shape)
    for plane in grid.planes():
        total += plane.weight * np.abs(psi.dilated_spectrum(plane.angle, plane.scale, xi1, xi2)) ** 2
    return total


def direct_coefficient(sino, window, g):
    """chi(g) <sino, pi-hat(g) Psi> by a plain sum over the sinogram grid."""
    family = sino.family
    family.check_element(g)
    if window.family.kind != family.kind:
        raise FamilyMismatchError(f"{window.family} window cannot analyse a {family} sinogram")
    moved = hat_pi(window.sinogram, g)
    return character(family, "chi", g) * sinogram_inner(sino, moved)
