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


"""End-to-end reconstruction of an image from its sinogram."""

__all__ = [
    "ReconstructionReport",
    "invert",
    "invert_with_lowpass",
    "shearlet_coefficients_factorized",
    "report_metrics",
]

import logging
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .exceptions import DomainError, FamilyMismatchError, ShapeMismatchError
from .radon import AffineSinogram, PolarSinogram
from .sampling import dft1_rows, pad_centered
from .unitarize import ROW_PADDING, apply_I, unitarized_energy
from .utils import Timer, make_json_safe, relative_l2
from .voice import Synthesizer, coverage, iter_sinogram_planes, lowpass_analyze
from .wavelets import make_Psi

logger = logging.getLogger(__name__)


@dataclass
class ReconstructionReport:
    """Errors, energies and timings of one reconstruction.

    ``energy_lhs`` is ||f||^2 (from the truth when known, otherwise from
    the unitarized sinogram) and ``energy_rhs`` the quadrature of
    chi^2 |<R f, pi-hat(g) Psi>|^2 over the group grid, plus the low-pass
    energy when there is one.  ``energy_in_band`` weights ||F f||^2 with
    the grid coverage and is what ``energy_rhs`` should match.
    """

    family: str = ""
    grid: str = ""
    rel_l2_error: float = None
    peak_error: float = None
    energy_lhs: float = 0.0
    energy_rhs: float = 0.0
    energy_in_band: float = None
    energy_wavelet: float = None
    energy_lowpass: float = None
    n_planes: int = 0
    timings: dict = field(default_factory=dict)

    @property
    def energy_residual(self):
        """|rhs - in-band| / lhs, or |rhs - lhs| / lhs without an in-band value."""
        target = self.energy_lhs if self.energy_in_band is None else self.energy_in_band
        if self.energy_lhs == 0.0:
            return 0.0 if self.energy_rhs == 0.0 else math.inf
        return abs(self.energy_rhs - target) / self.energy_lhs

    def to_dict(self):
        return make_json_safe(asdict(self))


def report_metrics(f_true, f_hat):
    """Compare a reconstruction with the true image.

    Parameters
    ----------
    f_true, f_hat : `Image`
        Images on the same grid.

    Returns
    -------
    report : `ReconstructionReport`
        Relative L2 and peak errors; energies are ||f_true||^2 and
        ||f_hat||^2.
    """
    if f_true.grid != f_hat.grid:
        raise ShapeMismatchError(f"cannot compare images on {f_true.grid.describe()} and {f_hat.grid.describe()}")
    peak = float(np.max(np.abs(f_true.samples)))
    diff = float(np.max(np.abs(f_hat.samples - f_true.samples)))
    return ReconstructionReport(
        grid=f_true.grid.describe(),
        rel_l2_error=relative_l2(f_hat.samples, f_true.samples),
        peak_error=diff / peak if peak > 0 else (0.0 if diff == 0 else math.inf),
        energy_lhs=f_true.norm() ** 2,
        energy_rhs=f_hat.norm() ** 2,
    )


def _check_inputs(sino, family, psi, grid):
    if sino.family.kind != family.kind:
        raise FamilyMismatchError(f"{sino.family} sinogram given for a {family} inversion")
    if psi.group != family.group:
        raise FamilyMismatchError(f"{psi.kind} wavelet cannot invert {family} sinograms")
    if grid.group != family.group:
        raise FamilyMismatchError(f"{family} inversion needs a {family.group} grid, got {grid.group}")


def _finish(report, f_hat, truth, sino, covered, timer):
    timer.tic
    unitarized = apply_I(sino)
    report.energy_lhs = truth.norm() ** 2 if truth is not None else unitarized_energy(unitarized)
    report.energy_in_band = unitarized_energy(unitarized, weight=covered)
    if truth is not None:
        metrics = report_metrics(truth, f_hat)
        report.rel_l2_error = metrics.rel_l2_error
        report.peak_error = metrics.peak_error
    report.timings["energy"] = timer.toc
    return report


def invert(sino, family, psi, grid, window=None, truth=None):
    """Reconstruct f from R f through the wavelet reproducing formula.

    f = sum_g w chi(g) <R f, pi-hat(g) Psi> pi(g) psi over ``grid``, with
    the coefficients computed from the sinogram only.

    Parameters
    ----------
    sino : `PolarSinogram`, `AffineSinogram` or `CircularSinogram`
        Radon transform of the image.
    family : `RadonFamily`
        Family the sinogram belongs to.
    psi : `WaveletSpec`
        Admissible wavelet of the family's group.
    grid : `GroupGrid`
        Discretized group; the result lives on ``grid.lattice``.
    window : `SinogramWindow`, optional
        Psi = I^2 R psi; built from ``psi`` when omitted.
    truth : `Image`, optional
        True image, for the error fields of the report.

    Returns
    -------
    f_hat : `Image`
    report : `ReconstructionReport`
    """
    _check_inputs(sino, family, psi, grid)
    timer = Timer()
    report = ReconstructionReport(family=str(family), grid=grid.describe(), n_planes=grid.n_planes)
    if window is None:
        window = make_Psi(psi, family, sino.axes)
        report.timings["window"] = timer.toc
        timer.tic

    synth = Synthesizer(psi, grid)
    for plane, samples in iter_sinogram_planes(sino, window, grid):
        synth.add(plane, samples)
    f_hat = synth.result()
    report.timings["reconstruction"] = timer.toc
    report.energy_wavelet = synth.energy
    report.energy_rhs = synth.energy
    logger.info(f"{family} inversion synthesized {synth.n_added} planes on {grid.describe()}")

    def covered(xi1, xi2):
        return np.minimum(coverage(grid, psi, xi1, xi2), 1.0)

    _finish(report, f_hat, truth, sino, covered, timer)
    logger.info(
        f"{family} inversion: energy {report.energy_rhs:.6g} vs in-band {report.energy_in_band:.6g} "
        f"(total {report.energy_lhs:.6g})"
    )
    return f_hat, report


def invert_with_lowpass(sino, psi, phi, grid, window=None, truth=None):
    """Polar reconstruction split into a low-pass branch and the scales a < a_cut.

    f = int <f, T_b Phi> T_b Phi db + sum_{a < a_cut} w G(g) pi(g) psi, where
    <f, T_b Phi> is a correlation of the sinogram with I^2 R Phi.  The
    report carries both branch energies; they add up to ||f||^2.

    Parameters
    ----------
    sino : `PolarSinogram`
    psi : `WaveletSpec`
        SIM(2) wavelet ``phi`` was built from.
    phi : `LowpassWindow`
    grid : `GroupGrid`
        SIM(2) grid with ``a_max`` at most ``phi.a_cut``.
    window, truth
        As in `invert`.
    """
    if not isinstance(sino, PolarSinogram):
        raise FamilyMismatchError(f"the low-pass split is defined for polar sinograms, got {sino.family}")
    family = sino.family
    _check_inputs(sino, family, psi, grid)
    if grid.a_max > phi.a_cut * (1.0 + 1e-12):
        raise DomainError(f"wavelet scales reach {grid.a_max:g}, above the low-pass cut {phi.a_cut:g}")
    if phi.wavelet != psi:
        raise FamilyMismatchError("the low-pass window was built for another wavelet")

    timer = Timer()
    report = ReconstructionReport(family=str(family), grid=grid.describe(), n_planes=grid.n_planes)
    if window is None:
        window = make_Psi(psi, family, sino.axes)
        report.timings["window"] = timer.toc
        timer.tic

    synth = Synthesizer(psi, grid)
    lowpass = lowpass_analyze(sino, phi, grid)
    synth.add_lowpass(lowpass, phi)
    report.energy_lowpass = float(np.sum(np.abs(lowpass) ** 2)) * grid.work_grid.cell_area
    for plane, samples in iter_sinogram_planes(sino, window, grid):
        synth.add(plane, samples)
    f_hat = synth.result()
    report.timings["reconstruction"] = timer.toc
    report.energy_wavelet = synth.energy
    report.energy_rhs = report.energy_lowpass + report.energy_wavelet
    logger.info(
        f"low-pass split at a_cut={phi.a_cut:g}: low-pass {report.energy_lowpass:.6g}, "
        f"wavelet {report.energy_wavelet:.6g}"
    )

    def covered(xi1, xi2):
        return np.minimum(phi.spectrum(xi1, xi2) ** 2 + coverage(grid, psi, xi1, xi2), 1.0)

    return f_hat, _finish(report, f_hat, truth, sino, covered, timer)


def shearlet_coefficients_factorized(sino, psi1, psi2, g):
    """Shearlet coefficient at g from a separable affine window Psi2(v) Psi1(t).

    S(b, s, a) = |a|^(-3/4) int W(v; b1 + v b2, a) Psi2((v - s) / |a|^(1/2)) dv
    where W(v; u, a) is the 1D wavelet transform of the row R f(v, .) with
    Psi1 at offset u and scale a, normalized by |a|^(-1/2).

    Parameters
    ----------
    sino : `AffineSinogram`
    psi1 : `Wavelet1D`
    psi2 : `BumpWindow`
    g : `ShearletElement`

    Returns
    -------
    coefficient : `complex`
    """
    if not isinstance(sino, AffineSinogram):
        raise FamilyMismatchError(f"factorized shearlet coefficients need an affine sinogram, got {sino.family}")
    sino.family.check_element(g)
    axes = sino.axes
    a = g.a
    root = math.sqrt(abs(a))
    weights = axes.v_weights() * psi2((axes.vs - g.s) / root)
    rows = np.flatnonzero(weights)
    if rows.size == 0:
        return 0j
    padded, origin = pad_centered(sino.samples[rows], ROW_PADDING * axes.n_t, axes.t_origin, axes.dt)
    freqs, spectra = dft1_rows(padded, axes.dt, origin)
    dtau = freqs[1] - freqs[0]
    u = g.b[0] + axes.vs[rows] * g.b[1]
    kernel = np.conj(psi1.spectrum(a * freqs))[None, :] * np.exp(2j * math.pi * np.outer(u, freqs))
    # |a|^(-1/2) from the 1D normalization, |a| from dilating psi1
    transforms = root * np.sum(spectra * kernel, axis=1) * dtau
    return complex(abs(a) ** -0.75 * np.dot(weights[rows], transforms))
