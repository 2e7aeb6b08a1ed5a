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


"""Admissible vectors, sinogram windows and the low-pass window.

Two mother wavelets are defined in closed form in frequency:

* ``sim2``: F psi(xi) = sqrt(2) |xi| exp(-pi |xi|^2), isotropic, with
  int |F psi|^2 / |xi|^2 dxi = 1 exactly;
* ``shearlet``: F psi(xi) = c1 |xi1| exp(-pi xi1^2) phi2(xi2 / xi1) with
  phi2 a smooth unit-mass bump on [-1, 1] and c1 normalizing
  int |F psi|^2 / xi1^2 dxi to 1.

The sinogram window of a wavelet is Psi = I^2 R psi; by the slice theorems
its offset spectrum is ``|tau| F psi(tau w(theta))`` for polar lines,
``|tau| F psi(tau, tau v)`` for affine lines and
``k_alpha^2 |tau|^(1-alpha) 2 pi J0(2 pi |tau| r) F psi(tau)`` for circles.
"""

__all__ = [
    "WaveletSpec",
    "Wavelet1D",
    "BumpWindow",
    "SinogramWindow",
    "LowpassWindow",
    "AdmissibilityReport",
    "make_sim2_wavelet",
    "make_shearlet",
    "make_wavelet",
    "shearlet_window_factors",
    "make_Psi",
    "make_phi_lowpass",
    "scale_integral",
    "admissibility",
    "admissibility_on_grid",
    "duflo_moore_admissibility",
    "WAVELET_KINDS",
]

import functools
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid

from .exceptions import DomainError, FamilyMismatchError, InconsistencyError
from .radon import (
    AffineAxes,
    AffineSinogram,
    CircularAxes,
    CircularSinogram,
    PolarAxes,
    PolarSinogram,
    radon_transform,
)
from .sampling import (
    Spectrum,
    dft1_rows,
    frequency_axis,
    idft1_rows,
    idft2_stack,
    idft2_unitary,
    pad_centered,
)
from .special import adaptive_quad, bessel_j0, k_alpha
from .unitarize import CENTER_PADDING, ROW_PADDING, apply_As, apply_I
from .utils import TWO_PI

logger = logging.getLogger(__name__)

WAVELET_KINDS = ("sim2", "shearlet")

# Share of ramp-weighted energy allowed in the outer tenth of the band
# before a window is flagged as leaving the multiplier domain.
DOMAIN_EDGE_FRACTION = 1e-3

# Low-pass consistency limits on z = 1 - int |F psi|^2.
LOWPASS_WARN = -1e-6
LOWPASS_FAIL = -1e-3


# --- the bump -------------------------------------------------------------


def _raw_bump(u):
    u = np.asarray(u, dtype=float)
    out = np.zeros(u.shape)
    inside = np.abs(u) < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - u[inside] ** 2))
    return out


@functools.lru_cache(maxsize=None)
def _bump_constants():
    """(C, ||phi2||^2) for phi2 = C exp(-1 / (1 - u^2))."""

    def raw(u):
        return float(_raw_bump(u))

    def raw_sq(u):
        return float(_raw_bump(u)) ** 2

    mass = adaptive_quad(raw, -1.0, 1.0, tol=1e-13).value
    c = 1.0 / mass
    l2 = c * c * adaptive_quad(raw_sq, -1.0, 1.0, tol=1e-13).value
    return c, l2


@dataclass(frozen=True)
class BumpWindow:
    """Unit-mass smooth bump phi2 supported on [-1, 1]."""

    def __call__(self, u):
        c, _ = _bump_constants()
        return c * _raw_bump(u)

    @property
    def l2_norm_squared(self):
        return _bump_constants()[1]


@dataclass(frozen=True)
class Wavelet1D:
    """Psi1 with F Psi1(tau) = scale tau^2 exp(-pi tau^2).

    In space Psi1(t) = scale (1 / (2 pi) - t^2) exp(-pi t^2).
    """

    scale: float

    def spectrum(self, tau):
        tau = np.asarray(tau, dtype=float)
        return self.scale * tau**2 * np.exp(-math.pi * tau**2)

    def values(self, t):
        t = np.asarray(t, dtype=float)
        return self.scale * (1.0 / TWO_PI - t**2) * np.exp(-math.pi * t**2)


# --- 2D wavelets ----------------------------------------------------------


@dataclass(frozen=True)
class WaveletSpec:
    """Closed-form mother wavelet given by its Fourier transform.

    ``normalization`` is the prefactor fixed by the admissibility
    condition of the wavelet's group.
    """

    kind: str
    normalization: float

    def __post_init__(self):
        if self.kind not in WAVELET_KINDS:
            raise DomainError(f"unknown wavelet {self.kind!r}; expected one of {WAVELET_KINDS}")
        if not self.normalization > 0:
            raise DomainError(f"wavelet normalization must be positive, got {self.normalization}")

    @property
    def group(self):
        return self.kind

    @property
    def isotropic(self):
        return self.kind == "sim2"

    def spectrum(self, xi1, xi2):
        """F psi(xi1, xi2)."""
        xi1 = np.asarray(xi1, dtype=float)
        xi2 = np.asarray(xi2, dtype=float)
        if self.kind == "sim2":
            rho2 = xi1**2 + xi2**2
            return self.normalization * np.sqrt(rho2) * np.exp(-math.pi * rho2)
        xi1, xi2 = np.broadcast_arrays(xi1, xi2)
        out = np.zeros(xi1.shape)
        nonzero = xi1 != 0.0
        ratio = xi2[nonzero] / xi1[nonzero]
        x1 = xi1[nonzero]
        out[nonzero] = self.normalization * np.abs(x1) * np.exp(-math.pi * x1**2) * BumpWindow()(ratio)
        return out

    def radial_spectrum(self, rho):
        if not self.isotropic:
            raise DomainError(f"{self.kind} wavelet is not isotropic")
        return self.spectrum(rho, 0.0)

    def dilated_spectrum(self, angle, scale, xi1, xi2):
        """Spectrum of pi(0, angle, scale) psi, without the translation phase.

        SIM(2): a F psi(a R_phi^-1 xi).  Shearlets (angle is the shear s):
        |a|^(3/4) F psi(a xi1, sign(a) |a|^(1/2) (xi2 - s xi1)).
        """
        xi1 = np.asarray(xi1, dtype=float)
        xi2 = np.asarray(xi2, dtype=float)
        a = scale
        if self.kind == "sim2":
            c, s = math.cos(angle), math.sin(angle)
            return a * self.spectrum(a * (c * xi1 + s * xi2), a * (-s * xi1 + c * xi2))
        root = math.copysign(math.sqrt(abs(a)), a)
        return abs(a) ** 0.75 * self.spectrum(a * xi1, root * (xi2 - angle * xi1))

    def element_spectrum(self, g, xi1, xi2):
        """F [pi(g) psi](xi) including the translation phase."""
        angle = g.phi if self.kind == "sim2" else g.s
        phase = np.exp(-2j * math.pi * (g.b[0] * np.asarray(xi1) + g.b[1] * np.asarray(xi2)))
        return phase * self.dilated_spectrum(angle, g.a, xi1, xi2)

    def render(self, grid, g=None):
        """pi(g) psi sampled on ``grid`` (psi itself when ``g`` is None)."""
        xi1, xi2 = grid.freq_mesh()
        if g is None:
            values = self.spectrum(xi1, xi2).astype(np.complex128)
        else:
            values = self.element_spectrum(g, xi1, xi2)
        return idft2_unitary(Spectrum(grid, values))


def make_sim2_wavelet():
    """Isotropic wavelet F psi(xi) = sqrt(2) |xi| exp(-pi |xi|^2)."""
    return WaveletSpec("sim2", math.sqrt(2.0))


def make_shearlet():
    """Separable shearlet c1 |xi1| exp(-pi xi1^2) phi2(xi2 / xi1).

    int |F psi|^2 / xi1^2 = c1^2 ||phi2||^2 / (2 pi), so c1 is taken from the
    numerically integrated ||phi2||^2.
    """
    return WaveletSpec("shearlet", math.sqrt(TWO_PI / BumpWindow().l2_norm_squared))


def make_wavelet(kind):
    if kind == "sim2":
        return make_sim2_wavelet()
    if kind == "shearlet":
        return make_shearlet()
    raise DomainError(f"unknown wavelet {kind!r}; expected one of {WAVELET_KINDS}")


def shearlet_window_factors(psi):
    """(Psi1, Psi2) with I^2 R^aff psi (v, t) = Psi2(v) Psi1(t)."""
    if psi.kind != "shearlet":
        raise FamilyMismatchError(f"{psi.kind} wavelet has no separable affine window")
    return Wavelet1D(psi.normalization), BumpWindow()


# --- admissibility --------------------------------------------------------


@dataclass(frozen=True)
class AdmissibilityReport:
    analytic: float
    numeric: float
    duflo_moore: float = None

    def max_deviation(self):
        values = [self.analytic, self.numeric] + ([self.duflo_moore] if self.duflo_moore is not None else [])
        return max(abs(v - 1.0) for v in values)


def _analytic_admissibility(psi):
    if psi.kind == "sim2":
        # 2 pi int_0^inf (c^2 rho^2 e^(-2 pi rho^2) / rho^2) rho d rho
        return psi.normalization**2 / 2.0
    return psi.normalization**2 * BumpWindow().l2_norm_squared / TWO_PI


def admissibility_on_grid(psi, half_width=4.0, n=800):
    """Midpoint-rule value of the admissibility integral on [-L, L]^2.

    The integrand is |F psi|^2 / |xi|^2 for SIM(2) and |F psi|^2 / xi1^2
    for shearlets; both are bounded, and the midpoints avoid the axes.
    """
    h = 2.0 * half_width / n
    axis = -half_width + (np.arange(n) + 0.5) * h
    xi1, xi2 = np.meshgrid(axis, axis, indexing="ij")
    power = np.abs(psi.spectrum(xi1, xi2)) ** 2
    denom = xi1**2 + xi2**2 if psi.kind == "sim2" else xi1**2
    return float(np.sum(power / denom)) * h * h


def duflo_moore_admissibility(psi, grid):
    """||A_-1 psi||^2 on ``grid``; SIM(2) only."""
    if psi.kind != "sim2":
        raise FamilyMismatchError("the A_s form of the admissibility constant applies to SIM(2) wavelets")
    return apply_As(psi.render(grid), -1.0).norm() ** 2


def admissibility(psi, grid=None):
    """Analytic, quadrature and (SIM(2), when ``grid`` is given) operator forms."""
    report = AdmissibilityReport(
        analytic=_analytic_admissibility(psi),
        numeric=admissibility_on_grid(psi),
        duflo_moore=duflo_moore_admissibility(psi, grid) if grid is not None and psi.kind == "sim2" else None,
    )
    logger.debug(f"admissibility of {psi.kind}: {report}")
    return report


# --- sinogram windows -----------------------------------------------------


def _edge_fraction(density, freq_abs):
    total = float(np.sum(density))
    if total == 0.0:
        return 0.0
    edge = freq_abs > 0.9 * float(np.max(freq_abs))
    return float(np.sum(density[np.broadcast_to(edge, density.shape)])) / total


@dataclass(eq=False)
class SinogramWindow:
    """Psi = I^2 R psi sampled on the sinogram axes of ``family``.

    ``sinogram`` holds the samples; the spectral methods give the window in
    closed form for the analysis engines.
    """

    family: object
    wavelet: WaveletSpec
    sinogram: object
    method: str
    in_domain: bool = True

    @property
    def samples(self):
        return self.sinogram.samples

    @property
    def axes(self):
        return self.sinogram.axes

    def row_spectrum(self, param, tau):
        """Offset spectrum of the row at angle theta (polar) or slope v (affine)."""
        param = np.asarray(param, dtype=float)
        tau = np.asarray(tau, dtype=float)
        if self.family.kind == "polar":
            values = self.wavelet.spectrum(tau * np.cos(param), tau * np.sin(param))
        elif self.family.kind == "affine":
            values = self.wavelet.spectrum(tau * np.ones_like(param), tau * param)
        else:
            raise FamilyMismatchError("circular windows have no offset rows")
        return np.abs(tau) * values

    def plane_factor(self, xi1, xi2):
        """k_alpha^2 |xi|^(1-alpha) F psi(xi), the radius-free part of the circular window."""
        if self.family.kind != "circular":
            raise FamilyMismatchError(f"{self.family} windows have no center spectrum")
        alpha = self.family.alpha
        rho = np.hypot(xi1, xi2)
        return k_alpha(alpha) ** 2 * rho ** (1.0 - alpha) * self.wavelet.spectrum(xi1, xi2)

    def slice_spectrum(self, xi1, xi2, r):
        rho = np.hypot(xi1, xi2)
        return self.plane_factor(xi1, xi2) * TWO_PI * bessel_j0(TWO_PI * rho * r)


def _line_window_slice(window, axes, params):
    n_pad = ROW_PADDING * axes.n_t
    _, p_origin = pad_centered(np.zeros((1, axes.n_t)), n_pad, axes.t_origin, axes.dt)
    freqs = frequency_axis(n_pad, axes.dt)
    spectra = window.row_spectrum(params[:, None], freqs[None, :])
    rows = idft1_rows(spectra, axes.dt, p_origin)
    left = (n_pad - axes.n_t) // 2
    ramp_density = np.abs(spectra) ** 2
    return rows[:, left : left + axes.n_t], _edge_fraction(ramp_density, np.abs(freqs)[None, :])


def _circular_window_slice(window, axes):
    cgrid = axes.cgrid
    outer = cgrid.padded(CENTER_PADDING)
    i0, j0 = outer.crop_offsets(cgrid)
    xi1, xi2 = outer.freq_mesh()
    spectra = np.stack([window.slice_spectrum(xi1, xi2, r) for r in axes.rs], axis=-1)
    planes = idft2_stack(spectra, outer)
    density = np.abs(window.plane_factor(xi1, xi2)) ** 2
    fraction = _edge_fraction(density, np.maximum(np.abs(xi1), np.abs(xi2)))
    return planes[i0 : i0 + cgrid.n1, j0 : j0 + cgrid.n2], fraction


def make_Psi(psi, family, axes, method="slice", image_grid=None):
    """Sinogram window Psi = I^2 R psi.

    Parameters
    ----------
    psi : `WaveletSpec`
        Wavelet of the family's group.
    family : `RadonFamily`
        Selects the parameter space and the multiplier.
    axes : `PolarAxes`, `AffineAxes` or `CircularAxes`
        Where to sample the window.
    method : `str`
        ``"slice"`` synthesizes the window from its closed-form offset
        spectrum; ``"radon"`` renders psi on ``image_grid``, takes its
        Radon transform and applies I twice.
    image_grid : `Grid2`, optional
        Required by ``method="radon"``.

    Returns
    -------
    window : `SinogramWindow`
        ``in_domain`` is False, with a warning, when more than a small share
        of the ramp-weighted window energy sits at the edge of the band.
    """
    if psi.group != family.group:
        raise FamilyMismatchError(f"{psi.kind} wavelet does not match the {family} family")
    expected = {"polar": PolarAxes, "affine": AffineAxes, "circular": CircularAxes}[family.kind]
    if not isinstance(axes, expected):
        raise FamilyMismatchError(f"{type(axes).__name__} cannot carry a {family} window")

    if method == "radon":
        if image_grid is None:
            raise DomainError("make_Psi(method='radon') needs an image grid")
        sino = apply_I(apply_I(radon_transform(psi.render(image_grid), family, axes)))
        window = SinogramWindow(family, psi, sino, method)
        fraction = 0.0
        if family.kind != "circular":
            freqs, rows = dft1_rows(sino.samples, axes.dt, axes.t_origin)
            fraction = _edge_fraction(np.abs(rows) ** 2, np.abs(freqs)[None, :])
    elif method == "slice":
        window = SinogramWindow(family, psi, None, method)
        if family.kind == "polar":
            samples, fraction = _line_window_slice(window, axes, axes.thetas)
            window.sinogram = PolarSinogram(axes, samples)
        elif family.kind == "affine":
            samples, fraction = _line_window_slice(window, axes, axes.vs)
            window.sinogram = AffineSinogram(axes, samples)
        else:
            samples, fraction = _circular_window_slice(window, axes)
            window.sinogram = CircularSinogram(axes, samples, family.alpha)
    else:
        raise DomainError(f"unknown window method {method!r}; expected 'slice' or 'radon'")

    if fraction > DOMAIN_EDGE_FRACTION:
        window.in_domain = False
        logger.warning(
            f"{family} window of the {psi.kind} wavelet keeps {fraction:.2e} of its ramp energy "
            "at the band edge; the sinogram grid may be too coarse"
        )
    logger.info(f"{family} window built by {method} on axes {axes}")
    return window


# --- low-pass window ------------------------------------------------------


def scale_integral(psi, xi1, xi2, a_lo, a_hi, n_a=400, n_phi=64):
    """int_[0, 2 pi) int_[a_lo, a_hi] |F psi(a R_phi^-1 xi)|^2 dphi da / a.

    Midpoint rule in log a and in phi; isotropic wavelets skip the angle
    sum.
    """
    if not (0 < a_lo < a_hi):
        raise DomainError(f"need 0 < a_lo < a_hi, got {a_lo}, {a_hi}")
    xi1 = np.asarray(xi1, dtype=float)
    xi2 = np.asarray(xi2, dtype=float)
    log_step = math.log(a_hi / a_lo) / n_a
    scales = a_lo * np.exp((np.arange(n_a) + 0.5) * log_step)
    total = np.zeros(np.broadcast(xi1, xi2).shape)
    if psi.isotropic:
        rho = np.hypot(xi1, xi2)
        for a in scales:
            total += np.abs(psi.radial_spectrum(a * rho)) ** 2
        return TWO_PI * log_step * total
    phis = TWO_PI * (np.arange(n_phi) + 0.5) / n_phi
    for a in scales:
        for phi in phis:
            c, s = math.cos(phi), math.sin(phi)
            total += np.abs(psi.spectrum(a * (c * xi1 + s * xi2), a * (-s * xi1 + c * xi2))) ** 2
    return (TWO_PI / n_phi) * log_step * total


@dataclass(eq=False)
class LowpassWindow:
    """Phi with |F Phi|^2 + int_{a < a_cut} |F psi(a R_phi^-1 xi)|^2 dphi da/a = 1.

    Isotropic wavelets keep a radial table of F Phi; other wavelets
    evaluate the scale integral on demand.
    """

    wavelet: WaveletSpec
    a_cut: float
    n_a: int
    rho_table: np.ndarray = None
    phi_table: np.ndarray = None
    z_min: float = 0.0

    @property
    def a_floor(self):
        return self.a_cut * 1e-4

    def z(self, xi1, xi2, refine=1):
        integral = scale_integral(self.wavelet, xi1, xi2, self.a_floor, self.a_cut, n_a=refine * self.n_a)
        return 1.0 - integral

    def spectrum(self, xi1, xi2):
        xi1 = np.asarray(xi1, dtype=float)
        xi2 = np.asarray(xi2, dtype=float)
        if self.rho_table is not None:
            rho = np.hypot(xi1, xi2)
            return np.interp(rho, self.rho_table, self.phi_table, right=0.0)
        return np.sqrt(np.clip(self.z(xi1, xi2), 0.0, None))

    def render(self, grid):
        xi1, xi2 = grid.freq_mesh()
        return idft2_unitary(Spectrum(grid, self.spectrum(xi1, xi2).astype(np.complex128)))

    def partition_residual(self, grid):
        """max | |F Phi|^2 + (finer scale quadrature) - 1 | over the frequency grid."""
        xi1, xi2 = grid.freq_mesh()
        fine = scale_integral(self.wavelet, xi1, xi2, self.a_floor, self.a_cut, n_a=2 * self.n_a, n_phi=128)
        return float(np.max(np.abs(self.spectrum(xi1, xi2) ** 2 + fine - 1.0)))

    def ramp_energy(self, n_rho=4096):
        """int |tau|^2 |F Phi(tau w)|^2 dtau dtheta, finite when I R Phi is in the domain of I."""
        rho = np.linspace(0.0, 16.0 / self.a_cut, n_rho)
        values = rho**2 * self.spectrum(rho, 0.0) ** 2
        # both signs of tau over theta in [0, pi)
        return 2.0 * math.pi * float(trapezoid(values, rho))


def _check_z(z_values, a_cut):
    z_min = float(np.min(z_values))
    if z_min < LOWPASS_FAIL:
        raise InconsistencyError(
            f"low-pass window for a_cut={a_cut} needs z >= 0 but found {z_min:.3e}; "
            "the wavelet admissibility normalization is broken"
        )
    if z_min < LOWPASS_WARN:
        logger.warning(f"low-pass z dips to {z_min:.3e} for a_cut={a_cut}; clipped to 0")
    return z_min


def make_phi_lowpass(psi, a_cut=1.0, grid=None, n_a=400):
    """Low-pass window Phi completing the scales a < a_cut.

    Parameters
    ----------
    psi : `WaveletSpec`
        SIM(2) wavelet.
    a_cut : `float`
        Scale where the wavelet branch takes over.
    grid : `Grid2`, optional
        Anisotropic wavelets check z on this grid's frequencies.
    n_a : `int`
        Midpoints of the log-scale quadrature.

    Returns
    -------
    phi : `LowpassWindow`
    """
    if psi.group != "sim2":
        raise FamilyMismatchError("the low-pass completion is defined for SIM(2) wavelets")
    if not a_cut > 0:
        raise DomainError(f"a_cut must be positive, got {a_cut}")
    window = LowpassWindow(psi, float(a_cut), int(n_a))
    if psi.isotropic:
        rho = np.linspace(0.0, 16.0 / a_cut, 4097)
        z = window.z(rho, np.zeros_like(rho))
        window.z_min = _check_z(z, a_cut)
        window.rho_table = rho
        window.phi_table = np.sqrt(np.clip(z, 0.0, None))
    elif grid is not None:
        xi1, xi2 = grid.freq_mesh()
        window.z_min = _check_z(window.z(xi1, xi2), a_cut)
    logger.info(f"low-pass window for a_cut={a_cut:g}, min z {window.z_min:.2e}")
    return window
