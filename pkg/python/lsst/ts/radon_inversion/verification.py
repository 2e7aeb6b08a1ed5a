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


"""Property checks behind ``run_radon_inversion verify``.

Each suite returns `CheckResult` rows (property, measured, budget); the
runner collects them into a `pandas.DataFrame` in declaration order, so a
fixed configuration always yields the same table.
"""

__all__ = ["CheckResult", "SUITES", "run_suites", "results_frame", "write_report"]

import logging
import math
from dataclasses import asdict, dataclass

import numpy as np
import pandas as pd

from .exceptions import CheckFailure, DomainError
from .groups import RadonFamily, Sim2Element, character, inverse, random_shearlet, random_sim2
from .inversion import invert, invert_with_lowpass, shearlet_coefficients_factorized
from .phantoms import ConeDogPhantom, GaussianPhantom
from .radon import (
    measure_weights,
    radon_transform,
    slice_check_affine,
    slice_check_circular,
    slice_check_polar,
)
from .representations import hat_pi, pi_image
from .special import c_alpha_details
from .unitarize import apply_As, apply_I, unitarized_energy, unitarized_radon
from .utils import Timer, ordered_map
from .voice import GroupGrid, direct_coefficient, iter_sinogram_planes
from .wavelets import admissibility, make_phi_lowpass, make_Psi, make_wavelet, shearlet_window_factors

logger = logging.getLogger(__name__)

REPORT_COLUMNS = ["suite", "property", "measured", "budget", "passed"]


@dataclass(frozen=True)
class CheckResult:
    """One verified property; passes when ``measured <= budget`` (``<`` when strict)."""

    suite: str
    property: str
    measured: float
    budget: float
    strict: bool = False

    @property
    def passed(self):
        if not math.isfinite(self.measured):
            return False
        return self.measured < self.budget if self.strict else self.measured <= self.budget

    def as_row(self):
        row = asdict(self)
        row.pop("strict")
        row["passed"] = self.passed
        return row


def _families(config):
    return [RadonFamily.polar(), RadonFamily.affine(), RadonFamily.circular(config.alpha)]


def _phantom(config, family):
    """The configured phantom, restricted to the cone |xi2| < |xi1| for the affine family.

    Affine lines with |v| <= v_max only see that part of the spectrum.
    """
    if family.kind == "affine" and config.phantom == "dog":
        return ConeDogPhantom(config.inner_width, config.outer_width, slope=1.0)
    return config.make_phantom()


def _sinogram(config, img, family):
    cfg = config.model_copy(update={"family": family.kind})
    axes = cfg.sinogram_axes(img.grid)
    kwargs = {"step": config.line_step} if family.kind != "circular" and config.line_step else {}
    return radon_transform(img, family, axes, **kwargs)


def _weighted_norm(values, sino, mask=None):
    weights = measure_weights(sino)
    if mask is not None:
        weights = weights * mask
    return math.sqrt(float(np.sum(np.abs(values) ** 2 * weights)))


# --- suites ---------------------------------------------------------------


def check_slice(config):
    """Fourier slice theorems of the three families on the configured phantom.

    The polar theorem is also held to the tighter Gaussian budget on a
    Gaussian as wide as the outer dog width.
    """
    grid = config.image_grid()
    img = config.make_phantom().render(grid)
    checks = {"polar": slice_check_polar, "affine": slice_check_affine, "circular": slice_check_circular}
    results = []
    for family in _families(config):
        sino = _sinogram(config, img, family)
        error = checks[family.kind](img, sino)
        name = f"slice_{family.kind}"
        results.append(CheckResult("slice", name, error, config.tolerance(name, 1e-2)))
    gaussian = GaussianPhantom(width=config.outer_width).render(grid)
    polar = RadonFamily.polar()
    error = slice_check_polar(gaussian, _sinogram(config, gaussian, polar))
    results.append(CheckResult("slice", "slice_polar_gaussian", error, config.tolerance("slice_polar_gaussian", 1e-3)))
    return results


def check_unitarity(config):
    """||Q f|| / ||f|| = 1 for every family, and the two c_alpha quadratures.

    Circular norms include the radius integral below the first and beyond
    the last sampled radius.
    """
    grid = config.image_grid()
    results = []
    for family in _families(config):
        img = _phantom(config, family).render(grid)
        norm = img.norm()
        cfg = config.model_copy(update={"family": family.kind})
        sino = unitarized_radon(img, family, cfg.sinogram_axes(img.grid))
        name = f"isometry_{family.kind}"
        ratio = math.sqrt(unitarized_energy(sino)) / norm
        results.append(CheckResult("unitarity", name, abs(ratio - 1.0), config.tolerance(name, 1e-2)))
    adaptive = c_alpha_details(config.alpha, "adaptive")
    midpoint = c_alpha_details(config.alpha, "midpoint", radius=adaptive.radius)
    gap = abs(adaptive.value - midpoint.value) / adaptive.value
    results.append(CheckResult("unitarity", "c_alpha_quadratures", gap, config.tolerance("c_alpha_quadratures", 1e-4)))
    return results


def _random_element(family, rng, cell):
    if family.group == "sim2":
        return random_sim2(rng, b_max=4 * cell, a_range=(0.5, 2.0))
    return random_shearlet(rng, b_max=4 * cell, s_max=0.5, a_range=(0.5, 2.0))


def check_intertwining(config):
    """R pi(g) f = chi(g)^-1 pi-hat(g) R f on sampled group elements."""
    grid = config.image_grid()
    rng = np.random.default_rng(config.seed)
    results = []
    for family in _families(config):
        phantom = _phantom(config, family)
        img = phantom.render(grid)
        sino = _sinogram(config, img, family)
        scale = sino.norm()
        worst = 0.0
        for _ in range(config.n_elements):
            g = _random_element(family, rng, grid.dx)
            moved = _sinogram(config, phantom.render_transformed(grid, g), family)
            expected, mask = hat_pi(sino, g, return_mask=True)
            residual = moved.samples - expected.samples / character(family, "chi", g)
            worst = max(worst, _weighted_norm(residual, sino, mask) / scale)
        name = f"intertwining_{family.kind}"
        results.append(CheckResult("intertwining", name, worst, config.tolerance(name, 2e-2)))
    return results


def check_semi_invariance(config):
    """pi(g) A_s pi(g)^-1 = a^s A_s and pi-hat(g) I pi-hat(g)^-1 = chi(g)^-1 I for dilations."""
    grid = config.image_grid()
    img = config.make_phantom().render(grid)
    results = []
    worst = 0.0
    for a in (0.75, 1.5):
        g = Sim2Element((0.0, 0.0), 0.0, a)
        for s in (0.5, -0.5):
            conjugated = pi_image(apply_As(pi_image(img, inverse(g)), s), g)
            expected = apply_As(img, s) * a**s
            worst = max(worst, (conjugated - expected).norm() / expected.norm())
    results.append(CheckResult("semi_invariance", "A_s", worst, config.tolerance("A_s", 2e-2)))

    family = RadonFamily.polar()
    sino = _sinogram(config, img, family)
    worst = 0.0
    for a in (0.75, 1.5):
        g = Sim2Element((0.0, 0.0), 0.0, a)
        pulled = hat_pi(sino, inverse(g))
        conjugated, mask = hat_pi(apply_I(pulled), g, return_mask=True)
        expected = apply_I(sino).samples / character(family, "chi", g)
        residual = conjugated.samples - expected
        worst = max(worst, _weighted_norm(residual, sino, mask) / _weighted_norm(expected, sino, mask))
    results.append(CheckResult("semi_invariance", "I_polar", worst, config.tolerance("I_polar", 2e-2)))
    return results


def check_admissibility(config):
    results = []
    for kind in ("sim2", "shearlet"):
        psi = make_wavelet(kind)
        report = admissibility(psi, config.image_grid() if kind == "sim2" else None)
        name = f"admissibility_{kind}"
        results.append(CheckResult("admissibility", name, report.max_deviation(), config.tolerance(name, 1e-3)))
    return results


def _family_config(config, family):
    return config.model_copy(update={"family": family.kind, "wavelet": None, "a_cut": None})


def _inversions(config, refine=False):
    """(family, report, refined report or None) for every family."""
    grid = config.image_grid()
    out = []
    for family in _families(config):
        img = _phantom(config, family).render(grid)
        cfg = _family_config(config, family)
        sino = _sinogram(cfg, img, family)
        psi = cfg.make_wavelet()
        window = make_Psi(psi, family, sino.axes)
        group_grid = cfg.group_grid(grid)
        _, report = invert(sino, family, psi, group_grid, window=window, truth=img)
        refined = None
        if refine:
            _, refined = invert(sino, family, psi, group_grid.refined(), window=window, truth=img)
        out.append((family, report, refined))
    return out


def check_energy(config):
    """Discrete energy identity against the in-band energy of the phantom."""
    results = []
    for family, report, _ in _inversions(config):
        name = f"energy_{family.kind}"
        results.append(CheckResult("energy", name, report.energy_residual, config.tolerance(name, 5e-2)))
    return results


def check_inversion(config):
    """Round trips per family and the effect of one group-grid refinement."""
    budgets = {"polar": 5e-2, "affine": 8e-2, "circular": 1e-1}
    results = []
    for family, report, refined in _inversions(config, refine=True):
        name = f"reconstruction_{family.kind}"
        budget = config.tolerance(name, budgets[family.kind])
        results.append(CheckResult("inversion", name, report.rel_l2_error, budget))
        ratio = refined.rel_l2_error / report.rel_l2_error if report.rel_l2_error > 0 else 0.0
        results.append(CheckResult("inversion", f"refinement_{family.kind}", ratio, 1.0, strict=True))
    return results


def check_lowpass(config):
    """Partition of unity of the low-pass window and the energy split at two cuts."""
    grid = config.image_grid()
    img = config.make_phantom().render(grid)
    cfg = _family_config(config, RadonFamily.polar())
    family = RadonFamily.polar()
    sino = _sinogram(cfg, img, family)
    psi = make_wavelet("sim2")
    window = make_Psi(psi, family, sino.axes)
    results = []
    totals = []
    for a_cut in (1.0, 0.5):
        phi = make_phi_lowpass(psi, a_cut=a_cut)
        if a_cut == 1.0:
            residual = phi.partition_residual(grid)
            results.append(CheckResult("lowpass", "partition", residual, config.tolerance("partition", 1e-3)))
        group_grid = GroupGrid.sim2(grid, cfg.n_angles, cfg.a_min, a_cut, cfg.n_scales, pad=cfg.pad)
        _, report = invert_with_lowpass(sino, psi, phi, group_grid, window=window, truth=img)
        totals.append(report.energy_rhs)
        if a_cut == 1.0:
            results.append(
                CheckResult("lowpass", "energy_split", report.energy_residual, config.tolerance("energy_split", 2e-2))
            )
    drift = abs(totals[1] - totals[0]) / totals[0] if totals[0] > 0 else 0.0
    results.append(CheckResult("lowpass", "a_cut_independence", drift, config.tolerance("a_cut_independence", 1e-2)))
    return results


def _engine_values(sino, window, grid, picks):
    """Engine coefficients at (plane index, lattice index) picks."""
    wanted = {}
    for plane_index, pos in picks:
        wanted.setdefault(plane_index, []).append(pos)
    values = {}
    for plane, samples in iter_sinogram_planes(sino, window, grid):
        for pos in wanted.get(plane.index, []):
            values[(plane.index, pos)] = samples[pos]
    return np.array([values[pick] for pick in picks])


def _random_picks(grid, rng, count, radius_cells=8):
    work = grid.work_grid
    c1, c2 = work.n1 // 2, work.n2 // 2
    picks = []
    for _ in range(count):
        plane = int(rng.integers(grid.n_planes))
        offset = rng.integers(-radius_cells, radius_cells + 1, size=2)
        pos = (int(c1 + offset[0]), int(c2 + offset[1]))
        picks.append((plane, pos))
    return picks


def _relative_gap(values, reference):
    scale = float(np.max(np.abs(reference)))
    return float(np.max(np.abs(values - reference))) / scale if scale > 0 else 0.0


def check_coefficients(config):
    """Fast coefficient engines against independent evaluations at sampled points.

    Affine: the factorized shearlet formula.  Polar: a direct sum over the
    sinogram with pi-hat resampling, on a single-scale grid.
    """
    grid = config.image_grid()
    rng = np.random.default_rng(config.seed)
    results = []

    family = RadonFamily.affine()
    cfg = _family_config(config, family)
    sino = _sinogram(cfg, _phantom(config, family).render(grid), family)
    psi = make_wavelet("shearlet")
    window = make_Psi(psi, family, sino.axes)
    group_grid = cfg.group_grid(grid)
    picks = _random_picks(group_grid, rng, 20)
    engine = _engine_values(sino, window, group_grid, picks)
    psi1, psi2 = shearlet_window_factors(psi)
    planes = group_grid.planes()
    x1, x2 = group_grid.work_grid.x1, group_grid.work_grid.x2
    factorized = np.array(
        [
            shearlet_coefficients_factorized(sino, psi1, psi2, planes[k].element("shearlet", (x1[i], x2[j])))
            for k, (i, j) in picks
        ]
    )
    gap = _relative_gap(factorized, engine)
    budget = config.tolerance("factorized_shearlet", 2e-2)
    results.append(CheckResult("coefficients", "factorized_shearlet", gap, budget))

    family = RadonFamily.polar()
    cfg = _family_config(config, family)
    sino = _sinogram(cfg, config.make_phantom().render(grid), family)
    psi = make_wavelet("sim2")
    window = make_Psi(psi, family, sino.axes)
    a = math.sqrt(cfg.a_min * cfg.a_max)
    single = GroupGrid.sim2(grid, cfg.n_angles, a / 1.01, a * 1.01, 1, pad=cfg.pad)
    picks = _random_picks(single, rng, 10)
    engine = _engine_values(sino, window, single, picks)
    planes = single.planes()
    x1, x2 = single.work_grid.x1, single.work_grid.x2
    direct = np.array(
        [direct_coefficient(sino, window, planes[k].element("sim2", (x1[i], x2[j]))) for k, (i, j) in picks]
    )
    gap = _relative_gap(engine, direct)
    results.append(CheckResult("coefficients", "backprojection", gap, config.tolerance("backprojection", 2e-2)))
    return results


SUITES = {
    "slice": check_slice,
    "unitarity": check_unitarity,
    "intertwining": check_intertwining,
    "semi_invariance": check_semi_invariance,
    "admissibility": check_admissibility,
    "energy": check_energy,
    "inversion": check_inversion,
    "lowpass": check_lowpass,
    "coefficients": check_coefficients,
}


def _run_one(config, name):
    timer = Timer()
    results = SUITES[name](config)
    failed = sum(not r.passed for r in results)
    logger.info(f"suite {name}: {len(results)} checks, {failed} failed in {timer.toc:.1f} s")
    return results


def run_suites(config, names):
    """Run the named suites (``"all"`` for every suite) concurrently.

    Returns
    -------
    results : `list` of `CheckResult`
        In the order the suites were named.
    """
    names = list(SUITES) if list(names) == ["all"] else list(names)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise DomainError(f"unknown suite(s) {unknown}; expected 'all' or any of {list(SUITES)}")
    per_suite = ordered_map(lambda name: _run_one(config, name), names)
    return [result for results in per_suite for result in results]


def results_frame(results):
    return pd.DataFrame([r.as_row() for r in results], columns=REPORT_COLUMNS)


def write_report(results, stream):
    """CSV table of the results; raises `CheckFailure` when any check failed."""
    frame = results_frame(results)
    frame.to_csv(stream, index=False, float_format="%.6e", lineterminator="\n")
    failed = frame[~frame["passed"]]
    if not failed.empty:
        raise CheckFailure(f"{len(failed)} of {len(frame)} checks failed: {', '.join(failed['property'])}")
    return frame
