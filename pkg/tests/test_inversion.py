import json
import math

import numpy as np
import pytest

from lsst.ts.radon_inversion.exceptions import DomainError, FamilyMismatchError, ShapeMismatchError
from lsst.ts.radon_inversion.groups import RadonFamily
from lsst.ts.radon_inversion.inversion import (
    ReconstructionReport,
    invert,
    invert_with_lowpass,
    report_metrics,
    shearlet_coefficients_factorized,
)
from lsst.ts.radon_inversion.phantoms import ConeDogPhantom, DogPhantom
from lsst.ts.radon_inversion.radon import AffineAxes, CircularAxes, PolarAxes, hybrid_radii, radon_transform
from lsst.ts.radon_inversion.sampling import Grid2, Image
from lsst.ts.radon_inversion.voice import GroupGrid, sinogram_analyze
from lsst.ts.radon_inversion.wavelets import (
    WaveletSpec,
    make_phi_lowpass,
    make_Psi,
    make_wavelet,
    shearlet_window_factors,
)

LATTICE = Grid2.square(64, 1 / 16)
DOG = DogPhantom(inner_width=0.5, outer_width=1.0, center=(0.125, 0.0))


@pytest.fixture(scope="module")
def polar_case():
    truth = DOG.render(LATTICE)
    sino = radon_transform(truth, RadonFamily.polar(), PolarAxes.for_image(LATTICE, 90, 256))
    return truth, sino


def test_polar_inversion(polar_case):
    truth, sino = polar_case
    grid = GroupGrid.sim2(LATTICE, 8, 0.02, 4.0, 24)
    f_hat, report = invert(sino, RadonFamily.polar(), make_wavelet("sim2"), grid, truth=truth)
    assert f_hat.grid == LATTICE
    assert report.rel_l2_error <= 5e-2
    assert report.energy_residual <= 5e-2
    assert report.n_planes == grid.n_planes
    assert report.energy_lhs == pytest.approx(truth.norm() ** 2)
    assert set(report.timings) >= {"window", "reconstruction", "energy"}


def test_polar_inversion_without_truth(polar_case):
    _, sino = polar_case
    grid = GroupGrid.sim2(LATTICE, 8, 0.02, 4.0, 24)
    _, report = invert(sino, RadonFamily.polar(), make_wavelet("sim2"), grid)
    assert report.rel_l2_error is None
    assert report.energy_residual <= 5e-2


def test_shearlet_inversion():
    truth = ConeDogPhantom(inner_width=0.5, outer_width=1.0, slope=1.0).render(LATTICE)
    family = RadonFamily.affine()
    sino = radon_transform(truth, family, AffineAxes.for_image(LATTICE, 65, 128))
    grid = GroupGrid.shearlet(LATTICE, 32, 2.0, 0.05, 4.0, 12)
    _, report = invert(sino, family, make_wavelet("shearlet"), grid, truth=truth)
    assert report.rel_l2_error <= 8e-2


def test_circular_inversion():
    truth = DogPhantom(inner_width=0.5, outer_width=1.0).render(LATTICE)
    family = RadonFamily.circular(0.5)
    axes = CircularAxes.for_image(LATTICE, hybrid_radii(0.02, 0.25, 1.5, 8, 0.0625))
    sino = radon_transform(truth, family, axes)
    grid = GroupGrid.sim2(LATTICE, 8, 0.05, 4.0, 16)
    _, report = invert(sino, family, make_wavelet("sim2"), grid, truth=truth)
    assert report.rel_l2_error <= 1e-1


def test_error_decreases_under_refinement():
    truth = DOG.render(LATTICE)
    axes = PolarAxes.for_image(LATTICE, 16, 64)
    grid = GroupGrid.sim2(LATTICE, 2, 0.25, 1.0, 3)
    errors = []
    for _ in range(3):
        sino = radon_transform(truth, RadonFamily.polar(), axes)
        _, report = invert(sino, RadonFamily.polar(), make_wavelet("sim2"), grid, truth=truth)
        errors.append(report.rel_l2_error)
        axes, grid = axes.refined(), grid.refined()
    assert errors[0] > errors[1] > errors[2]


def test_inversion_with_lowpass(polar_case):
    truth, sino = polar_case
    psi = make_wavelet("sim2")
    phi = make_phi_lowpass(psi, a_cut=1.0)
    grid = GroupGrid.sim2(LATTICE, 8, 0.02, 1.0, 16)
    f_hat, report = invert_with_lowpass(sino, psi, phi, grid, truth=truth)
    assert report.rel_l2_error <= 5e-2
    assert report.energy_lowpass > 0
    assert report.energy_lowpass + report.energy_wavelet == pytest.approx(truth.norm() ** 2, rel=5e-2)


def test_inversion_with_lowpass_errors(polar_case):
    _, sino = polar_case
    psi = make_wavelet("sim2")
    phi = make_phi_lowpass(psi, a_cut=1.0)
    with pytest.raises(DomainError):
        invert_with_lowpass(sino, psi, phi, GroupGrid.sim2(LATTICE, 4, 0.1, 2.0, 4))
    other = WaveletSpec("sim2", 1.0)
    with pytest.raises(FamilyMismatchError):
        invert_with_lowpass(sino, other, phi, GroupGrid.sim2(LATTICE, 4, 0.1, 1.0, 4))
    affine = radon_transform(DOG.render(LATTICE), RadonFamily.affine(), AffineAxes.for_image(LATTICE, 9, 64))
    with pytest.raises(FamilyMismatchError):
        invert_with_lowpass(affine, psi, phi, GroupGrid.sim2(LATTICE, 4, 0.1, 1.0, 4))


def test_invert_checks_families(polar_case):
    _, sino = polar_case
    sim2_grid = GroupGrid.sim2(LATTICE, 4, 0.1, 1.0, 4)
    shear_grid = GroupGrid.shearlet(LATTICE, 4, 1.0, 0.1, 1.0, 4)
    with pytest.raises(FamilyMismatchError):
        invert(sino, RadonFamily.circular(0.5), make_wavelet("sim2"), sim2_grid)
    with pytest.raises(FamilyMismatchError):
        invert(sino, RadonFamily.polar(), make_wavelet("shearlet"), sim2_grid)
    with pytest.raises(FamilyMismatchError):
        invert(sino, RadonFamily.polar(), make_wavelet("sim2"), shear_grid)


def test_factorized_shearlet_coefficients():
    f = ConeDogPhantom(inner_width=0.5, outer_width=1.0, slope=1.0).render(LATTICE)
    sino = radon_transform(f, RadonFamily.affine(), AffineAxes.for_image(LATTICE, 65, 256))
    psi = make_wavelet("shearlet")
    grid = GroupGrid.shearlet(LATTICE, 4, 1.0, 0.5, 1.0, 1)
    field = sinogram_analyze(sino, make_Psi(psi, RadonFamily.affine(), sino.axes), grid)
    psi1, psi2 = shearlet_window_factors(psi)
    work = grid.work_grid
    i0, j0 = work.n1 // 2, work.n2 // 2
    engine, factorized = [], []
    for plane, samples in field.items():
        for i, j in ((i0, j0), (i0 + 2, j0 - 1), (i0 - 3, j0 + 2)):
            g = plane.element("shearlet", (work.x1[i], work.x2[j]))
            engine.append(samples[i, j])
            factorized.append(shearlet_coefficients_factorized(sino, psi1, psi2, g))
    engine, factorized = np.array(engine), np.array(factorized)
    assert np.linalg.norm(factorized - engine) / np.linalg.norm(engine) <= 5e-2


def test_factorized_needs_affine(polar_case):
    _, sino = polar_case
    psi1, psi2 = shearlet_window_factors(make_wavelet("shearlet"))
    grid = GroupGrid.shearlet(LATTICE, 2, 1.0, 0.5, 1.0, 1)
    with pytest.raises(FamilyMismatchError):
        shearlet_coefficients_factorized(sino, psi1, psi2, grid.planes()[0].element("shearlet"))


def test_report_metrics():
    f = DOG.render(LATTICE)
    exact = report_metrics(f, f)
    assert exact.rel_l2_error == 0.0
    assert exact.peak_error == 0.0
    scaled = report_metrics(f, f * 1.1)
    assert scaled.rel_l2_error == pytest.approx(0.1)
    assert scaled.peak_error == pytest.approx(0.1)
    with pytest.raises(ShapeMismatchError):
        report_metrics(f, Image.zeros(Grid2.square(16, 1 / 4)))


def test_report_energy_residual_and_json():
    assert ReconstructionReport().energy_residual == 0.0
    assert ReconstructionReport(energy_rhs=1.0).energy_residual == math.inf
    report = ReconstructionReport(family="polar", energy_lhs=2.0, energy_rhs=1.5, energy_in_band=1.9)
    assert report.energy_residual == pytest.approx(0.2)
    assert json.loads(json.dumps(report.to_dict()))["family"] == "polar"
