import math

import numpy as np
import pytest

from lsst.ts.radon_inversion.exceptions import DomainError, ShapeMismatchError
from lsst.ts.radon_inversion.groups import RadonFamily
from lsst.ts.radon_inversion.phantoms import ConeDogPhantom, DogPhantom, GaussianPhantom
from lsst.ts.radon_inversion.radon import (
    AffineAxes,
    CircularAxes,
    CircularSinogram,
    PolarAxes,
    PolarSinogram,
    hybrid_radii,
    radon_transform,
    sinogram_inner,
)
from lsst.ts.radon_inversion.sampling import Grid2, dft1_rows
from lsst.ts.radon_inversion.unitarize import (
    MultiplierSpec,
    apply_As,
    apply_I,
    apply_I_affine,
    apply_multiplier_planes,
    apply_multiplier_rows,
    unitarized_energy,
    unitarized_radon,
)

GRID = Grid2.square(64, 1 / 16)


def test_multiplier_spec():
    spec = MultiplierSpec("t", 0.5, 2.0)
    assert np.allclose(spec.values([-4.0, 0.0, 1.0]), [4.0, 0.0, 2.0])
    both = spec.then(MultiplierSpec("t", 1.5, 0.5))
    assert both.exponent == 2.0
    assert both.scale == 1.0
    with pytest.raises(DomainError):
        spec.then(MultiplierSpec("c", 0.5))
    with pytest.raises(DomainError):
        MultiplierSpec("x", 0.5)
    with pytest.raises(DomainError):
        MultiplierSpec("t", 0.5, 0.0)
    with pytest.raises(DomainError):
        MultiplierSpec("t", math.nan)


def test_squared_row_multiplier_is_a_second_derivative():
    # |tau|^2 = -(d/dt)^2 / (4 pi^2)
    dt = 1 / 32
    ts = dt * (np.arange(256) - 128)
    width = 0.5
    rows = np.exp(-math.pi * ts**2 / width**2)[None, :]
    out = apply_multiplier_rows(rows, dt, ts[0], MultiplierSpec("t", 2.0))
    second = (-2 * math.pi / width**2 + 4 * math.pi**2 * ts**2 / width**4) * rows[0]
    assert np.allclose(out[0], -second / (4 * math.pi**2), atol=1e-8)


def test_plane_multiplier_shape_mismatch():
    grid = Grid2.square(16, 0.25)
    with pytest.raises(ShapeMismatchError):
        apply_multiplier_planes(np.zeros((8, 8, 3)), grid, MultiplierSpec("c", 0.25))


def test_apply_As():
    dog = DogPhantom().render(GRID)
    assert (apply_As(dog, 0.0) - dog).norm() <= 1e-10 * dog.norm()
    half = apply_As(apply_As(dog, 0.5), 0.5)
    assert (half - apply_As(dog, 1.0)).norm() <= 1e-10 * dog.norm()
    back = apply_As(apply_As(dog, 1.0), -1.0)
    assert (back - dog).norm() <= 1e-8 * dog.norm()


def test_apply_As_two_is_minus_laplacian():
    width = 0.5
    phantom = GaussianPhantom(width=width)
    img = phantom.render(GRID)
    x1, x2 = GRID.mesh()
    r2 = x1**2 + x2**2
    laplacian = (-4 * math.pi / width**2 + 4 * math.pi**2 * r2 / width**4) * img.samples
    out = apply_As(img, 2.0)
    assert np.allclose(out.samples, -laplacian / (4 * math.pi**2), atol=1e-6)


def test_apply_As_negative_needs_zero_mean():
    with pytest.raises(DomainError):
        apply_As(GaussianPhantom().render(GRID), -0.5)


def test_apply_I_checks_the_sinogram_type():
    axes = PolarAxes.for_image(GRID, 8, 32)
    sino = radon_transform(DogPhantom().render(GRID), RadonFamily.polar(), axes)
    with pytest.raises(ShapeMismatchError):
        apply_I_affine(sino)
    assert apply_I(sino).samples.shape == sino.samples.shape


def test_polar_isometry():
    img = DogPhantom(center=(0.1, 0.2)).render(GRID)
    q = unitarized_radon(img, RadonFamily.polar(), PolarAxes.for_image(GRID, 96, 192), order=3)
    assert math.sqrt(unitarized_energy(q)) / img.norm() == pytest.approx(1.0, abs=1e-2)
    assert q.norm() / img.norm() == pytest.approx(1.0, abs=2e-2)

    # bilinear lines need the wider phantom on a finer grid for the same budget
    fine = Grid2.square(128, 1 / 32)
    img = DogPhantom(inner_width=0.5, outer_width=1.0, center=(0.1, 0.2)).render(fine)
    q = unitarized_radon(img, RadonFamily.polar(), PolarAxes.for_image(fine, 96, 256))
    assert math.sqrt(unitarized_energy(q)) / img.norm() == pytest.approx(1.0, abs=1e-2)


def test_affine_isometry_inside_the_cone():
    img = ConeDogPhantom(slope=1.0).render(GRID)
    q = unitarized_radon(img, RadonFamily.affine(), AffineAxes.for_image(GRID, 65, 256, v_max=2.0), order=3)
    assert math.sqrt(unitarized_energy(q)) / img.norm() == pytest.approx(1.0, abs=2e-2)


def test_circular_isometry():
    grid = Grid2.square(32, 1 / 8)
    img = DogPhantom(inner_width=0.5, outer_width=1.0).render(grid)
    axes = CircularAxes.for_image(grid, hybrid_radii(0.01, 0.25, 2.5, 12, 1 / 32))
    q = unitarized_radon(img, RadonFamily.circular(0.5), axes, order=3)
    assert math.sqrt(unitarized_energy(q)) / img.norm() == pytest.approx(1.0, abs=1e-2)


def test_energy_weight_of_one_changes_nothing():
    img = DogPhantom().render(GRID)
    q = unitarized_radon(img, RadonFamily.polar(), PolarAxes.for_image(GRID, 32, 128))
    ones = unitarized_energy(q, weight=lambda xi1, xi2: np.ones(np.shape(xi1)))
    assert ones == pytest.approx(unitarized_energy(q), rel=1e-12)
    half = unitarized_energy(q, weight=lambda xi1, xi2: np.full(np.shape(xi1), 0.5))
    assert half == pytest.approx(0.5 * unitarized_energy(q), rel=1e-12)


def test_unitarizing_operators_are_self_adjoint_and_positive():
    rng = np.random.default_rng(7)

    def noise(shape):
        return rng.normal(size=shape) + 1j * rng.normal(size=shape)

    polar_axes = PolarAxes.for_image(GRID, 8, 64)
    circular_axes = CircularAxes(Grid2.square(16, 1 / 4), (0.1, 0.3, 0.7))
    pairs = [
        [PolarSinogram(polar_axes, noise(polar_axes.shape)) for _ in range(2)],
        [CircularSinogram(circular_axes, noise(circular_axes.shape), 0.5) for _ in range(2)],
    ]
    for u, v in pairs:
        left = sinogram_inner(apply_I(u), v)
        right = sinogram_inner(u, apply_I(v))
        assert abs(left - right) <= 1e-12 * u.norm() * v.norm()
        energy = sinogram_inner(apply_I(u), u)
        assert energy.real >= 0
        assert abs(energy.imag) <= 1e-12 * u.norm() ** 2


def test_polar_multiplier_on_a_gaussian_sinogram():
    # R of exp(-pi |x|^2) is exp(-pi t^2) on every row
    axes = PolarAxes(4, 1024, 1 / 16)
    rows = np.broadcast_to(np.exp(-math.pi * axes.ts**2), axes.shape).astype(complex)
    out = apply_I(PolarSinogram(axes, rows))
    freqs, spectra = dft1_rows(out.samples, axes.dt, axes.t_origin)
    expected = np.sqrt(np.abs(freqs)) * np.exp(-math.pi * freqs**2)
    band = (np.abs(freqs) >= 0.25) & (np.abs(freqs) <= 2.0)
    error = np.max(np.abs(spectra[:, band] - expected[None, band]))
    assert error <= 5e-3 * expected.max()
