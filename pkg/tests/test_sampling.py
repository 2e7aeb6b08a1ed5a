import math

import numpy as np
import pytest

from lsst.ts.radon_inversion.exceptions import DomainError, ShapeMismatchError
from lsst.ts.radon_inversion.sampling import (
    Grid2,
    Image,
    circle_integral,
    circle_integrals,
    dft1_rows,
    dft2_unitary,
    idft1_rows,
    idft2_unitary,
    line_integral_arclength,
    line_integrals_arclength,
    line_integrals_graph,
    pad_centered,
    bilinear_sample,
    sample,
    spectrum_on_points,
)


def gaussian(x1, x2):
    return np.exp(-math.pi * (x1**2 + x2**2))


@pytest.fixture
def grid():
    return Grid2.square(128, 1 / 32)


def test_grid_geometry():
    grid = Grid2(4, 6, 0.5)
    assert grid.dy == 0.5
    assert grid.origin == (-0.75, -1.25)
    assert grid.half_width == (0.75, 1.25)
    np.testing.assert_allclose(grid.x1, [-0.75, -0.25, 0.25, 0.75])
    assert grid.nyquist == (1.0, 1.0)
    assert grid.freq_cell_area == pytest.approx(1 / 6)
    big = grid.padded(2)
    assert big.shape == (8, 12)
    assert big.crop_offsets(grid) == (2, 3)
    assert grid.describe() == "4x6 @ (0.5, 0.5)"


def test_bad_grids():
    with pytest.raises(DomainError):
        Grid2(1, 4, 0.1)
    with pytest.raises(DomainError):
        Grid2(4, 4, -0.1)
    with pytest.raises(ShapeMismatchError):
        Grid2(8, 8, 0.1).crop_offsets(Grid2(5, 8, 0.1))
    with pytest.raises(ShapeMismatchError):
        Image(Grid2(4, 4, 0.1), np.zeros((4, 5)))
    with pytest.raises(DomainError):
        Image(Grid2(2, 2, 0.1), np.array([[0.0, np.nan], [0.0, 0.0]]))


def test_image_crop_and_embed(grid):
    img = Image.from_function(grid, gaussian)
    big = img.embed(grid.padded(2))
    assert big.norm() == pytest.approx(img.norm())
    np.testing.assert_array_equal(big.crop(grid).samples, img.samples)
    assert img.inner(img) == pytest.approx(img.norm() ** 2)
    assert (img * 2 - img).norm() == pytest.approx(img.norm())


def test_dft2_of_gaussian():
    grid = Grid2.square(128, 1 / 16)
    img = Image.from_function(grid, gaussian)
    spec = dft2_unitary(img)
    xi1, xi2 = np.meshgrid(spec.xi1, spec.xi2, indexing="ij")
    np.testing.assert_allclose(spec.samples, gaussian(xi1, xi2), atol=1e-9)
    assert spec.norm() == pytest.approx(img.norm(), rel=1e-12)
    back = idft2_unitary(spec)
    np.testing.assert_allclose(back.samples, img.samples, atol=1e-12)


def test_dft2_of_shifted_gaussian_on_odd_grid():
    grid = Grid2(65, 63, 1 / 8)
    img = Image.from_function(grid, lambda x1, x2: gaussian(x1 - 0.5, x2 + 0.25))
    spec = dft2_unitary(img)
    xi1, xi2 = np.meshgrid(spec.xi1, spec.xi2, indexing="ij")
    expected = gaussian(xi1, xi2) * np.exp(-2j * math.pi * (0.5 * xi1 - 0.25 * xi2))
    np.testing.assert_allclose(spec.samples, expected, atol=1e-9)


def test_spectrum_on_points_matches_grid(grid):
    img = Image.from_function(grid, lambda x1, x2: gaussian(x1 - 0.3, x2))
    spec = dft2_unitary(img)
    idx = [(0, 5), (64, 64), (100, 17)]
    xi1 = [spec.xi1[i] for i, _ in idx]
    xi2 = [spec.xi2[j] for _, j in idx]
    np.testing.assert_allclose(spectrum_on_points(img, xi1, xi2), [spec.samples[i, j] for i, j in idx], atol=1e-10)


def test_dft1_rows_with_offset_origin():
    dt = 1 / 16
    ts = -3.0 + dt * np.arange(100)
    rows = np.stack([np.exp(-math.pi * ts**2), np.exp(-math.pi * (ts - 1) ** 2)])
    freqs, values = dft1_rows(rows, dt, ts[0])
    np.testing.assert_allclose(values[0], np.exp(-math.pi * freqs**2), atol=1e-9)
    np.testing.assert_allclose(values[1], np.exp(-math.pi * freqs**2 - 2j * math.pi * freqs), atol=1e-6)
    np.testing.assert_allclose(idft1_rows(values, dt, ts[0]), rows, atol=1e-12)


def test_pad_centered():
    samples = np.arange(6.0).reshape(2, 3)
    padded, origin = pad_centered(samples, 8, -1.0, 0.5)
    assert padded.shape == (2, 8)
    np.testing.assert_array_equal(padded[:, 2:5], samples)
    assert origin == -2.0
    with pytest.raises(ShapeMismatchError):
        pad_centered(samples, 2, 0.0, 1.0)


def test_sample(grid):
    img = Image.from_function(grid, lambda x1, x2: 2 * x1 + 3 * x2)
    assert sample(img, (0.1, -0.2), order=1) == pytest.approx(0.2 - 0.6)
    assert sample(img, (5.0, 0.0), order=1) == 0
    img = Image.from_function(grid, gaussian)
    for p in [(0.1, -0.2), (0.013, 0.4), (-0.71, 0.3)]:
        assert sample(img, p, order=3) == pytest.approx(gaussian(*p), abs=1e-5)
        assert sample(img, p) == sample(img, p, order=1)
        assert sample(img, p) == pytest.approx(gaussian(*p), abs=2e-3)
    assert sample(img, (0.0, -3.0)) == 0


def test_bilinear_sample():
    grid = Grid2.square(4, 1.0)
    samples = np.arange(16, dtype=complex).reshape(4, 4)
    samples[1:3, 1:3] = 7.0
    img = Image(grid, samples)
    x1, x2 = grid.x1, grid.x2
    assert bilinear_sample(img, (x1[3], x2[0])) == samples[3, 0]
    midpoint = ((x1[1] + x1[2]) / 2, (x2[1] + x2[2]) / 2)
    assert bilinear_sample(img, midpoint) == pytest.approx(7.0)
    assert bilinear_sample(img, (x1[3] + 0.5, x2[0])) == 0


def test_line_integrals_of_gaussian(grid):
    img = Image.from_function(grid, gaussian)
    ts = np.linspace(-1, 1, 9)
    theta = 0.7
    omega = (math.cos(theta), math.sin(theta))
    values = line_integrals_arclength(img, omega, ts, grid.dx / 2)
    np.testing.assert_allclose(values.real, np.exp(-math.pi * ts**2), atol=3e-3)

    v = 0.8
    values = line_integrals_graph(img, v, ts, grid.dx / 2)
    expected = np.exp(-math.pi * ts**2 / (1 + v**2)) / math.sqrt(1 + v**2)
    np.testing.assert_allclose(values.real, expected, atol=3e-3)

    with pytest.raises(DomainError):
        line_integrals_arclength(img, omega, ts, 0.0)


def test_line_integral_converges_at_second_order():
    grid = Grid2.square(513, 1 / 256)
    img = Image.from_function(grid, lambda x1, x2: np.cos(3 * x2))
    exact = 2 * math.sin(3) / 3
    errors = [abs(line_integral_arclength(img, (1.0, 0.0), 0.0, step) - exact) for step in (0.1, 0.05, 0.025)]
    assert errors[0] / errors[1] >= 3.5
    assert errors[1] / errors[2] >= 3.5


def test_line_missing_the_grid(grid):
    img = Image.from_function(grid, gaussian)
    assert line_integrals_arclength(img, (1.0, 0.0), [5.0], grid.dx)[0] == 0


def test_circle_integral_of_gaussian(grid):
    img = Image.from_function(grid, gaussian)
    for r in (0.1, 0.5, 1.0):
        value = circle_integral(img, (0.0, 0.0), r, 256)
        assert value.real == pytest.approx(2 * math.pi * math.exp(-math.pi * r**2), abs=1e-2)
    with pytest.raises(DomainError):
        circle_integral(img, (0.0, 0.0), 0.0, 64)


def test_circle_integrals_of_harmonic_polynomials():
    # both are harmonic, so every circle integral is 2 pi f(center)
    centers = np.array([[0.3, -0.2], [-0.45, 0.1], [0.0, 0.6]])
    bilinear = Image.from_function(Grid2.square(32, 1 / 8), lambda x1, x2: 1 + 2 * x1 - x2 + x1 * x2)
    cubic = Image.from_function(Grid2.square(128, 1 / 16), lambda x1, x2: x1**3 - 3 * x1 * x2**2)
    for nphi in (8, 9, 16):
        values = circle_integrals(bilinear, centers, 0.7, nphi)
        expected = 1 + 2 * centers[:, 0] - centers[:, 1] + centers[:, 0] * centers[:, 1]
        np.testing.assert_allclose(values.real, 2 * math.pi * expected, atol=1e-12)
        values = circle_integrals(cubic, centers, 0.7, nphi, order=3)
        expected = centers[:, 0] ** 3 - 3 * centers[:, 0] * centers[:, 1] ** 2
        np.testing.assert_allclose(values.real, 2 * math.pi * expected, atol=1e-9)
