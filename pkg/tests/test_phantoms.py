import math

import numpy as np
import pytest

from lsst.ts.radon_inversion.exceptions import DomainError
from lsst.ts.radon_inversion.groups import ShearletElement, Sim2Element
from lsst.ts.radon_inversion.phantoms import (
    PHANTOM_KINDS,
    BarsPhantom,
    ConeDogPhantom,
    DiskPhantom,
    DogPhantom,
    GaussianPhantom,
    RandomBlobsPhantom,
    make_phantom,
)
from lsst.ts.radon_inversion.representations import pi_image
from lsst.ts.radon_inversion.sampling import Grid2, dft2_unitary

GRID = Grid2.square(64, 1 / 16)
BIG = Grid2.square(128, 1 / 16)


@pytest.mark.parametrize(
    "phantom",
    [
        GaussianPhantom(width=0.4, center=(0.2, -0.1)),
        DogPhantom(center=(-0.1, 0.3), amplitude=2.0),
        RandomBlobsPhantom(seed=3, extent=0.8, min_width=0.4, max_width=0.5),
    ],
)
def test_spectrum_matches_dft(phantom):
    xi1, xi2 = BIG.freq_mesh()
    computed = dft2_unitary(phantom.render(BIG)).samples
    expected = phantom.spectrum(xi1, xi2)
    assert np.max(np.abs(computed - expected)) <= 1e-8 * np.max(np.abs(expected))


def test_dog_has_zero_mean():
    assert DogPhantom().spectrum(0.0, 0.0) == 0.0
    img = DogPhantom().render(GRID)
    assert abs(img.mean()) <= 1e-10
    with pytest.raises(DomainError):
        DogPhantom(inner_width=0.5, outer_width=0.25)


def test_disk():
    grid = Grid2.square(128, 1 / 32)
    disk = DiskPhantom(radius=0.5, center=(0.25, 0.0))
    img = disk.render(grid)
    assert img.samples[grid.n1 // 2 + 8, grid.n2 // 2].real == 1.0
    assert np.sum(img.samples.real) * grid.cell_area == pytest.approx(math.pi * 0.25, rel=2e-2)
    assert disk.spectrum(0.0, 0.0) == pytest.approx(math.pi * 0.25)
    with pytest.raises(DomainError):
        DiskPhantom(radius=2.5).render(grid)
    with pytest.raises(DomainError):
        DiskPhantom(radius=0.0)


def test_bars():
    bars = BarsPhantom(n_bars=3, width=0.2, length=1.2, spacing=0.4, balanced=True)
    assert bars.offsets.tolist() == pytest.approx([-0.4, 0.0, 0.4])
    assert bars.values(np.array([-0.4, 0.0, 0.4, 0.2]), np.zeros(4)).tolist() == [1.0, -1.0, 1.0, 0.0]
    assert bars.spectrum(0.0, 0.0) == pytest.approx(0.2 * 1.2)
    assert BarsPhantom().spectrum(0.0, 0.0) == pytest.approx(3 * 0.2 * 1.2)
    with pytest.raises(DomainError):
        BarsPhantom(width=0.5, spacing=0.4)
    with pytest.raises(DomainError):
        BarsPhantom(length=8.0).render(GRID)


def test_cone_dog():
    cone = ConeDogPhantom(slope=0.5)
    assert cone.spectrum(1.0, 0.6) == 0.0
    assert cone.spectrum(0.0, 1.0) == 0.0
    assert cone.spectrum(1.0, 0.0) == pytest.approx(DogPhantom().spectrum(1.0, 0.0))
    img = cone.render(GRID)
    assert np.max(np.abs(img.samples.imag)) <= 1e-10 * np.max(np.abs(img.samples.real))
    g = Sim2Element((0.1, 0.0), 0.3, 1.2)
    assert (cone.render_transformed(GRID, g) - pi_image(img, g)).norm() == 0.0
    with pytest.raises(DomainError):
        ConeDogPhantom(slope=0.0)


def test_render_transformed_is_closed_form():
    phantom = GaussianPhantom(width=0.5)
    g = ShearletElement((0.2, 0.1), 0.5, 2.0)
    moved = phantom.render_transformed(GRID, g)
    x1, x2 = GRID.mesh()
    # g^-1 [x] = A_a^-1 S_s^-1 (x - b)
    y2 = (x2 - 0.1) / math.sqrt(2.0)
    y1 = (x1 - 0.2 + 0.5 * (x2 - 0.1)) / 2.0
    expected = 2.0**-0.75 * phantom.values(y1, y2)
    assert np.allclose(moved.samples, expected, atol=1e-12)


def test_random_blobs_are_reproducible():
    assert RandomBlobsPhantom(seed=5).blobs == RandomBlobsPhantom(seed=5).blobs
    assert RandomBlobsPhantom(seed=5).blobs != RandomBlobsPhantom(seed=6).blobs
    with pytest.raises(DomainError):
        RandomBlobsPhantom(n_blobs=0)


def test_make_phantom():
    assert set(PHANTOM_KINDS) == {"gaussian", "dog", "disk", "bars", "cone_dog", "random"}
    assert make_phantom("gaussian", width=0.3).width == 0.3
    with pytest.raises(DomainError):
        make_phantom("shepp")
    with pytest.raises(DomainError):
        make_phantom("dog", radius=1.0)
