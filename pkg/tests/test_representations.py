import numpy as np
import pytest

from lsst.ts.radon_inversion.exceptions import FamilyMismatchError
from lsst.ts.radon_inversion.groups import RadonFamily, ShearletElement, Sim2Element, character, compose
from lsst.ts.radon_inversion.phantoms import DogPhantom, GaussianPhantom
from lsst.ts.radon_inversion.radon import AffineAxes, CircularAxes, PolarAxes, hybrid_radii, radon_transform
from lsst.ts.radon_inversion.representations import hat_pi, pi_image, representation_scale
from lsst.ts.radon_inversion.sampling import Grid2

GRID = Grid2.square(64, 1 / 16)
DOG = DogPhantom(center=(0.1, -0.05))


@pytest.fixture(scope="module")
def polar_sino():
    return radon_transform(DOG.render(GRID), RadonFamily.polar(), PolarAxes.for_image(GRID, 96, 256), order=3)


def test_pi_image_matches_closed_form():
    phantom = GaussianPhantom(width=0.4, center=(0.2, 0.1))
    img = phantom.render(GRID)
    for g in (Sim2Element((0.1, -0.2), 0.7, 1.3), ShearletElement((0.05, 0.1), 0.4, -0.8)):
        moved = pi_image(img, g)
        exact = phantom.render_transformed(GRID, g)
        assert (moved - exact).norm() / exact.norm() <= 2e-3
        assert moved.norm() == pytest.approx(img.norm(), rel=1e-3)


def test_pi_image_is_a_homomorphism():
    img = GaussianPhantom(width=0.5).render(GRID)
    g1 = Sim2Element((0.1, 0.0), 0.4, 1.2)
    g2 = Sim2Element((0.0, -0.1), 1.1, 0.9)
    twice = pi_image(pi_image(img, g2), g1)
    once = pi_image(img, compose(g1, g2))
    assert (twice - once).norm() / img.norm() <= 1e-2


def test_representation_scale(polar_sino):
    g = Sim2Element((0, 0), 0.0, 4.0)
    assert representation_scale(polar_sino, g) == pytest.approx(0.5)


def test_hat_pi_polar_norm_and_composition(polar_sino):
    g1 = Sim2Element((0.05, -0.1), 0.3, 0.8)
    g2 = Sim2Element((-0.1, 0.05), 2.0, 1.1)
    moved = hat_pi(polar_sino, g1)
    assert moved.norm() == pytest.approx(polar_sino.norm(), rel=1e-2)
    twice = hat_pi(hat_pi(polar_sino, g2), g1)
    once = hat_pi(polar_sino, compose(g1, g2))
    assert (twice - once).norm() / polar_sino.norm() <= 3e-2


def test_polar_intertwining(polar_sino):
    family = RadonFamily.polar()
    for g in (Sim2Element((0.1, 0.05), 0.9, 1.4), Sim2Element((-0.05, 0.1), 4.0, 0.7)):
        moved_img = DOG.render_transformed(GRID, g)
        left = radon_transform(moved_img, family, polar_sino.axes, order=3)
        right = hat_pi(polar_sino, g) * (1.0 / character(family, "chi", g))
        assert (left - right).norm() / polar_sino.norm() <= 3e-2


def test_affine_intertwining():
    family = RadonFamily.affine()
    phantom = GaussianPhantom(width=0.8, center=(0.1, -0.05))
    axes = AffineAxes.for_image(GRID, 65, 256, v_max=2.0)
    sino = radon_transform(phantom.render(GRID), family, axes)
    g = ShearletElement((0.05, -0.05), 0.3, 1.2)
    left = radon_transform(phantom.render_transformed(GRID, g), family, axes)
    right, mask = hat_pi(sino, g, return_mask=True)
    residual = (left.samples - right.samples / character(family, "chi", g)) * mask
    assert np.sqrt(np.sum(np.abs(residual) ** 2 * axes.weights())) / sino.norm() <= 3e-2


def test_circular_intertwining():
    family = RadonFamily.circular(0.5)
    grid = Grid2.square(32, 1 / 8)
    phantom = GaussianPhantom(width=1.0)
    axes = CircularAxes.for_image(grid, hybrid_radii(0.05, 0.25, 1.0, 6, 0.0625))
    sino = radon_transform(phantom.render(grid), family, axes)
    g = Sim2Element((0.125, -0.125), 0.5, 1.25)
    left = radon_transform(phantom.render_transformed(grid, g), family, axes)
    right, mask = hat_pi(sino, g, return_mask=True)
    residual = (left.samples - right.samples / character(family, "chi", g)) * mask
    assert np.sqrt(np.sum(np.abs(residual) ** 2 * axes.weights(0.5))) / sino.norm() <= 1e-1


def test_hat_pi_rejects_other_groups(polar_sino):
    with pytest.raises(FamilyMismatchError):
        hat_pi(polar_sino, ShearletElement((0, 0), 0.0, 1.0))
