import pytest

from lsst.ts.radon_inversion.config import ExperimentConfig, load_config, parse_config_text
from lsst.ts.radon_inversion.exceptions import ConfigError
from lsst.ts.radon_inversion.phantoms import DogPhantom, GaussianPhantom
from lsst.ts.radon_inversion.radon import AffineAxes, CircularAxes, PolarAxes

CONFIG_TEXT = """
# small affine run
family = affine
image_size = 64   # samples per side
image_spacing = 0.0625
n_v = 33
tol.reconstruction = 0.2
"""


def test_defaults():
    config = ExperimentConfig()
    assert config.family == "polar"
    assert config.wavelet_kind == "sim2"
    assert config.image_grid().shape == (128, 128)
    assert isinstance(config.sinogram_axes(), PolarAxes)
    assert config.tolerance("reconstruction", 0.05) == 0.05


def test_parse_config_text():
    values = parse_config_text(CONFIG_TEXT)
    assert values == {
        "family": "affine",
        "image_size": "64",
        "image_spacing": "0.0625",
        "n_v": "33",
        "tolerances": {"reconstruction": "0.2"},
    }


@pytest.mark.parametrize("text", ["family affine", "= 3", "n_t = 4\nn_t = 5"])
def test_parse_config_text_errors(text):
    with pytest.raises(ConfigError):
        parse_config_text(text)


def test_load_config(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(CONFIG_TEXT)
    config = load_config(path, ["n_t=64", "tol.energy=0.1"])
    assert config.family == "affine"
    assert config.wavelet_kind == "shearlet"
    assert config.n_t == 64
    assert config.tolerances == {"reconstruction": 0.2, "energy": 0.1}
    axes = config.sinogram_axes()
    assert isinstance(axes, AffineAxes)
    assert axes.n_v == 33
    grid = config.group_grid()
    assert grid.group == "shearlet"
    assert grid.signed


def test_overrides_win_over_the_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("image_size = 32\ntol.energy = 0.1\n")
    config = load_config(path, ["image_size=48", "tol.energy=0.3"])
    assert config.image_size == 48
    assert config.tolerance("energy", 0.0) == 0.3


@pytest.mark.parametrize(
    "overrides",
    [
        ["family=helical"],
        ["alpha=1.5"],
        ["image_size=1"],
        ["bogus=1"],
        ["a_min=4", "a_max=2"],
        ["family=polar", "wavelet=shearlet"],
        ["family=affine", "a_cut=1"],
        ["tol.energy=lots"],
    ],
)
def test_bad_values(overrides):
    with pytest.raises(ConfigError):
        load_config(None, overrides)


@pytest.mark.parametrize(
    "overrides, key",
    [
        (["a_min=4", "a_max=2"], "a_min"),
        (["inner_width=2"], "inner_width"),
        (["r_switch=5"], "r_switch"),
        (["family=polar", "wavelet=shearlet"], "wavelet"),
        (["family=affine", "a_cut=1"], "a_cut"),
    ],
)
def test_cross_field_errors_name_the_key(overrides, key):
    with pytest.raises(ConfigError, match=f"bad value for '{key}'"):
        load_config(None, overrides)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.cfg")


def test_phantom_and_circular_axes():
    config = load_config(None, ["family=circular", "image_size=32", "image_spacing=0.125", "r_max=1.0"])
    assert config.make_phantom() == DogPhantom(0.5, 1.0)
    assert load_config(None, ["phantom=gaussian", "inner_width=0.3"]).make_phantom() == GaussianPhantom(0.3)
    axes = config.sinogram_axes()
    assert isinstance(axes, CircularAxes)
    assert axes.rs[-1] <= 1.0
    # centers cover the padded lattice
    assert axes.cgrid.n1 >= config.image_grid().padded(config.pad).n1


def test_a_cut_limits_the_group_grid():
    config = load_config(None, ["a_cut=1.0"])
    assert config.group_grid().a_max == 1.0
