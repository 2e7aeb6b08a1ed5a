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


"""Experiment configuration.

Configuration files are flat ``key = value`` lines with ``#`` comments::

    family = affine
    image_size = 128
    n_angles = 24
    tol.reconstruction = 0.08

Keys starting with ``tol.`` override verification budgets.  Values are
validated by `ExperimentConfig`; any problem raises `ConfigError` naming
the offending key.
"""

__all__ = ["ExperimentConfig", "parse_config_text", "load_config"]

import logging
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .exceptions import ConfigError
from .groups import RadonFamily
from .phantoms import make_phantom
from .radon import AffineAxes, CircularAxes, PolarAxes, hybrid_radii
from .sampling import Grid2
from .voice import GroupGrid
from .wavelets import make_wavelet

logger = logging.getLogger(__name__)

TOLERANCE_PREFIX = "tol."


class _CrossFieldError(ValueError):
    """Inconsistency between settings, reported against ``key``."""

    def __init__(self, key, message):
        super().__init__(message)
        self.key = key


class ExperimentConfig(BaseModel):
    """Everything one run needs, with defaults sized for a desk machine."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    family: Literal["polar", "affine", "circular"] = "polar"
    alpha: float = Field(0.5, gt=0.0, lt=1.0)

    image_size: int = Field(128, ge=2)
    image_spacing: float = Field(1.0 / 32.0, gt=0.0)
    phantom: Literal["gaussian", "dog", "disk", "bars", "cone_dog", "random"] = "dog"
    inner_width: float = Field(0.5, gt=0.0)
    outer_width: float = Field(1.0, gt=0.0)
    disk_radius: float = Field(0.5, gt=0.0)

    n_theta: int = Field(90, ge=2)
    n_t: int = Field(256, ge=2)
    n_v: int = Field(129, ge=2)
    v_max: float = Field(2.0, gt=0.0)
    line_step: Optional[float] = Field(None, gt=0.0)
    r_min: float = Field(0.02, gt=0.0)
    r_switch: float = Field(0.25, gt=0.0)
    r_max: float = Field(2.0, gt=0.0)
    n_r_geometric: int = Field(16, ge=2)
    dr: float = Field(0.04, gt=0.0)

    wavelet: Optional[Literal["sim2", "shearlet"]] = None
    n_angles: int = Field(36, ge=2)
    s_max: float = Field(1.5, gt=0.0)
    a_min: float = Field(0.125, gt=0.0)
    a_max: float = Field(4.0, gt=0.0)
    n_scales: int = Field(14, ge=2)
    pad: int = Field(2, ge=1)
    a_cut: Optional[float] = Field(None, gt=0.0)

    tolerances: dict[str, float] = Field(default_factory=dict)
    output_image: Optional[str] = None
    output_report: Optional[str] = None
    n_elements: int = Field(10, ge=1)
    seed: int = 0

    @model_validator(mode="after")
    def _check_ranges(self):
        if self.a_min >= self.a_max:
            raise _CrossFieldError("a_min", f"a_min {self.a_min} must be below a_max {self.a_max}")
        if self.inner_width >= self.outer_width:
            raise _CrossFieldError(
                "inner_width", f"inner_width {self.inner_width} must be below outer_width {self.outer_width}"
            )
        if not self.r_min < self.r_switch < self.r_max:
            raise _CrossFieldError(
                "r_switch", f"radii need r_min < r_switch < r_max, got {self.r_min}, {self.r_switch}, {self.r_max}"
            )
        if self.wavelet is not None and self.wavelet != self.radon_family.group:
            raise _CrossFieldError("wavelet", f"wavelet {self.wavelet} does not match the {self.family} family")
        if self.a_cut is not None and self.family != "polar":
            raise _CrossFieldError("a_cut", "a_cut (the low-pass split) needs family = polar")
        return self

    @property
    def radon_family(self):
        return RadonFamily(self.family, self.alpha)

    @property
    def wavelet_kind(self):
        return self.wavelet or self.radon_family.group

    def image_grid(self):
        return Grid2.square(self.image_size, self.image_spacing)

    def make_phantom(self):
        params = {
            "dog": dict(inner_width=self.inner_width, outer_width=self.outer_width),
            "cone_dog": dict(inner_width=self.inner_width, outer_width=self.outer_width),
            "gaussian": dict(width=self.inner_width),
            "disk": dict(radius=self.disk_radius),
            "random": dict(seed=self.seed),
        }.get(self.phantom, {})
        return make_phantom(self.phantom, **params)

    def make_wavelet(self):
        return make_wavelet(self.wavelet_kind)

    def group_grid(self, lattice=None):
        lattice = lattice or self.image_grid()
        a_max = self.a_max if self.a_cut is None else min(self.a_max, self.a_cut)
        if self.radon_family.group == "sim2":
            return GroupGrid.sim2(lattice, self.n_angles, self.a_min, a_max, self.n_scales, pad=self.pad)
        return GroupGrid.shearlet(lattice, self.n_angles, self.s_max, self.a_min, a_max, self.n_scales, pad=self.pad)

    def sinogram_axes(self, grid=None):
        """Sinogram axes of the family for ``grid`` (circle centers cover the padded lattice)."""
        grid = grid or self.image_grid()
        if self.family == "polar":
            return PolarAxes.for_image(grid, self.n_theta, self.n_t)
        if self.family == "affine":
            return AffineAxes.for_image(grid, self.n_v, self.n_t, self.v_max)
        rs = hybrid_radii(self.r_min, self.r_switch, self.r_max, self.n_r_geometric, self.dr)
        axes = CircularAxes.for_image(grid, rs)
        work = grid.padded(self.pad)
        if axes.cgrid.n1 < work.n1:
            axes = CircularAxes(work, rs)
        return axes

    def tolerance(self, name, default):
        return self.tolerances.get(name, default)


def parse_config_text(text, source="<config>"):
    """Flat ``key = value`` text to a dict of strings.

    ``tol.<name>`` keys are gathered under ``tolerances``.
    """
    values = {}
    tolerances = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(f"{source}:{number}: expected 'key = value', got {raw.strip()!r}")
        if key.startswith(TOLERANCE_PREFIX):
            target, name = tolerances, key[len(TOLERANCE_PREFIX) :]
        else:
            target, name = values, key
        if name in target:
            raise ConfigError(f"{source}:{number}: key '{key}' given twice")
        target[name] = value
    if tolerances:
        values["tolerances"] = tolerances
    return values


def _validate(values):
    try:
        return ExperimentConfig.model_validate(values)
    except ValidationError as e:
        first = e.errors()[0]
        loc = ".".join(str(part) for part in first["loc"])
        cause = first.get("ctx", {}).get("error")
        if isinstance(cause, _CrossFieldError):
            raise ConfigError(f"bad value for '{cause.key}': {cause}") from None
        if not loc:
            raise ConfigError(f"inconsistent configuration: {first['msg']}") from None
        key = loc.replace("tolerances.", TOLERANCE_PREFIX)
        raise ConfigError(f"bad value for '{key}': {first['msg']}") from None


def load_config(path=None, overrides=()):
    """Configuration from an optional file and ``key=value`` overrides.

    Parameters
    ----------
    path : `str` or `pathlib.Path`, optional
        Flat config file.
    overrides : iterable of `str`
        ``key=value`` strings applied after the file, e.g. from ``--set``.

    Returns
    -------
    config : `ExperimentConfig`
    """
    values = {}
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as e:
            raise ConfigError(f"cannot read config file {path}: {e}") from e
        values = parse_config_text(text, source=str(path))
    extra = parse_config_text("\n".join(overrides), source="--set")
    tolerances = {**values.pop("tolerances", {}), **extra.pop("tolerances", {})}
    values.update(extra)
    if tolerances:
        values["tolerances"] = tolerances
    config = _validate(values)
    logger.debug(f"configuration: {config.model_dump()}")
    return config
