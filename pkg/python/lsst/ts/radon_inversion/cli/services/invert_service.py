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


import json
import logging

import pandas as pd

from ...exceptions import FamilyMismatchError, FileFormatError
from ...inversion import invert, invert_with_lowpass
from ...radon import radon_transform
from ...rfa_io import read_rfa, write_rfa
from ...sampling import Image
from ...wavelets import make_phi_lowpass, make_Psi

logger = logging.getLogger(__name__)


def _load_inputs(config, in_path, truth_path):
    truth = read_rfa(truth_path) if truth_path else None
    if truth is not None and not isinstance(truth, Image):
        raise FamilyMismatchError(f"{truth_path} holds a sinogram, not an image")
    if in_path:
        sino = read_rfa(in_path)
        if isinstance(sino, Image):
            raise FamilyMismatchError(f"{in_path} holds an image, not a sinogram")
        family = sino.family
        if (family.kind, family.alpha) != (config.family, config.alpha):
            logger.info(f"using the {family} family of {in_path}")
            config = config.model_copy(update={"family": family.kind, "alpha": family.alpha, "wavelet": None})
        return config, sino, truth
    grid = config.image_grid()
    truth = config.make_phantom().render(grid)
    kwargs = {"step": config.line_step} if config.family != "circular" and config.line_step else {}
    sino = radon_transform(truth, config.radon_family, config.sinogram_axes(grid), **kwargs)
    return config, sino, truth


def run_inversion(config, in_path=None, truth_path=None):
    """Reconstruct an image from a sinogram file, or from the configured phantom.

    Writes ``config.output_image`` (RFA1) and ``config.output_report``
    (JSON) when set.

    Returns
    -------
    f_hat : `Image`
    report : `ReconstructionReport`
    """
    logger.info(f"Getting {config.family} inversion of {in_path or config.phantom + ' phantom'}")
    try:
        config, sino, truth = _load_inputs(config, in_path, truth_path)
        family = config.radon_family
        lattice = truth.grid if truth is not None else config.image_grid()
        psi = config.make_wavelet()
        grid = config.group_grid(lattice)
        window = make_Psi(psi, family, sino.axes)
        if config.a_cut is not None:
            phi = make_phi_lowpass(psi, a_cut=config.a_cut, grid=lattice)
            f_hat, report = invert_with_lowpass(sino, psi, phi, grid, window=window, truth=truth)
        else:
            f_hat, report = invert(sino, family, psi, grid, window=window, truth=truth)
        if config.output_image:
            write_rfa(config.output_image, f_hat)
        if config.output_report:
            try:
                with open(config.output_report, "w") as stream:
                    json.dump(report.to_dict(), stream, indent=2, sort_keys=True)
            except OSError as e:
                raise FileFormatError(f"cannot write {config.output_report}: {e}") from e
        return f_hat, report
    except Exception as e:
        logger.error(f"Error in {config.family} inversion of: {in_path}. Error: {e}")
        raise


def report_table(report):
    """Two-column (quantity, value) table of a report, without timings."""
    data = report.to_dict()
    data.pop("timings", None)
    data["energy_residual"] = report.energy_residual
    return pd.DataFrame({"quantity": list(data), "value": list(data.values())})
