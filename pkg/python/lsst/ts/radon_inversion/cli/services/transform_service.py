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


import logging

import pandas as pd

from ...exceptions import FamilyMismatchError
from ...radon import radon_transform
from ...rfa_io import read_rfa, write_rfa
from ...sampling import Image
from ...special import c_alpha_details
from ...unitarize import apply_I

logger = logging.getLogger(__name__)


def compute_sinogram(config, in_path, out_path):
    """R f of the image in ``in_path`` for ``config.family``."""
    logger.info(f"Computing {config.family} sinogram of {in_path}")
    try:
        img = read_rfa(in_path)
        if not isinstance(img, Image):
            raise FamilyMismatchError(f"{in_path} holds a sinogram, not an image")
        kwargs = {"step": config.line_step} if config.family != "circular" and config.line_step else {}
        sino = radon_transform(img, config.radon_family, config.sinogram_axes(img.grid), **kwargs)
        write_rfa(out_path, sino)
        return sino
    except Exception as e:
        logger.error(f"Error computing {config.family} sinogram for: {in_path}. Error: {e}")
        raise


def unitarize_sinogram(in_path, out_path):
    """I R f for the sinogram in ``in_path``; the family is read from the file."""
    logger.info(f"Unitarizing sinogram {in_path}")
    try:
        sino = read_rfa(in_path)
        if isinstance(sino, Image):
            raise FamilyMismatchError(f"{in_path} holds an image, not a sinogram")
        result = apply_I(sino)
        write_rfa(out_path, result)
        return result
    except Exception as e:
        logger.error(f"Error unitarizing sinogram: {in_path}. Error: {e}")
        raise


def c_alpha_table(alpha):
    """c_alpha and k_alpha from both quadratures, with their relative gap.

    Both schemes share the truncation radius of the adaptive one.
    """
    logger.info(f"Getting c_alpha for alpha: {alpha}")
    try:
        adaptive = c_alpha_details(alpha, "adaptive")
        midpoint = c_alpha_details(alpha, "midpoint", radius=adaptive.radius)
        rows = [
            {"scheme": r.scheme, "c_alpha": r.value, "k_alpha": r.k_alpha, "radius": r.radius}
            for r in (adaptive, midpoint)
        ]
        gap = abs(adaptive.value - midpoint.value) / adaptive.value
        return pd.DataFrame(rows), gap
    except Exception as e:
        logger.error(f"Error getting c_alpha for alpha: {alpha}. Error: {e}")
        raise
