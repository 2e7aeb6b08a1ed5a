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

from ...rfa_io import read_rfa, write_pgm, write_rfa
from ...sampling import Image

logger = logging.getLogger(__name__)


def create_phantom(config, out_path):
    """Render the configured phantom on the configured grid and write it."""
    logger.info(f"Creating {config.phantom} phantom of size {config.image_size} at {out_path}")
    try:
        grid = config.image_grid()
        img = config.make_phantom().render(grid)
        write_rfa(out_path, img)
        return img
    except Exception as e:
        logger.error(f"Error creating {config.phantom} phantom for: {out_path}. Error: {e}")
        raise


def export_pgm(in_path, out_path, part="real", radius_index=0):
    """8-bit preview of an image or sinogram file.

    ``part`` is one of real, imag or abs; circular sinograms export the
    centre plane at ``radius_index``.
    """
    logger.info(f"Exporting {part} part of {in_path} to {out_path}")
    try:
        obj = read_rfa(in_path)
        samples = obj.samples
        if samples.ndim == 3:
            samples = samples[:, :, radius_index]
        values = {"real": samples.real, "imag": samples.imag, "abs": abs(samples)}[part]
        write_pgm(out_path, values)
        return obj if isinstance(obj, Image) else None
    except Exception as e:
        logger.error(f"Error exporting {in_path} to {out_path}. Error: {e}")
        raise
