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

from ...exceptions import FileFormatError
from ...verification import results_frame, run_suites

logger = logging.getLogger(__name__)


def run_verification(config, suites):
    """Run the named suites; also writes the CSV table to ``config.output_report`` when set."""
    logger.info(f"Getting verification results for suites: {', '.join(suites)}")
    try:
        results = run_suites(config, suites)
        if config.output_report:
            try:
                results_frame(results).to_csv(
                    config.output_report, index=False, float_format="%.6e", lineterminator="\n"
                )
            except OSError as e:
                raise FileFormatError(f"cannot write {config.output_report}: {e}") from e
        return results
    except Exception as e:
        logger.error(f"Error running verification suites: {suites}. Error: {e}")
        raise
