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

# error_code values should be no bigger than 8 characters 12345678


class BaseRadonError(Exception):
    """Base of every error raised on purpose by this package.

    ``exit_code`` is what the command line front-end returns when the error
    escapes a command.
    """

    error_code = "RADON"
    exit_code = 1
    error_message = "<NA>"

    def get_subclass_name(self):
        return self.__class__.__name__

    def __init__(self, error_message, error_code=None, exit_code=None):
        super().__init__(error_message)
        self.error_message = error_message

        if error_code and len(error_code) > 8:
            raise ValueError(f'error_code "{error_code}" too big')
        if error_code:
            self.error_code = error_code

        if exit_code is not None:
            self.exit_code = exit_code

    def __str__(self):
        return f"[{self.error_code}] {self.error_message}"

    def to_dict(self):
        dd = dict(
            errorMessage=self.error_message,
            errorCode=self.error_code,
            exitCode=self.exit_code,
        )
        return dd


class DomainError(BaseRadonError):
    """A numeric argument lies outside the range where the quantity exists.
    Typical causes: circular exponent alpha outside (0, 1), a zero shearlet
    scale, a negative-order multiplier applied to an image with non-zero mean.
    """

    error_code = "DOMAIN"


class QuadratureError(BaseRadonError):
    """Adaptive quadrature hit its depth limit before meeting the tolerance,
    or the integrand produced a non-finite value.
    """

    error_code = "NOCONV"


class FamilyMismatchError(BaseRadonError):
    """Group element, wavelet, sinogram or grid belong to different
    Radon families.
    """

    error_code = "FAMILY"


class InconsistencyError(BaseRadonError):
    """A computed quantity contradicts a normalization it depends on,
    e.g. the low-pass partition of unity goes clearly negative.
    """

    error_code = "INCONSIS"


class ShapeMismatchError(BaseRadonError):
    """Arrays or grids that must match do not."""

    error_code = "SHAPE"


class ConfigError(BaseRadonError):
    """Experiment configuration could not be parsed or validated."""

    error_code = "BADCONF"


class UsageError(BaseRadonError):
    """Bad command line usage."""

    error_code = "USAGE"


class FileFormatError(BaseRadonError):
    """An RFA1 (or other) file could not be read or written."""

    error_code = "BADFILE"
    exit_code = 3


class CheckFailure(BaseRadonError):  # noqa: N818
    """At least one verification check exceeded its budget."""

    error_code = "CHKFAIL"
    exit_code = 2
