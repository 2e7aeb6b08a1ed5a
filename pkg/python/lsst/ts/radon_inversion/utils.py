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

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

# Environment variable holding the worker count used by FFTs and by the
# concurrent verification runner.
THREADS_ENV_VAR = "RADON_INVERSION_THREADS"

TWO_PI = 2.0 * math.pi


def get_thread_count(default=1):
    """Worker count from RADON_INVERSION_THREADS, falling back to ``default``.

    Unparsable or non-positive values fall back to ``default`` as well.
    """
    raw = os.environ.get(THREADS_ENV_VAR)
    if raw is None:
        return default
    try:
        count = int(raw)
    except ValueError:
        return default
    return count if count > 0 else default


def reduce_angle(angle, period=TWO_PI):
    """Canonical representative of ``angle`` in [0, period).

    Works on scalars and arrays.  Uses the floating remainder so that
    values a hair below ``period`` do not round up to ``period``.
    """
    reduced = np.mod(angle, period)
    reduced = np.where(reduced >= period, reduced - period, reduced)
    if np.ndim(reduced) == 0:
        return float(reduced)
    return reduced


def angle_distance(angle1, angle2, period=TWO_PI):
    """Distance between two angles on the circle of the given period."""
    diff = abs(reduce_angle(angle1 - angle2, period))
    return min(diff, period - diff)


def rotation(phi):
    """2x2 rotation matrix R_phi."""
    c, s = math.cos(phi), math.sin(phi)
    return np.array([[c, -s], [s, c]])


def unit_vector(theta):
    """w(theta) = (cos theta, sin theta); vectorized over theta."""
    return np.stack([np.cos(theta), np.sin(theta)], axis=-1)


def relative_l2(estimate, reference, weights=None):
    """Relative L2 distance ||estimate - reference|| / ||reference||.

    Returns 0 when both are zero and inf when only the reference is zero.
    """
    diff = np.abs(np.asarray(estimate) - np.asarray(reference)) ** 2
    ref = np.abs(np.asarray(reference)) ** 2
    if weights is not None:
        diff = diff * weights
        ref = ref * weights
    num = math.sqrt(float(np.sum(diff)))
    den = math.sqrt(float(np.sum(ref)))
    if den == 0.0:
        return 0.0 if num == 0.0 else math.inf
    return num / den


class Timer:
    """Elapsed seconds timer.

    Multiple instances can be used simultaneously and can overlap.
    Repeated use of `toc` without an intervening `tic` will yield increasing
    large elapsed times starting from the same point in time.

    Example:
       timer = Timer()
       ...build sinogram...
       timings["radon"] = timer.toc
       timer.tic
       ...analyse planes...
       timings["analysis"] = timer.toc
    """

    def __init__(self):
        self.tic

    @property
    def tic(self):
        self.start = time.perf_counter()
        return self.start

    @property
    def toc(self):
        elapsed_seconds = time.perf_counter() - self.start
        return elapsed_seconds  # fractional


def make_json_safe(obj):
    """
    Recursively converts objects to be JSON serializable.

    NumPy scalars and arrays become Python numbers and lists, complex
    values become ``[real, imag]`` pairs, and NaN or infinity become None.
    Dictionaries and lists are processed recursively.

    Parameters
    ----------
    obj : any
        The object to convert. Can be a dict, list, or any value.

    Returns
    -------
    any
        The converted object, safe for JSON serialization.
    """
    if obj is None or isinstance(obj, (bool, str)):
        return obj

    if isinstance(obj, dict):
        return {k: make_json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        result = [make_json_safe(v) for v in obj]
        return tuple(result) if isinstance(obj, tuple) else result

    if isinstance(obj, np.ndarray):
        if obj.ndim == 0:
            return make_json_safe(obj.item())
        return [make_json_safe(v) for v in obj.tolist()]

    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [make_json_safe(float(obj.real)), make_json_safe(float(obj.imag))]
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        if math.isnan(value) or math.isinf(value):
            return None
        return value

    return obj


def ordered_map(func, items):
    """Apply ``func`` to every item, on RADON_INVERSION_THREADS workers.

    Results come back in item order, so whatever is assembled from them
    does not depend on the thread count.
    """
    items = list(items)
    threads = get_thread_count()
    if threads <= 1 or len(items) < 2:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items))
