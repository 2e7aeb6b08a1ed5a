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


"""RFA1 files for images and sinograms, and 8-bit PGM export.

An RFA1 file is a short text header followed by raw samples::

    RFA1
    kind sino_polar
    shape 180 512
    theta 0 0.0174532925199433
    t -5.65 0.0221
    data
    <little-endian float64 pairs (real, imag), row-major>

The axis lines depend on the kind:

* ``image``: ``x1`` and ``x2``, each ``origin spacing``;
* ``sino_polar``: ``theta`` and ``t``;
* ``sino_affine``: ``v`` (origin ``-v_max``) and ``t``;
* ``sino_circular``: ``c1``, ``c2``, ``radii r_1 ... r_n`` and
  ``alpha value``.

Floats are written with 17 significant digits, so a write/read cycle is
bit exact.
"""

__all__ = ["RFA_MAGIC", "RFA_KINDS", "write_rfa", "read_rfa", "write_pgm"]

import logging
import math
from pathlib import Path

import numpy as np

from .exceptions import DomainError, FileFormatError, ShapeMismatchError
from .radon import (
    AffineAxes,
    AffineSinogram,
    CircularAxes,
    CircularSinogram,
    PolarAxes,
    PolarSinogram,
)
from .sampling import Grid2, Image

logger = logging.getLogger(__name__)

RFA_MAGIC = "RFA1"
RFA_KINDS = ("image", "sino_polar", "sino_affine", "sino_circular")

_DTYPE = np.dtype("<f8")
# origins are checked against the centered axes they imply
_ORIGIN_RTOL = 1e-9


def _fmt(value):
    return f"{float(value):.17g}"


def _header(obj):
    if isinstance(obj, Image):
        grid = obj.grid
        x0, y0 = grid.origin
        return "image", [
            f"shape {grid.n1} {grid.n2}",
            f"x1 {_fmt(x0)} {_fmt(grid.dx)}",
            f"x2 {_fmt(y0)} {_fmt(grid.dy)}",
        ]
    axes = obj.axes
    if isinstance(obj, PolarSinogram):
        return obj.kind, [
            f"shape {axes.n_theta} {axes.n_t}",
            f"theta 0 {_fmt(axes.dtheta)}",
            f"t {_fmt(axes.t_origin)} {_fmt(axes.dt)}",
        ]
    if isinstance(obj, AffineSinogram):
        return obj.kind, [
            f"shape {axes.n_v} {axes.n_t}",
            f"v {_fmt(-axes.v_max)} {_fmt(axes.dv)}",
            f"t {_fmt(axes.t_origin)} {_fmt(axes.dt)}",
        ]
    if isinstance(obj, CircularSinogram):
        cgrid = axes.cgrid
        x0, y0 = cgrid.origin
        return obj.kind, [
            f"shape {cgrid.n1} {cgrid.n2} {len(axes.rs)}",
            f"c1 {_fmt(x0)} {_fmt(cgrid.dx)}",
            f"c2 {_fmt(y0)} {_fmt(cgrid.dy)}",
            "radii " + " ".join(_fmt(r) for r in axes.rs),
            f"alpha {_fmt(obj.alpha)}",
        ]
    raise FileFormatError(f"cannot write {type(obj).__name__} as RFA1")


def write_rfa(path, obj):
    """Write an `Image` or a sinogram to ``path``."""
    kind, lines = _header(obj)
    samples = np.ascontiguousarray(obj.samples, dtype=np.complex128)
    interleaved = np.empty(samples.shape + (2,), dtype=_DTYPE)
    interleaved[..., 0] = samples.real
    interleaved[..., 1] = samples.imag
    text = "\n".join([RFA_MAGIC, f"kind {kind}"] + lines + ["data"]) + "\n"
    try:
        with open(path, "wb") as stream:
            stream.write(text.encode("ascii"))
            stream.write(interleaved.tobytes())
    except OSError as e:
        raise FileFormatError(f"cannot write {path}: {e}") from e
    logger.debug(f"wrote {kind} of shape {samples.shape} to {path}")


def _read_header(stream, path):
    lines = []
    while True:
        raw = stream.readline()
        if not raw:
            raise FileFormatError(f"{path}: header has no 'data' line")
        line = raw.decode("ascii", errors="replace").strip()
        if line == "data":
            return lines
        lines.append(line)


def _fields(lines, path):
    if not lines or lines[0] != RFA_MAGIC:
        raise FileFormatError(f"{path}: not an {RFA_MAGIC} file")
    fields = {}
    for line in lines[1:]:
        key, _, value = line.partition(" ")
        if not key:
            continue
        fields[key] = value.split()
    if "kind" not in fields or len(fields["kind"]) != 1 or fields["kind"][0] not in RFA_KINDS:
        raise FileFormatError(f"{path}: missing or unknown kind {fields.get('kind')}")
    return fields


def _floats(fields, key, count, path):
    try:
        values = [float(v) for v in fields[key]]
    except KeyError:
        raise FileFormatError(f"{path}: header line '{key}' is missing") from None
    except ValueError:
        raise FileFormatError(f"{path}: header line '{key}' is not numeric: {fields[key]}") from None
    if count is not None and len(values) != count:
        raise FileFormatError(f"{path}: header line '{key}' needs {count} values, got {len(values)}")
    return values


def _check_origin(origin, expected, key, path):
    if not math.isclose(origin, expected, rel_tol=_ORIGIN_RTOL, abs_tol=1e-12):
        raise FileFormatError(f"{path}: axis '{key}' reads {origin!r} where the centered axes need {expected!r}")


def _build(fields, samples_shape, path):
    kind = fields["kind"][0]
    if kind == "image":
        (x0, dx), (y0, dy) = _floats(fields, "x1", 2, path), _floats(fields, "x2", 2, path)
        grid = Grid2(samples_shape[0], samples_shape[1], dx, dy)
        _check_origin(x0, grid.origin[0], "x1", path)
        _check_origin(y0, grid.origin[1], "x2", path)
        return lambda samples: Image(grid, samples)
    if kind == "sino_polar":
        _, dtheta = _floats(fields, "theta", 2, path)
        t0, dt = _floats(fields, "t", 2, path)
        axes = PolarAxes(samples_shape[0], samples_shape[1], dt)
        _check_origin(dtheta, axes.dtheta, "theta", path)
        _check_origin(t0, axes.t_origin, "t", path)
        return lambda samples: PolarSinogram(axes, samples)
    if kind == "sino_affine":
        v0, _ = _floats(fields, "v", 2, path)
        t0, dt = _floats(fields, "t", 2, path)
        axes = AffineAxes(samples_shape[0], -v0, samples_shape[1], dt)
        _check_origin(t0, axes.t_origin, "t", path)
        return lambda samples: AffineSinogram(axes, samples)
    (x0, dx), (y0, dy) = _floats(fields, "c1", 2, path), _floats(fields, "c2", 2, path)
    radii = _floats(fields, "radii", samples_shape[2], path)
    (alpha,) = _floats(fields, "alpha", 1, path)
    cgrid = Grid2(samples_shape[0], samples_shape[1], dx, dy)
    _check_origin(x0, cgrid.origin[0], "c1", path)
    _check_origin(y0, cgrid.origin[1], "c2", path)
    axes = CircularAxes(cgrid, tuple(radii))
    return lambda samples: CircularSinogram(axes, samples, alpha)


def read_rfa(path):
    """Read an `Image` or sinogram written by `write_rfa`.

    Raises
    ------
    FileFormatError
        Unreadable file, malformed header or a payload of the wrong size.
    """
    try:
        with open(path, "rb") as stream:
            lines = _read_header(stream, path)
            payload = stream.read()
    except OSError as e:
        raise FileFormatError(f"cannot read {path}: {e}") from e
    fields = _fields(lines, path)
    try:
        shape = tuple(int(n) for n in fields.get("shape", []))
    except ValueError:
        raise FileFormatError(f"{path}: bad shape line {fields['shape']}") from None
    expected_ndim = 3 if fields["kind"][0] == "sino_circular" else 2
    if len(shape) != expected_ndim:
        raise FileFormatError(f"{path}: shape {shape} does not fit kind {fields['kind'][0]}")
    expected_bytes = int(np.prod(shape)) * 2 * _DTYPE.itemsize
    if len(payload) != expected_bytes:
        raise FileFormatError(f"{path}: {len(payload)} data bytes, expected {expected_bytes}")
    values = np.frombuffer(payload, dtype=_DTYPE).reshape(shape + (2,))
    try:
        make = _build(fields, shape, path)
        obj = make(values[..., 0] + 1j * values[..., 1])
    except (ValueError, DomainError, ShapeMismatchError) as e:
        raise FileFormatError(f"{path}: inconsistent header: {e}") from e
    logger.debug(f"read {fields['kind'][0]} of shape {shape} from {path}")
    return obj


def write_pgm(path, values):
    """Binary 8-bit PGM of a real 2D array, min-max scaled.

    Axis 0 (x1) runs left to right and axis 1 (x2) bottom to top.
    """
    values = np.asarray(values, dtype=float)
    if values.ndim != 2:
        raise FileFormatError(f"PGM export needs a 2D array, got shape {values.shape}")
    lo, hi = float(np.min(values)), float(np.max(values))
    span = hi - lo
    scaled = np.zeros(values.shape) if span == 0 else (values - lo) / span
    pixels = np.round(255.0 * scaled).astype(np.uint8).T[::-1]
    header = f"P5\n{pixels.shape[1]} {pixels.shape[0]}\n255\n".encode("ascii")
    try:
        Path(path).write_bytes(header + np.ascontiguousarray(pixels).tobytes())
    except OSError as e:
        raise FileFormatError(f"cannot write {path}: {e}") from e
