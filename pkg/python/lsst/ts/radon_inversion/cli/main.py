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


"""Command line front-end.

Every failure leaves a single ``[CODE] message`` line on stderr and exits
with the code of the error class (see `BaseRadonError`).
"""

__all__ = ["build_parser", "main"]

import argparse
import logging
import sys

from .. import __version__
from ..config import load_config
from ..exceptions import BaseRadonError, UsageError
from ..phantoms import PHANTOM_KINDS
from ..verification import SUITES, write_report
from .services.invert_service import report_table, run_inversion
from .services.phantom_service import create_phantom, export_pgm
from .services.transform_service import c_alpha_table, compute_sinogram, unitarize_sinogram
from .services.verify_service import run_verification

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser():
    parser = _Parser(prog="run_radon_inversion", description="Group-theoretic Radon transforms and their inversion.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true", help="log at DEBUG level")
    parser.add_argument("--config", help="flat 'key = value' configuration file")
    parser.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override one configuration value (repeatable)",
    )
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    cmd = commands.add_parser("phantom", help="render a phantom image")
    cmd.add_argument("kind", choices=PHANTOM_KINDS)
    cmd.add_argument("--size", type=int)
    cmd.add_argument("--out", required=True)

    cmd = commands.add_parser("radon", help="forward Radon transform of an image file")
    cmd.add_argument("--family", choices=["polar", "affine", "circular"])
    cmd.add_argument("--alpha", type=float)
    cmd.add_argument("--n-theta", type=int)
    cmd.add_argument("--n-t", type=int)
    cmd.add_argument("--n-v", type=int)
    cmd.add_argument("--in", dest="in_path", required=True)
    cmd.add_argument("--out", required=True)

    cmd = commands.add_parser("unitarize", help="apply I to a sinogram file")
    cmd.add_argument("--in", dest="in_path", required=True)
    cmd.add_argument("--out", required=True)

    cmd = commands.add_parser("invert", help="reconstruct an image")
    cmd.add_argument("--in", dest="in_path", help="sinogram file; the configured phantom when omitted")
    cmd.add_argument("--truth", help="true image file, for the error metrics")

    cmd = commands.add_parser("calpha", help="c_alpha and k_alpha by two quadratures")
    cmd.add_argument("alpha", type=float)

    cmd = commands.add_parser("verify", help="run verification suites")
    cmd.add_argument(
        "suites", nargs="*", default=["all"], metavar="SUITE", help=f"all (default) or any of: {', '.join(SUITES)}"
    )

    cmd = commands.add_parser("export", help="8-bit PGM preview of an image or sinogram")
    cmd.add_argument("--in", dest="in_path", required=True)
    cmd.add_argument("--out", required=True)
    cmd.add_argument("--part", choices=["real", "imag", "abs"], default="real")
    cmd.add_argument("--radius-index", type=int, default=0)
    return parser


def _flag_overrides(args):
    """Command flags as config overrides; they win over ``--set``."""
    names = {
        "kind": "phantom",
        "size": "image_size",
        "family": "family",
        "alpha": "alpha",
        "n_theta": "n_theta",
        "n_t": "n_t",
        "n_v": "n_v",
    }
    if args.command == "calpha":
        return []
    return [f"{key}={getattr(args, attr)}" for attr, key in names.items() if getattr(args, attr, None) is not None]


def _setup_logging(verbose):
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format=LOG_FORMAT,
        stream=sys.stderr,
        force=True,
    )


def _dispatch(args, out):
    if args.command == "unitarize":
        unitarize_sinogram(args.in_path, args.out)
        return
    if args.command == "export":
        export_pgm(args.in_path, args.out, args.part, args.radius_index)
        return
    if args.command == "calpha":
        table, gap = c_alpha_table(args.alpha)
        table.to_csv(out, index=False, float_format="%.12e", lineterminator="\n")
        out.write(f"relative_gap,{gap:.6e}\n")
        return

    config = load_config(args.config, [*args.overrides, *_flag_overrides(args)])
    if args.command == "phantom":
        create_phantom(config, args.out)
    elif args.command == "radon":
        compute_sinogram(config, args.in_path, args.out)
    elif args.command == "invert":
        _, report = run_inversion(config, args.in_path, args.truth)
        report_table(report).to_csv(out, index=False, float_format="%.6e", lineterminator="\n")
    elif args.command == "verify":
        write_report(run_verification(config, args.suites), out)


def main(argv=None, out=None, err=None):
    """Run one command; returns the process exit code."""
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        _setup_logging(args.verbose)
        logger.info(f"Running command {args.command}")
        _dispatch(args, out)
    except BaseRadonError as e:
        print(str(e), file=err)
        return e.exit_code
    except OSError as e:
        print(f"[IO] {e}", file=err)
        return 3
    except Exception as e:
        logger.error(f"Error in {sys.argv[0]}: {e}", exc_info=True)
        print(f"[INTERNAL] {type(e).__name__}: {e}", file=err)
        return 1
    return 0
