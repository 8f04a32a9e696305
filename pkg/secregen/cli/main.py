"""Encode, reconstruct, repair and verify layered secure regenerating codes.

Usage: secregen [-v] <command> [options]

Exit codes: 0 success, 2 invalid input, 3 verification failure, 4 IO error.
"""

import argparse
import logging
import sys
from pathlib import Path

import pydantic

from ..core.config import get_config
from ..core.errors import ValidationError, VerificationError
from ..core.log import setup_logging
from ..core.persistence import bytes_save_atomic, json_dumps
from . import commands

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_VERIFICATION = 3
EXIT_IO = 4


def _add_code_params(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--n", type=int, required=True, help="Number of nodes")
    parser.add_argument("--ell", type=int, required=True, help="Eavesdropped nodes tolerated")
    parser.add_argument("--t", type=int, required=True, help="Group size, 2 <= t <= n - ell")
    parser.add_argument("--field", default=None, help="Field, e.g. 2^16 (default from config)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="secregen", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("encode", help="Encode a file into n share files")
    _add_code_params(p)
    p.add_argument("--in", dest="input", type=Path, required=True, help="File to encode")
    p.add_argument("--out-dir", type=Path, required=True, help="Directory for share-NN.rgc files")
    p.add_argument("--seed", default=None, help="Hex seed for reproducible randomness")

    p = sub.add_parser("reconstruct", help="Rebuild the original file from n-1 shares")
    p.add_argument("--shares", type=Path, required=True, help="Directory of share files")
    p.add_argument("--out", type=Path, required=True, help="Output file")

    p = sub.add_parser("repair", help="Regenerate one lost share from the other n-1")
    p.add_argument("--shares", type=Path, required=True, help="Directory of share files")
    p.add_argument("--failed", type=int, required=True, help="Node id to regenerate")
    p.add_argument("--out", type=Path, required=True, help="Regenerated share file")

    p = sub.add_parser("verify", help="Check reconstruction, repair and secrecy; print a JSON report")
    _add_code_params(p)
    p.add_argument("--oracle", action="store_true", help="Also run the exhaustive entropy oracle")
    p.add_argument("--break-randomness", action="store_true", help="Negative control: zero the random symbols")
    p.add_argument("--trials", type=int, default=1, help="Random messages per condition")
    p.add_argument("--seed", default=None, help="Hex seed for the trial messages")
    p.add_argument("--workers", type=int, default=None, help="Process-pool size for the secrecy sweep")
    p.add_argument("--out", type=Path, default=None, help="Also write the report here")

    p = sub.add_parser("region", help="Emit tradeoff-region data")
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--ell", type=int)
    p.add_argument("--preset", choices=["7661"], default=None)
    p.add_argument("--format", dest="fmt", choices=["json", "csv"], default="json")
    p.add_argument("--out", type=Path, default=None, help="Write here instead of stdout")
    return parser


def _emit(data: bytes, out: Path | None) -> None:
    if out is not None:
        bytes_save_atomic(out, data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()


def _dispatch(args: argparse.Namespace) -> int:
    match args.command:
        case "encode":
            paths = commands.cmd_encode(
                args.n, args.ell, args.t, args.input, args.out_dir, seed=args.seed, field=args.field
            )
            print(f"Wrote {len(paths)} shares to {args.out_dir}", file=sys.stderr)
        case "reconstruct":
            size = commands.cmd_reconstruct(args.shares, args.out)
            print(f"Wrote {size} bytes to {args.out}", file=sys.stderr)
        case "repair":
            _emit(json_dumps(commands.cmd_repair(args.shares, args.failed, args.out)), None)
        case "verify":
            report = commands.cmd_verify(
                args.n,
                args.ell,
                args.t,
                field=args.field,
                oracle=args.oracle,
                break_randomness=args.break_randomness,
                trials=args.trials,
                seed=args.seed,
                workers=args.workers,
            )
            data = json_dumps(report)
            _emit(data, None)
            if args.out is not None:
                bytes_save_atomic(args.out, data)
            if not report["passed"]:
                return EXIT_VERIFICATION
        case "region":
            data = commands.cmd_region(
                n=args.n, k=args.k, d=args.d, ell=args.ell, preset=args.preset, fmt=args.fmt
            )
            _emit(data, args.out)
    return EXIT_OK


def run(argv: list[str] | None = None) -> int:
    """Parse *argv*, run the command and return its exit code."""
    args = build_parser().parse_args(argv)
    try:
        config = get_config()
    except pydantic.ValidationError as e:
        print(f"Error: invalid configuration: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    level = logging.WARNING - 10 * min(args.verbose, 2) if args.verbose else config.logging.level
    log_dir = Path(config.logging.log_dir).expanduser() if config.logging.log_dir else None
    setup_logging(level, log_dir)

    try:
        return _dispatch(args)
    except VerificationError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_VERIFICATION
    except ValidationError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as e:
        logger.debug("IO failure", exc_info=True)
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_IO


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
