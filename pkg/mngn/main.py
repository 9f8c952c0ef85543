import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence
from pydantic import ValidationError
from mngn import config
from mngn.cli.commands import bench, check, solve
from mngn.exceptions import SolverError, UsageError
from mngn.schemas.cli import CliConfig

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILURE = 2


class ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(prog="mngn", description="Minimal-norm Gauss-Newton solvers and benchmarks")
    parser.add_argument("--log-level", default=config.LOG_LEVEL,
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    subparsers = parser.add_subparsers(dest="subcommand", required=True)
    solve.register(subparsers)
    bench.register(subparsers)
    check.register(subparsers)
    return parser


def _config(args: argparse.Namespace) -> CliConfig:
    values = {k: v for k, v in vars(args).items() if k in CliConfig.model_fields and v is not None}
    return CliConfig(**values)


def _usage(message: str) -> int:
    print(f"mngn: error: {message}", file=sys.stderr)
    return EXIT_USAGE


def run(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse `argv`, run the selected subcommand and write its output.

    Exit codes: 0 success, 1 usage error, 2 runtime failure or a run that
    did not succeed. `--out` is only written on success.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = _config(args)
    except SystemExit as exc:
        return exc.code or EXIT_OK
    except UsageError as exc:
        return _usage(exc.detail)
    except ValidationError as exc:
        return _usage(exc.errors()[0]["msg"])

    logging.basicConfig(
        level=args.log_level,
        format="%(asctime)s - %(levelname)s - %(name)s - %(message)s",
        stream=sys.stderr,
    )

    try:
        code, payload = args.handler(cfg)
    except UsageError as exc:
        return _usage(exc.detail)
    except ValidationError as exc:
        return _usage(exc.errors()[0]["msg"])
    except SolverError as exc:
        logger.error("%s", exc)
        print(f"mngn: {exc}", file=sys.stderr)
        return EXIT_FAILURE

    if cfg.out and code == EXIT_OK:
        Path(cfg.out).write_bytes(payload)
    else:
        sys.stdout.write(payload.decode("utf-8"))
        sys.stdout.flush()
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
