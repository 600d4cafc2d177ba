"""
Command-line entry point: python -m app.main <calibrate|experiment|gen-data> ...

Exit codes: 0 success, 1 usage / data / run error, 2 calibration did not converge.
"""
import argparse
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from app.commands import calibrate, experiment, gen_data
from app.commands.common import EXIT_ERROR, ConfigError, format_validation_error
from app.core.config import settings
from app.core.exceptions import CalibrationError
from app.core.logging_config import configure_logging

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=settings.PROJECT_NAME,
        description="Learning-rate calibration of generalized posteriors by bootstrap coverage",
    )
    parser.add_argument("--log-level", default=None, help="Log level (default: GPC_LOG_LEVEL)")
    subparsers = parser.add_subparsers(dest="command", required=True)
    calibrate.add_parser(subparsers)
    experiment.add_parser(subparsers)
    gen_data.add_parser(subparsers)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on usage errors; 2 is reserved for non-convergence
        return EXIT_ERROR if e.code else 0

    configure_logging(args.log_level)
    try:
        return args.handler(args)
    except ConfigError as e:
        print(str(e), file=sys.stderr)
    except ValidationError as e:
        print(format_validation_error(e, prefix="invalid data"), file=sys.stderr)
    except (CalibrationError, OSError, ValueError) as e:
        logger.debug("run failed", exc_info=True)
        print(f"error: {e}", file=sys.stderr)
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
