#!/usr/bin/env python3
"""
kdvfactor - spectral curves and factorizations of stationary KdV potentials
Command-line entry point
"""

import os
import sys
import traceback
from pathlib import Path
from typing import Optional, Sequence

# Add src directory to path for imports
sys.path.insert(0, str(Path(__file__).parent))

from utils.logger import setup_logger, get_logger
from utils.config import Config
from utils.exceptions import (EXIT_CHECK_FAILED, EXIT_FAILURE, EXIT_INTERRUPTED, EXIT_OK, KdvFactorError,
                              create_user_friendly_message, exit_code_for)
from cli.commands import render, run_command
from cli.parser import job_from_args, parse_arguments


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main application entry point; returns the process exit code"""
    args = parse_arguments(argv)
    config = Config(args.config, create_missing=False)
    level = args.log_level or config.get_logging_level()
    setup_logger(level=level,
                 console_output=config.get("logging.console_output", True),
                 file_output=config.get("logging.file_output", False))
    logger = get_logger(__name__)

    logger.info("=" * 60)
    logger.info("kdvfactor starting")
    logger.info(f"Python version: {sys.version}")
    logger.info(f"Platform: {sys.platform}")
    logger.info(f"Working directory: {os.getcwd()}")
    logger.info("=" * 60)
    logger.debug(f"Configuration loaded: {config.get_all()}")

    try:
        job = job_from_args(args, config)
        doc = run_command(job)
        print(render(doc, job))
        return EXIT_OK if doc.passed else EXIT_CHECK_FAILED

    except KeyboardInterrupt:
        logger.warning("Interrupted by user")
        print("Interrupted", file=sys.stderr)
        return EXIT_INTERRUPTED
    except KdvFactorError as e:
        logger.error(f"{args.command} failed: {e}")
        print(create_user_friendly_message(e), file=sys.stderr)
        return exit_code_for(e)
    except Exception as e:
        logger.error(f"Critical error: {e}")
        logger.error(f"Traceback:\n{traceback.format_exc()}")
        print(f"An unexpected error occurred: {e}", file=sys.stderr)
        return EXIT_FAILURE
    finally:
        logger.info("kdvfactor shutting down")
        logger.info("=" * 60)


if __name__ == "__main__":
    sys.exit(main())
