#!/usr/bin/env python3
"""
ARIS Simulator - Main entry point

Runs one simulator pipeline per invocation: fit the PZT equivalent circuit,
build the impedance envelope, synthesize and select matching tiers, assign IQ
loads, compute array beams or extract reflections from receptions.
"""
import sys
from typing import List, Optional

from src.cli.parser import build_parser
from src.config.config_manager import ConfigManager
from src.models.errors import ArisError, ConfigError, InputFileError, ParameterError
from src.utils.logger import Logger

# Input problems exit with 2, failed computations with 1.
INPUT_ERRORS = (InputFileError, ConfigError, ParameterError)


def main(argv: Optional[List[str]] = None) -> int:
    """
    Main entry point for the application.

    Args:
        argv: Command-line arguments (defaults to sys.argv[1:])

    Returns:
        int: Process exit code
    """
    logger = Logger()
    args = build_parser().parse_args(argv)

    try:
        config_manager = ConfigManager(args.config)
        config = config_manager.load()
        logger.configure(
            args.log_level or config_manager.get_log_level(),
            config_manager.get_log_retention_days(),
            args.log_dir or config_manager.get_log_dir(),
        )
        logger.info(f"Starting {args.command}")
        code = args.handler(args, config)
        logger.info(f"{args.command} completed")
        return code
    except INPUT_ERRORS as e:
        logger.critical(f"{args.command}: {e}")
        return 2
    except ArisError as e:
        logger.critical(f"{args.command} failed: {e}")
        return 1
    except OSError as e:
        logger.error(f"{args.command}: {e}")
        return 1
    except KeyboardInterrupt:
        logger.info("Received keyboard interrupt. Exiting.")
        return 1
    finally:
        logger.flush_logs()


if __name__ == "__main__":
    sys.exit(main())
