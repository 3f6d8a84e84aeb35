import sys
import traceback
import logging

import cli

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

logger = logging.getLogger('outer_space')


def setup_logging(verbose=0, log_file=None):
    """Configure logging on standard error (standard output carries the JSON result).

    Args:
        verbose: 0 logs warnings, 1 adds info, 2 or more adds debug
        log_file: optional path that receives the same records
    """
    level = logging.WARNING if verbose == 0 else logging.INFO if verbose == 1 else logging.DEBUG
    handlers = [logging.StreamHandler(sys.stderr)]
    if log_file:
        handlers.append(logging.FileHandler(log_file))
    logging.basicConfig(level=level, format=LOG_FORMAT, handlers=handlers, force=True)


# Add global exception handler
def exception_hook(exctype, value, tb):
    """Global exception handler for unhandled exceptions"""
    error_msg = ''.join(traceback.format_exception(exctype, value, tb))
    logger.error(f"Unhandled exception: {error_msg}")

    # Call the original exception handler
    sys.__excepthook__(exctype, value, tb)


def main(argv=None):
    # Set the global exception hook
    sys.excepthook = exception_hook
    return cli.run(argv, configure_logging=setup_logging)


if __name__ == "__main__":
    sys.exit(main())
