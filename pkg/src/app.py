import sys
from typing import List, Optional

from loguru import logger

from src.cli import StegoDoc
from src.config import Config, parse_args
from src.errors import CapacityExceeded, ConfigError, CorruptPayloadError, FieldOverflowError
from src.keywords import ExitCode


def main(argv: Optional[List[str]] = None, out=None) -> int:
    # parse the arguments, usage errors exit with ExitCode.USAGE
    args = parse_args(argv)

    # check the configuration
    config = Config()
    try:
        config.check(args)
    except ConfigError as e:
        print(f"stegodoc: error: {e}", file=sys.stderr)
        return ExitCode.USAGE

    # run the command
    try:
        StegoDoc(config, out).run()
    except (CapacityExceeded, FieldOverflowError) as e:
        logger.error(str(e))
        return ExitCode.CAPACITY
    except CorruptPayloadError as e:
        logger.error(f"cannot decode the payload: {e}")
        return ExitCode.CORRUPT
    except (ValueError, OSError) as e:
        logger.error(str(e))
        return ExitCode.USAGE
    return ExitCode.OK


if __name__ == "__main__":
    sys.exit(int(main()))
