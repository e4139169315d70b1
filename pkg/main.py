import logging
import sys

from app.bootstrap import Container
from app.config.settings import get_settings
from app.core.logging import setup_logging


def main(argv: list[str] | None = None) -> int:
    settings = get_settings()
    setup_logging(level=settings.log_level, log_file=settings.log_file)
    logger = logging.getLogger(__name__)
    logger.info("Application startup version=%s threads=%s", settings.tool_version, settings.threads)

    gateway = Container(settings).build_gateway()
    return gateway.run(argv)


if __name__ == "__main__":
    sys.exit(main())
