import logging
import sys
from datetime import datetime
from pathlib import Path
from typing import Optional
from config.settings import LoggingConfig

LOG_FORMAT = "[%(asctime)s] %(name)s - %(levelname)s - %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"


def setup_logging(config: Optional[LoggingConfig] = None, component: str = "veil") -> None:
    """Configure the root logger.

    stdout carries JSON reports and MCP traffic, so every handler writes to stderr
    or to a file. Without DEBUG only warnings reach stderr; with DEBUG the configured
    level goes to stderr and to ``<log_dir>/<component>-YYYYMMDD.log``.
    """
    if config is None:
        from config.settings import get_config

        config = get_config().logging

    logging.root.handlers.clear()

    root_logger = logging.getLogger()
    root_logger.setLevel(config.level)
    formatter = logging.Formatter(LOG_FORMAT, datefmt=DATE_FORMAT)

    stderr_handler = logging.StreamHandler(sys.stderr)
    stderr_handler.setFormatter(formatter)
    if not config.debug:
        stderr_handler.setLevel(logging.WARNING)
    root_logger.addHandler(stderr_handler)

    if config.debug:
        log_dir = Path(config.log_dir)
        log_dir.mkdir(parents=True, exist_ok=True)

        log_filename = log_dir / f"{component}-{datetime.now().strftime('%Y%m%d')}.log"
        file_handler = logging.FileHandler(log_filename, encoding="utf-8")
        file_handler.setFormatter(formatter)
        root_logger.addHandler(file_handler)

    # sympy's polys and the MCP transport are chatty at INFO
    for noisy in ("mcp", "fastmcp", "sympy"):
        logging.getLogger(noisy).setLevel(logging.WARNING)


def get_logger(name: str) -> logging.Logger:
    """Get a logger instance for the given module."""
    return logging.getLogger(name)
