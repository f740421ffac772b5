#!/usr/bin/env python3
"""
stabring - Ehrhart rings of stable set polytopes
Main entry point

Usage:
    python main.py hstar --cycle 7
    python main.py verify locus --ell 3 --max-degree 4

Environment variables (.env):
    CE_CELL_LIMIT=100000000
    CE_JOBS=1
    CE_OUTPUT_FORMAT=json
    CE_LOG_LEVEL=WARNING
    CE_LOG_FILE=
"""
import sys
import logging
from pathlib import Path
from dotenv import load_dotenv

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent))

from app import config
from app.ui.cli import main as cli_main

# Read version
VERSION_FILE = Path(__file__).parent / "VERSION"
try:
    VERSION = VERSION_FILE.read_text().strip()
except Exception:
    VERSION = "unknown"


def setup_logging():
    """Log to stderr so stdout stays machine-readable"""
    handlers = [logging.StreamHandler(sys.stderr)]
    if config.LOG_FILE:
        handlers.append(logging.FileHandler(config.LOG_FILE))
    logging.basicConfig(
        level=getattr(logging, config.LOG_LEVEL, logging.WARNING),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers
    )


def main():
    """Main application entry point"""
    load_dotenv()
    setup_logging()

    logger = logging.getLogger(__name__)
    logger.info(f"🔢 stabring {VERSION}")
    logger.debug(f"Python: {sys.version}")

    return cli_main(sys.argv[1:])


if __name__ == '__main__':
    sys.exit(main())
