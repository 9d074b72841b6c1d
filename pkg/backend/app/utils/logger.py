import logging
import sys
from typing import Optional, TextIO


def setup_logger(level: Optional[str] = None, stream: Optional[TextIO] = None):
    """Setup basic logging configuration"""
    if level is None:
        from app.config import get_settings

        level = get_settings().log_level
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=[
            logging.StreamHandler(stream or sys.stdout)
        ],
        force=True,
    )
    return logging.getLogger(__name__)
