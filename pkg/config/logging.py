"""
Logging configuration for jetnormals
"""
import logging
import os
from logging.handlers import RotatingFileHandler

from config.settings import LoggingConfig

ROOT_LOGGER_NAMES = ('app', 'core', 'geometry', 'synthetic', 'fitting', 'network',
                     'training', 'evaluation', 'storage', 'config', 'utils')


def setup_logging(config: LoggingConfig = None, verbose: bool = False) -> logging.Logger:
    """Configure package logging: console always, rotating file when configured"""
    if not config:
        config = LoggingConfig()

    log_level = logging.DEBUG if verbose else getattr(logging, config.level.upper(), logging.INFO)
    handlers = []

    console_handler = logging.StreamHandler()
    console_handler.setFormatter(logging.Formatter(
        '%(asctime)s %(levelname)s: %(message)s'
    ))
    console_handler.setLevel(log_level)
    handlers.append(console_handler)

    if config.file:
        # Create logs directory if it doesn't exist
        log_dir = os.path.dirname(config.file)
        if log_dir and not os.path.exists(log_dir):
            os.makedirs(log_dir)

        file_handler = RotatingFileHandler(
            config.file,
            maxBytes=config.max_bytes,
            backupCount=config.backup_count
        )
        file_handler.setFormatter(logging.Formatter(
            '%(asctime)s %(levelname)s: %(message)s [in %(pathname)s:%(lineno)d]'
        ))
        file_handler.setLevel(log_level)
        handlers.append(file_handler)

    for name in ROOT_LOGGER_NAMES:
        logger = logging.getLogger(name)
        for handler in list(logger.handlers):
            logger.removeHandler(handler)
        for handler in handlers:
            logger.addHandler(handler)
        logger.setLevel(log_level)
        logger.propagate = False

    app_logger = logging.getLogger('app')
    app_logger.debug(f'jetnormals configured with log level: {logging.getLevelName(log_level)}')
    if config.file:
        app_logger.debug(f'Logs will be written to: {config.file}')
    return app_logger
