# utils/logging_config.py

import logging

LOG_FORMAT = '%(asctime)s [%(levelname)s] %(message)s'


def configure_logging(log_file=None, level=logging.INFO):
    """
    Configure the root logger for a CLI run.

    :param log_file: Optional path of a log file written next to the console output.
    :param level: Logging level for every handler.
    """
    handlers = [logging.StreamHandler()]
    if log_file:
        handlers.append(logging.FileHandler(log_file))
    logging.basicConfig(level=level, format=LOG_FORMAT, handlers=handlers, force=True)
    logging.debug(f"Logging configured (level={logging.getLevelName(level)}, file={log_file})")
