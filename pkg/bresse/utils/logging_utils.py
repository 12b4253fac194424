# bresse/utils/logging_utils.py

import logging
import os
from datetime import datetime
from typing import Optional

def setup_logging(
    log_level: str = "INFO",
    log_file: Optional[str] = None,
    log_format: Optional[str] = None
) -> logging.Logger:
    """
    Set up logging configuration for the Bresse laboratory.

    Args:
        log_level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        log_file: Optional file path to write logs to
        log_format: Optional custom log format

    Returns:
        Configured logger instance
    """
    if log_format is None:
        log_format = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

    # Create logs directory if it doesn't exist
    if log_file:
        log_dir = os.path.dirname(log_file)
        if log_dir and not os.path.exists(log_dir):
            os.makedirs(log_dir, exist_ok=True)

    handlers = [logging.StreamHandler()]
    if log_file:
        handlers.append(logging.FileHandler(log_file))

    logging.basicConfig(
        level=getattr(logging, log_level.upper()),
        format=log_format,
        handlers=handlers,
        force=True
    )

    return logging.getLogger('bresse')

def get_bresse_logger(name: str = 'core') -> logging.Logger:
    """
    Get a logger instance for a laboratory component.

    Args:
        name: Component name (model, fem, spectral, ...)

    Returns:
        Logger instance
    """
    return logging.getLogger(f'bresse.{name}')

class BresseLogger:
    """
    Structured logger for runs, checks and timings.
    """

    def __init__(self, component_name: str):
        self.logger = get_bresse_logger(component_name)
        self.component_name = component_name

    def log_run_start(self, command: str, config_summary: dict = None):
        """Log the start of a subcommand."""
        message = f"Starting '{command}'"
        if config_summary:
            message += f" with {config_summary}"
        self.logger.info(message)

    def log_run_complete(self, command: str, outputs: list = None):
        """Log successful completion of a subcommand and the files it wrote."""
        message = f"'{command}' completed"
        if outputs:
            message += f": wrote {', '.join(outputs)}"
        self.logger.info(message)

    def log_check(self, name: str, passed: bool, value: float, limit: float = None):
        """Log the verdict of a numerical check."""
        message = f"check {name}: {'PASS' if passed else 'FAIL'} (value={value:.6g}"
        if limit is not None:
            message += f", limit={limit:.6g}"
        message += ")"
        if passed:
            self.logger.info(message)
        else:
            self.logger.warning(message)

    def log_error(self, operation: str, error: str):
        """Log general errors."""
        self.logger.error(f"Error in {operation}: {error}")

    def log_performance(self, operation: str, duration: float, details: dict = None):
        """Log performance metrics."""
        message = f"{operation} completed in {duration:.2f}s"
        if details:
            message += f" - {details}"
        self.logger.info(message)

def log_bresse_pipeline(
    operation: str,
    start_time: datetime,
    end_time: datetime,
    success: bool,
    details: dict = None
):
    """
    Log pipeline operations with timing and success metrics.

    Args:
        operation: Name of the operation
        start_time: Operation start time
        end_time: Operation end time
        success: Whether the operation was successful
        details: Additional details to log
    """
    duration = (end_time - start_time).total_seconds()
    logger = get_bresse_logger('pipeline')

    status = "SUCCESS" if success else "FAILED"
    message = f"{operation} - {status} - Duration: {duration:.2f}s"

    if details:
        message += f" - Details: {details}"

    if success:
        logger.info(message)
    else:
        logger.error(message)
