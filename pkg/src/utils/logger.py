"""
Logger utility for application-wide logging.
"""
import atexit
import glob
import logging
import os
import re
from datetime import datetime, timedelta
from typing import Optional

LOGGER_NAME = 'aris_sim'
_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


class ConditionalFileHandler(logging.Handler):
    """
    A handler that only writes to a file if messages were logged.
    """

    def __init__(self, filename, level=logging.NOTSET):
        super().__init__(level)
        self.filename = filename
        self.buffer = []
        self.formatter = logging.Formatter(_FORMAT)

    def emit(self, record):
        self.buffer.append(record)

    def flush(self):
        if self.buffer:
            try:
                with open(self.filename, 'a', encoding='utf-8') as f:
                    for record in self.buffer:
                        f.write(self.formatter.format(record) + '\n')
                self.buffer = []
            except Exception:
                self.handleError(None)


class Logger:
    """
    Process-wide logger with a console handler and an optional buffered run log.

    No file is touched until configure() is given a log directory, so library
    use and tests stay side-effect free.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super(Logger, cls).__new__(cls)
            cls._instance._initialized = False
        return cls._instance

    def __init__(self):
        if self._initialized:
            return

        self.logger = logging.getLogger(LOGGER_NAME)
        self.logger.setLevel(logging.WARNING)
        self.logger.propagate = False
        self._initialized = True
        self.retention_days = 3
        self.log_dir: Optional[str] = None
        self.file_handler: Optional[ConditionalFileHandler] = None

        console_handler = logging.StreamHandler()
        console_handler.setLevel(logging.WARNING)
        console_handler.setFormatter(logging.Formatter(_FORMAT))
        self.logger.addHandler(console_handler)

        atexit.register(self.flush_logs)

    def configure(self, log_level: str, retention_days: Optional[int] = None, log_dir: Optional[str] = None):
        """
        Configure the level, log retention and (optionally) the run-log directory.

        Args:
            log_level: DEBUG, INFO, WARNING, ERROR or CRITICAL
            retention_days: Number of days to keep run logs
            log_dir: Directory for run logs; None keeps logging console-only
        """
        level = getattr(logging, log_level.upper(), logging.INFO)
        self.logger.setLevel(level)

        if retention_days is not None:
            self.retention_days = retention_days

        if log_dir and self.file_handler is None:
            os.makedirs(log_dir, exist_ok=True)
            self.log_dir = log_dir
            log_filename = os.path.join(log_dir, f"{LOGGER_NAME}_{datetime.now().strftime('%Y%m%d_%H%M%S')}.log")
            self.file_handler = ConditionalFileHandler(log_filename)
            self.logger.addHandler(self.file_handler)
            self.cleanup_old_logs()

        for handler in self.logger.handlers:
            handler.setLevel(level)

    def debug(self, message: str):
        self.logger.debug(message)

    def info(self, message: str):
        self.logger.info(message)

    def warning(self, message: str):
        self.logger.warning(message)

    def error(self, message: str):
        self.logger.error(message)

    def critical(self, message: str):
        self.logger.critical(message)

    def important(self, message: str):
        """
        Log an INFO message that is emitted regardless of the configured level.

        Args:
            message: The message to log
        """
        current_level = self.logger.level
        current_handler_levels = {}

        try:
            self.logger.setLevel(logging.INFO)
            for handler in self.logger.handlers:
                current_handler_levels[handler] = handler.level
                handler.setLevel(logging.INFO)
            self.logger.info(message)
        finally:
            self.logger.setLevel(current_level)
            for handler, level in current_handler_levels.items():
                handler.setLevel(level)

    def cleanup_old_logs(self):
        """
        Delete run logs older than the retention period.
        """
        if not self.log_dir:
            return
        try:
            cutoff_date = datetime.now() - timedelta(days=self.retention_days)
            for log_file in glob.glob(os.path.join(self.log_dir, f'{LOGGER_NAME}_*.log')):
                match = re.search(rf'{LOGGER_NAME}_(\d{{8}})_', log_file)
                if not match:
                    continue
                try:
                    file_date = datetime.strptime(match.group(1), '%Y%m%d')
                except ValueError:
                    continue
                if file_date < cutoff_date:
                    os.remove(log_file)
                    self.logger.debug(f"Deleted old log file: {log_file}")
        except OSError as e:
            self.logger.warning(f"Error cleaning up old logs: {e}")

    def flush_logs(self):
        if self.file_handler is not None:
            self.file_handler.flush()
