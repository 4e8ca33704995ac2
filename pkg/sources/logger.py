import os
import logging

class Logger:
    """
    File logger used by every component of the library.
    One log file per component, stored in .logs/ (or $VERONESE_LOG_DIR).
    """
    def __init__(self, log_filename: str):
        self.folder = os.getenv("VERONESE_LOG_DIR", ".logs")
        self.enabled = self.create_folder(self.folder)
        self.log_path = os.path.join(self.folder, log_filename)
        self.logger = None
        self.last_log_msg = ""
        if self.enabled:
            self.create_logging(log_filename)

    def create_logging(self, log_filename: str) -> None:
        self.logger = logging.getLogger(f"veronese.{log_filename}")
        self.logger.setLevel(logging.DEBUG)
        self.logger.propagate = False
        if any(getattr(h, "baseFilename", None) == os.path.abspath(self.log_path)
               for h in self.logger.handlers):
            return
        self.logger.handlers.clear()
        file_handler = logging.FileHandler(self.log_path)
        formatter = logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s')
        file_handler.setFormatter(formatter)
        self.logger.addHandler(file_handler)

    def create_folder(self, path: str) -> bool:
        """Create log dir"""
        try:
            if not os.path.exists(path):
                os.makedirs(path, exist_ok=True)
            return True
        except OSError:
            return False

    def log(self, message: str, level=logging.INFO) -> None:
        if self.last_log_msg == message:
            return
        if self.enabled:
            self.last_log_msg = message
            self.logger.log(level, message)

    def debug(self, message: str) -> None:
        self.log(message, level=logging.DEBUG)

    def info(self, message: str) -> None:
        self.log(message)

    def error(self, message: str) -> None:
        self.log(message, level=logging.ERROR)

    def warning(self, message: str) -> None:
        self.log(message, level=logging.WARNING)
