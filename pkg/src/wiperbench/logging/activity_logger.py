"""
Activity logging for WiperBench
Logs scenario runs, emulator halts, assertion outcomes and check summaries
"""
import logging
import json
import sys
from pathlib import Path
from datetime import datetime
from typing import Optional

import structlog


def setup_logging(log_dir: Optional[Path] = None,
                  log_level: str = "WARNING",
                  log_format: str = "text",
                  console_output: bool = True) -> logging.Logger:
    """
    Setup logging configuration

    Args:
        log_dir: Directory for log files (None disables the file log)
        log_level: Logging level (DEBUG, INFO, WARNING, ERROR)
        log_format: Log format ('json' or 'text')
        console_output: Also output to console (stderr, so stdout stays
            usable for disassembly and reports)

    Returns:
        Configured logger
    """
    level = getattr(logging, log_level.upper(), logging.WARNING)

    # Get root logger
    logger = logging.getLogger()
    logger.setLevel(level)

    # Remove existing handlers
    logger.handlers.clear()

    if log_format == "json":
        formatter = structlog.stdlib.ProcessorFormatter(
            foreign_pre_chain=[
                structlog.stdlib.add_log_level,
                structlog.stdlib.add_logger_name,
                structlog.stdlib.ExtraAdder(),
                structlog.processors.TimeStamper(fmt="iso"),
            ],
            processors=[
                structlog.stdlib.ProcessorFormatter.remove_processors_meta,
                structlog.processors.format_exc_info,
                structlog.processors.JSONRenderer(sort_keys=True),
            ],
        )
    else:
        formatter = logging.Formatter(
            '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
        )

    # File handler for main log
    if log_dir is not None:
        log_dir.mkdir(parents=True, exist_ok=True)
        log_file = log_dir / f"wiperbench_{datetime.now().strftime('%Y%m%d')}.log"
        file_handler = logging.FileHandler(log_file)
        file_handler.setLevel(level)
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    if console_output:
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setLevel(level)
        # Use text format for console for readability
        console_handler.setFormatter(logging.Formatter(
            '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S'
        ))
        logger.addHandler(console_handler)

    logger.debug("Logging initialized")
    return logger


class ActivityLogger:
    """
    High-level activity logger for bench events
    """

    def __init__(self, logger: Optional[logging.Logger] = None):
        """
        Initialize activity logger

        Args:
            logger: Logging instance (defaults to the harness logger)
        """
        self.logger = logger or logging.getLogger("wiperbench.harness")

    def log_run_start(self, scenario: str, horizon_ns: int, crystal_hz: int):
        """Log the start of a scenario run"""
        self.logger.info(
            f"Running scenario {scenario}: horizon {horizon_ns / 1e9:.3f}s "
            f"at {crystal_hz} Hz",
            extra={'scenario': scenario}
        )

    def log_halt(self, scenario: str, pc: int, cycle_count: int, reason: str):
        """Log an emulator halt"""
        self.logger.error(
            f"Emulator halted in {scenario} at PC=0x{pc:04X} "
            f"after {cycle_count} cycles: {reason}",
            extra={'scenario': scenario, 'pc': pc, 'cycle_count': cycle_count}
        )

    def log_assertion(self, scenario: str, kind: str, passed: bool, detail: str):
        """Log one assertion outcome"""
        level = logging.INFO if passed else logging.WARNING
        self.logger.log(
            level,
            f"{scenario}: {kind} {'PASS' if passed else 'FAIL'} ({detail})",
            extra={'scenario': scenario, 'assertion': kind}
        )

    def log_run_complete(self, scenario: str, passed: bool,
                         wall_clock_s: float, events: Optional[int] = None):
        """Log the end of a scenario run"""
        msg = f"Scenario {scenario} {'passed' if passed else 'failed'} in {wall_clock_s:.2f}s"
        if events is not None:
            msg += f", {events} events"
        self.logger.info(msg, extra={'scenario': scenario})

    def log_stats(self, stats: dict):
        """Log statistics"""
        self.logger.info(f"Statistics: {json.dumps(stats, sort_keys=True)}")
