"""
Configuration management for WiperBench
"""
import os
import logging
import yaml
from pathlib import Path
from typing import Any, Dict, Optional
from dotenv import load_dotenv


logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = "config/config.yaml"


class Config:
    """Configuration manager for WiperBench"""

    def __init__(self, config_path: Optional[str] = None):
        """
        Initialize configuration

        Args:
            config_path: Path to config.yaml file. If None, uses
                WIPERBENCH_CONFIG or the default location, and a missing
                file falls back to built-in defaults.
        """
        # Load environment variables (.env is optional)
        load_dotenv()

        explicit = config_path is not None
        if config_path is None:
            config_path = os.getenv("WIPERBENCH_CONFIG", DEFAULT_CONFIG_PATH)

        self.config_path = Path(config_path)
        self._explicit = explicit
        self._config: Dict[str, Any] = {}
        self._load_config()

    def _load_config(self):
        """Load configuration from YAML file"""
        if not self.config_path.exists():
            if self._explicit:
                raise FileNotFoundError(
                    f"Configuration file not found: {self.config_path}\n"
                    f"Copy config/config.yaml.example to start one"
                )
            logger.debug(f"No configuration at {self.config_path}, using defaults")
            self._config = {}
            return

        with open(self.config_path, 'r') as f:
            self._config = yaml.safe_load(f) or {}

    def get(self, key: str, default=None) -> Any:
        """
        Get configuration value using dot notation

        Args:
            key: Configuration key (e.g., 'traces.format')
            default: Default value if key not found

        Returns:
            Configuration value
        """
        keys = key.split('.')
        value = self._config

        for k in keys:
            if isinstance(value, dict):
                value = value.get(k)
                if value is None:
                    return default
            else:
                return default

        return value

    @property
    def fast_forward(self) -> bool:
        """Check if idle-loop fast-forward is enabled"""
        return bool(self.get('clock.fast_forward', True))

    @property
    def sensor_defaults(self) -> Dict[str, float]:
        """Get rain sensor parameter overrides"""
        return dict(self.get('sensor', {}) or {})

    @property
    def servo_defaults(self) -> Dict[str, float]:
        """Get servo parameter overrides"""
        return dict(self.get('servo', {}) or {})

    @property
    def trace_dir(self) -> Optional[Path]:
        """Get trace output directory (environment wins over config)"""
        env_dir = os.getenv('WIPERBENCH_TRACE_DIR')
        if env_dir:
            return Path(env_dir)
        configured = self.get('traces.dir')
        return Path(configured) if configured else None

    @property
    def trace_format(self) -> str:
        """Get trace export format"""
        return self.get('traces.format', 'csv')

    @property
    def check_workers(self) -> int:
        """Get worker count for the check command"""
        return int(self.get('check.workers', 1))

    @property
    def log_dir(self) -> Optional[Path]:
        """Get log directory path (None disables file logging)"""
        log_dir = self.get('logging.log_dir')
        return Path(log_dir) if log_dir else None

    @property
    def log_format(self) -> str:
        """Get log format"""
        return self.get('logging.format', 'text')

    @property
    def log_level(self) -> str:
        """Get log level"""
        # Check environment variable first, then config, then default
        env_level = os.getenv('LOG_LEVEL')
        if env_level:
            return env_level.upper()
        return self.get('logging.level', 'WARNING').upper()

    def reload(self):
        """Reload configuration from file"""
        self._load_config()
