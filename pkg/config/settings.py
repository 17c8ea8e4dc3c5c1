import os
from dataclasses import dataclass, field
from typing import Optional


@dataclass
class PrecisionConfig:
    """Working precision for the numeric oracle with validation."""

    bits: int = 256
    max_refinement: int = 8

    def __post_init__(self):
        """Validate configuration after initialization."""
        self._validate_bits()
        self._validate_refinement()

    def _validate_bits(self):
        """Validate the working precision."""
        if not isinstance(self.bits, int) or self.bits < 53:
            raise ValueError(f"Invalid precision: {self.bits}. Must be an integer of at least 53 bits")

    def _validate_refinement(self):
        """Validate the root refinement budget."""
        if self.max_refinement < 0:
            raise ValueError(f"Invalid max_refinement: {self.max_refinement}. Must be non-negative")


@dataclass
class ExecutionConfig:
    """Sweep execution settings."""

    jobs: int = 1

    def __post_init__(self):
        if self.jobs < 1:
            raise ValueError(f"Invalid jobs: {self.jobs}. Must be at least 1")


@dataclass
class LoggingConfig:
    """Logging configuration."""

    level: str = "INFO"
    debug: bool = False
    log_dir: str = "logs"

    def __post_init__(self):
        valid_levels = {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}
        if self.level.upper() not in valid_levels:
            raise ValueError(f"Invalid log level: {self.level}")
        self.level = self.level.upper()


@dataclass
class AppConfig:
    """Main application configuration."""

    precision: PrecisionConfig = field(default_factory=PrecisionConfig)
    execution: ExecutionConfig = field(default_factory=ExecutionConfig)
    logging: LoggingConfig = field(default_factory=LoggingConfig)
    environment: str = "production"

    def __post_init__(self):
        valid_environments = {"development", "testing", "production"}
        if self.environment.lower() not in valid_environments:
            raise ValueError(f"Invalid environment: {self.environment}")
        self.environment = self.environment.lower()


def _int_from_env(name: str, default: str) -> int:
    raw = os.environ.get(name, default)
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{name} must be an integer, got {raw!r}") from None


def load_config() -> AppConfig:
    """Load configuration from environment variables."""
    precision_config = PrecisionConfig(
        bits=_int_from_env("VEIL_BITS", "256"),
        max_refinement=_int_from_env("VEIL_MAX_REFINEMENT", "8"),
    )

    execution_config = ExecutionConfig(jobs=_int_from_env("VEIL_JOBS", "1"))

    logging_config = LoggingConfig(
        level=os.environ.get("LOG_LEVEL", "INFO"),
        debug=os.environ.get("DEBUG", "false").lower() in ("true", "1", "yes", "on"),
        log_dir=os.environ.get("LOG_DIR", "logs"),
    )

    return AppConfig(
        precision=precision_config,
        execution=execution_config,
        logging=logging_config,
        environment=os.environ.get("ENVIRONMENT", "production"),
    )


# Global configuration instance
_config: Optional[AppConfig] = None


def get_config() -> AppConfig:
    """Get or create singleton configuration instance."""
    global _config
    if _config is None:
        _config = load_config()
    return _config


def reset_config():
    """Reset the global configuration (mainly for testing)."""
    global _config
    _config = None
