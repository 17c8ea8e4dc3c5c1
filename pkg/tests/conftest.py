import logging
import os
import pytest
from unittest.mock import patch
from config.settings import AppConfig, ExecutionConfig, LoggingConfig, PrecisionConfig


@pytest.fixture
def mock_app_config():
    """Application configuration for testing."""
    return AppConfig(
        precision=PrecisionConfig(bits=128, max_refinement=4),
        execution=ExecutionConfig(jobs=1),
        logging=LoggingConfig(level="DEBUG", debug=False),
        environment="testing",
    )


@pytest.fixture
def mock_env_vars():
    """Mock environment variables for testing."""
    env_vars = {
        "VEIL_BITS": "128",
        "VEIL_MAX_REFINEMENT": "4",
        "VEIL_JOBS": "2",
        "ENVIRONMENT": "testing",
        "LOG_LEVEL": "DEBUG",
        "DEBUG": "false",
    }

    with patch.dict(os.environ, env_vars, clear=False):
        yield env_vars


@pytest.fixture(autouse=True)
def reset_global_config():
    """Reset global config before each test."""
    from config.settings import reset_config

    reset_config()
    yield
    reset_config()
    # cli.main binds a stderr handler to the capsys stream of the test that called it
    logging.root.handlers.clear()


@pytest.fixture
def ctx():
    """Numeric precision used by tests that touch the oracle."""
    from services.numeric_oracle import PrecisionContext

    return PrecisionContext(working_bits=128, max_refinement=4)


@pytest.fixture
def service(ctx):
    """Obstruction engine with the test precision."""
    from services.obstruction_engine import ObstructionService

    return ObstructionService(ctx)
