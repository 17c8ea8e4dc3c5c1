from config.settings import get_config
from utils.logging import setup_logging, get_logger
from fastmcp import FastMCP


# Initialize configuration and logging
config = get_config()
setup_logging(config.logging, component="veil-mcp")

logger = get_logger(__name__)
logger.info(
    "Starting integrability MCP server - environment: %s, precision: %d bits",
    config.environment,
    config.precision.bits,
)


mcp = FastMCP("veil-integrability")
