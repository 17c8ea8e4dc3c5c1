from server import mcp
import tools.analysis  # noqa: F401
import tools.tables  # noqa: F401

if __name__ == "__main__":
    mcp.run()
