"""
Main entry point for the Sato-Tate toolkit.
"""

import sys
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.sato_tate.cli import main  # noqa: E402


if __name__ == "__main__":
    sys.exit(main())
