"""
Entry point: ``python main.py <command> [options]``.
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent / "src"))

from bernoulli_bounds.cli import main

if __name__ == "__main__":
    main()
