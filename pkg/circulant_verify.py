#!/usr/bin/env python3
"""
Circulant curvature verifier - entry point
"""

import sys
from pathlib import Path

# Add src directory to Python path
sys.path.insert(0, str(Path(__file__).parent))

from src.ui.cli import main


if __name__ == "__main__":
    sys.exit(main())
