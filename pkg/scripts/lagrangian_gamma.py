"""
Lagrangian-Gamma launcher
Runs the command line interface from a source checkout without installing.

Usage:
    python scripts/lagrangian_gamma.py degree --n 5
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from cli.main import run  # noqa: E402

if __name__ == "__main__":
    run()
