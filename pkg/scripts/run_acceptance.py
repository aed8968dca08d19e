"""Run the acceptance suite and print its per-criterion summary."""

import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent

if __name__ == "__main__":
    sys.exit(subprocess.call([sys.executable, "-m", "pytest", str(ROOT / "tests" / "test_acceptance.py"), "-q"]))
