#!/usr/bin/env python3
"""
Germ Cohomology Engine - Development Startup Script
===================================================

Runs the API with auto-reload from the backend directory. Works on Windows,
Mac, and Linux.
"""

import subprocess
import sys
from pathlib import Path

BACKEND = Path(__file__).resolve().parent / "backend"


def main():
    print("Germ Cohomology Engine")
    print("=" * 30)

    try:
        import fastapi  # noqa: F401
        import numpy  # noqa: F401
        import sympy  # noqa: F401
        import uvicorn  # noqa: F401

        print("All required packages are installed")
    except ImportError as e:
        print(f"Missing package: {e}")
        print("Please install requirements: pip install -r requirements.txt")
        return

    print("\nAPI at http://localhost:8000 (docs at /docs)")
    print("Batch runs: cd backend && python -m app.cli --help")
    print("Press Ctrl+C to stop")
    print()

    try:
        subprocess.run(
            [sys.executable, "-m", "uvicorn", "app.main:app", "--reload", "--port", "8000"],
            cwd=BACKEND,
        )
    except KeyboardInterrupt:
        print("\nStopped")
    except Exception as e:
        print(f"Error launching the API: {e}")


if __name__ == "__main__":
    main()
