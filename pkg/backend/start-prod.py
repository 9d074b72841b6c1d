#!/usr/bin/env python3
"""
Germ Cohomology Engine - Production Startup Script
==================================================

Runs the API under Gunicorn with Uvicorn workers (see gunicorn.conf.py).
"""

import subprocess
import sys
from pathlib import Path


def main():
    if not Path("app").exists():
        print("Please run this script from the backend directory")
        sys.exit(1)

    from app.config import get_settings

    settings = get_settings()
    print(f"Germ Cohomology Engine API on {settings.api_host}:{settings.port}")
    print(f"checked mode: {settings.checked}, engine workers: {settings.workers}, order: {settings.default_order}")

    cmd = ["gunicorn", "app.main:app", "--config", "gunicorn.conf.py"]
    try:
        subprocess.run(cmd, check=False)
    except KeyboardInterrupt:
        print("\nServer stopped")
    except FileNotFoundError:
        print("Gunicorn not found: pip install -r requirements-prod.txt")
        sys.exit(1)


if __name__ == "__main__":
    main()
