#!/usr/bin/env python3
"""
Entry point for the splitting-solver command line.
Example: python run.py solve --example 1 --m 32 --method tscsp --alpha 0.46
"""

import sys

from splitsolve.main import main

if __name__ == "__main__":
    sys.exit(main())
