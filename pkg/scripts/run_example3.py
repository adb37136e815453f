#!/usr/bin/env python3
"""Legendre base with step potential (truncated recursion); flags pass through."""

import sys

sys.path.insert(0, "src")

from fdjacobi.cli import main

if __name__ == "__main__":
    sys.exit(main(["preset", "example3", *sys.argv[1:]]))
