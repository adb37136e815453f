#!/usr/bin/env python3
"""Negative-exponent weight with cubic potential; flags pass through."""

import sys

sys.path.insert(0, "src")

from fdjacobi.cli import main

if __name__ == "__main__":
    sys.exit(main(["preset", "example2", *sys.argv[1:]]))
