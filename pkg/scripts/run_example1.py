#!/usr/bin/env python3
"""Tilted-weight cubic potential preset; extra CLI flags pass through."""

import sys

sys.path.insert(0, "src")

from fdjacobi.cli import main

if __name__ == "__main__":
    sys.exit(main(["preset", "example1", *sys.argv[1:]]))
