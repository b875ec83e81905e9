#!/usr/bin/env python3
"""CLI entry point for dladmm."""

from dladmm.cli.main import main

if __name__ == "__main__":
    main()
