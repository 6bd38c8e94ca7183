"""Finite-scale workbench for first-order definability in module categories."""

import sys

# Table-driven sentences are long right-nested conjunctions.
if sys.getrecursionlimit() < 20000:
    sys.setrecursionlimit(20000)

__version__ = "0.1.0"
