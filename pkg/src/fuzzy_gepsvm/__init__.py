"""Fuzzy generalized eigenvalue proximal SVM tuned by the Differential Search Algorithm."""

__version__ = "0.1.0"
