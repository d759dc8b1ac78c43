"""Verification toolkit for basic hypergeometric expansions and beta-type integrals."""

__version__ = "0.1.0"
