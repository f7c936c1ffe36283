"""Exact verification toolkit for double vector bundles, 2-term representations
up to homotopy and degree 2 graded Poisson brackets over polynomial charts."""

__version__ = "0.1.0"
