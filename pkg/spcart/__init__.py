"""Sparse PCA via rotation and truncation, plus the power-iteration family."""

__version__ = "1.0.0"
