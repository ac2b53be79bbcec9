"""Estimators, diagnostics and transforms for heavy-tailed data."""

__version__ = '1.0.0'
