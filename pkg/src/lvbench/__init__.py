"""Evaluation engine for long-form text-to-video generation."""

__version__ = "0.1.0"
