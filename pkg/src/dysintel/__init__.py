"""Intelligibility assessment and word-list selection for dysarthric speech."""

__version__ = "0.1.0"
