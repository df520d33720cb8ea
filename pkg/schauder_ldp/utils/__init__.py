"""
Shared utilities for path-aware file I/O.
"""
