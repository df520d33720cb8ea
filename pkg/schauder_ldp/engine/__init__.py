"""
Command engine: configuration, run log, runner and acceptance suite.
"""
