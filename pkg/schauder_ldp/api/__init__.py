"""
Local-only FastAPI application.
"""
