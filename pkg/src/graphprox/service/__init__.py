"""HTTP service wrapping the toolkit; see app for the endpoints."""
from .app import app

__all__ = ["app"]
