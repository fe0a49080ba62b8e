"""HTTP front end: request/response schemas and the FastAPI application."""

from .app import app, create_app

__all__ = ["app", "create_app"]
