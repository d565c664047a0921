"""FastAPI service layer: pydantic models and the application factory."""

from .app import app

__all__ = ["app"]
