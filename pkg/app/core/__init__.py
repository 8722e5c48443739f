"""Core module for the attribution bidding simulator."""
from app.core.config import settings

__all__ = ["settings"]
