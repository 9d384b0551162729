from .app import create_app, session_summary
from .config import ServiceConfig

__all__ = ["create_app", "ServiceConfig", "session_summary"]
