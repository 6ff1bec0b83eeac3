"""HTTP microservice exposing a multilingual NLI classifier."""

from .app import create_app

__all__ = ["create_app"]
