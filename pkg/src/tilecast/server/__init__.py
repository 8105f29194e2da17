"""Relay server: session hub, HTTP front, and recording storage."""

from .config import ServerConfig
from .hub import SessionHub
from .http import RelayServer

__all__ = ["RelayServer", "ServerConfig", "SessionHub"]
