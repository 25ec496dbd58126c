from gridarena.service.platform import Platform, PlatformEvent
from gridarena.service.app import create_app

__all__ = ["Platform", "PlatformEvent", "create_app"]
