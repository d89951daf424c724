from .app import MAX_TILE_SIDE, ServiceState, create_app
from .client import HttpSessionClient

__all__ = ["MAX_TILE_SIDE", "ServiceState", "create_app", "HttpSessionClient"]
