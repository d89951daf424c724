from .rtree import RTree
from .store import Author, CurateAction, EntryStatus, GeoMemory, MemoryEntry

__all__ = ["RTree", "Author", "CurateAction", "EntryStatus", "GeoMemory", "MemoryEntry"]
