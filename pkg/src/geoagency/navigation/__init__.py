from .context import (
    EMBEDDINGS_LAYER,
    EMBEDDINGS_T2_LAYER,
    ContextBundle,
    PatchRef,
    QueryKind,
    Strategy,
    build_context,
    sample_uncertainty,
    zoom_for_tile,
)

__all__ = [
    "EMBEDDINGS_LAYER", "EMBEDDINGS_T2_LAYER", "ContextBundle", "PatchRef",
    "QueryKind", "Strategy", "build_context", "sample_uncertainty", "zoom_for_tile",
]
