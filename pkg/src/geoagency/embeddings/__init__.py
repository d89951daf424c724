from .index import (
    EmbeddingIndex,
    cosine_similarity,
    diversity_sample,
    load_embeddings,
    save_embeddings,
)
from .providers import (
    DEFAULT_DIM,
    EmbeddingProvider,
    SyntheticProvider,
    cell_id,
    cell_index,
    embedding_band_names,
)

__all__ = [
    "EmbeddingIndex", "cosine_similarity", "diversity_sample",
    "load_embeddings", "save_embeddings",
    "DEFAULT_DIM", "EmbeddingProvider", "SyntheticProvider",
    "cell_id", "cell_index", "embedding_band_names",
]
