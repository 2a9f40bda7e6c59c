"""Model loading and batch encoding.

Any sentence-transformers model works: the identifier is configuration,
either a hub model id or a local directory. Vectors are L2-normalized
server-side (in float64, after the model's own dtype), so clients can
treat cosine as a plain dot product. The empty string maps to the zero
vector by convention; everything else goes through the model.
"""

from __future__ import annotations

import os

import numpy as np


class ModelLoadError(Exception):
    """The configured model could not be loaded."""


class SentenceEmbedder:
    def __init__(self, model_id: str, batch_size: int = 32):
        if batch_size < 1:
            raise ModelLoadError(f"batch size must be at least 1, got {batch_size}")
        looks_like_path = os.sep in model_id or model_id.startswith(".")
        if looks_like_path and not os.path.isdir(model_id):
            raise ModelLoadError(f"model directory not found: {model_id}")
        try:
            from sentence_transformers import SentenceTransformer

            self._model = SentenceTransformer(model_id, device="cpu")
        except Exception as exc:  # model formats fail in many shapes
            raise ModelLoadError(f"cannot load model {model_id!r}: {exc}") from exc
        self._model.eval()
        self.model_id = model_id
        self.batch_size = batch_size
        # Renamed in newer sentence-transformers releases.
        if hasattr(self._model, "get_embedding_dimension"):
            self.dim = int(self._model.get_embedding_dimension())
        else:
            self.dim = int(self._model.get_sentence_embedding_dimension())

    def encode(self, texts: list[str]) -> list[list[float]]:
        """One unit-norm vector per text, order preserved."""
        vectors = np.zeros((len(texts), self.dim), dtype=np.float64)
        nonempty = [i for i, text in enumerate(texts) if text != ""]
        if nonempty:
            raw = self._model.encode(
                [texts[i] for i in nonempty],
                batch_size=self.batch_size,
                convert_to_numpy=True,
                normalize_embeddings=True,
                show_progress_bar=False,
            )
            raw = np.asarray(raw, dtype=np.float64)
            norms = np.linalg.norm(raw, axis=1, keepdims=True)
            raw = raw / np.where(norms == 0.0, 1.0, norms)
            vectors[nonempty] = raw
        return vectors.tolist()
