"""Expression vectorization and cosine similarity.

Two providers sit behind one call:

* builtin -- deterministic character-trigram hashing (64-bit FNV-1a
  into ``dim`` buckets, term-frequency, L2-normalized). Reproducible
  across runs and machines, works for Japanese without tokenization.
  Texts shorter than three characters hash as a single gram so only the
  empty text maps to the zero vector.
* external -- a sentence-embedding service speaking the wire protocol:
  HTTP POST ``{endpoint}/embed`` with body ``{"texts": [...]}`` and
  response ``{"dim": D, "vectors": [[...], ...]}``, or the same objects
  as newline-delimited JSON over a child process's stdin/stdout when
  the endpoint is a command line rather than an http(s) URL.
"""

from __future__ import annotations

import enum
import json
import math
import shlex
import subprocess
import urllib.error
import urllib.request
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConfigError,
    DimensionMismatchError,
    ProviderProtocolError,
    ProviderUnreachableError,
)

Vector = np.ndarray

DEFAULT_DIM = 768

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_GRAM_SIZE = 3

_HTTP_TIMEOUT_S = 60.0
_BATCH_CHUNK = 64


class ProviderKind(enum.Enum):
    BUILTIN = "builtin"
    EXTERNAL = "external"


def parse_provider_kind(raw: str) -> ProviderKind:
    # "builtin-deterministic" is accepted as an alias in config files.
    normalized = raw.strip().lower()
    if normalized in ("builtin", "builtin-deterministic"):
        return ProviderKind.BUILTIN
    if normalized == "external":
        return ProviderKind.EXTERNAL
    raise ConfigError(f"unknown provider kind {raw!r}; expected 'builtin' or 'external'")


@dataclass(frozen=True)
class EmbeddingProviderConfig:
    kind: ProviderKind = ProviderKind.BUILTIN
    endpoint: str | None = None
    dim: int = DEFAULT_DIM

    def __post_init__(self) -> None:
        if self.dim <= 0:
            raise ConfigError(f"embedding dim must be positive, got {self.dim}")
        if self.kind is ProviderKind.EXTERNAL and not self.endpoint:
            raise ConfigError("external provider requires an endpoint")
        if self.kind is ProviderKind.BUILTIN and self.endpoint:
            raise ConfigError("builtin provider takes no endpoint")


def _fnv1a64(data: bytes) -> int:
    h = _FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & 0xFFFFFFFFFFFFFFFF
    return h


def _char_grams(text: str) -> list[str]:
    if len(text) >= _GRAM_SIZE:
        return [text[i : i + _GRAM_SIZE] for i in range(len(text) - _GRAM_SIZE + 1)]
    return [text] if text else []


def embed_text_builtin(text: str, dim: int = DEFAULT_DIM) -> Vector:
    """Hash character trigrams into a unit-norm term-frequency vector."""
    vec = np.zeros(dim, dtype=np.float64)
    for gram in _char_grams(text):
        vec[_fnv1a64(gram.encode("utf-8")) % dim] += 1.0
    norm = math.sqrt(float(np.dot(vec, vec)))
    if norm > 0.0:
        vec /= norm
    return vec


def _validate_response_vectors(
    raw_vectors: object, expected_count: int, texts: list[str], dim: int
) -> list[Vector]:
    if not isinstance(raw_vectors, list) or len(raw_vectors) != expected_count:
        got = len(raw_vectors) if isinstance(raw_vectors, list) else type(raw_vectors).__name__
        raise ProviderProtocolError(
            f"provider returned {got} vectors for {expected_count} texts"
        )
    vectors: list[Vector] = []
    for text, raw in zip(texts, raw_vectors):
        vec = np.asarray(raw, dtype=np.float64)
        if vec.ndim != 1 or vec.shape[0] != dim:
            raise DimensionMismatchError(
                f"provider vector has dimension {vec.shape}, expected ({dim},)"
            )
        if not np.all(np.isfinite(vec)):
            raise ProviderProtocolError("provider vector contains non-finite components")
        norm = float(np.linalg.norm(vec))
        if abs(norm - 1.0) > 1e-6 and not (norm == 0.0 and text == ""):
            raise ProviderProtocolError(
                f"provider vector not L2-normalized (norm={norm!r}) for non-empty text"
            )
        vectors.append(vec)
    return vectors


def _parse_response(body: bytes | str, texts: list[str], dim: int) -> list[Vector]:
    try:
        payload = json.loads(body)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ProviderProtocolError(f"provider response is not valid JSON: {exc}") from None
    if not isinstance(payload, dict) or "vectors" not in payload:
        raise ProviderProtocolError("provider response missing 'vectors' field")
    response_dim = payload.get("dim")
    if response_dim != dim:
        raise DimensionMismatchError(
            f"provider reports dim={response_dim!r}, configured dim={dim}"
        )
    return _validate_response_vectors(payload["vectors"], len(texts), texts, dim)


def _embed_http(texts: list[str], endpoint: str, dim: int) -> list[Vector]:
    url = endpoint.rstrip("/")
    if not url.endswith("/embed"):
        url += "/embed"
    request = urllib.request.Request(
        url,
        data=json.dumps({"texts": texts}).encode("utf-8"),
        headers={"Content-Type": "application/json"},
        method="POST",
    )
    try:
        with urllib.request.urlopen(request, timeout=_HTTP_TIMEOUT_S) as response:
            if response.status != 200:
                raise ProviderProtocolError(f"provider returned HTTP {response.status}")
            body = response.read()
    except urllib.error.HTTPError as exc:
        raise ProviderProtocolError(f"provider returned HTTP {exc.code}") from None
    except (urllib.error.URLError, ConnectionError, TimeoutError, OSError) as exc:
        raise ProviderUnreachableError(f"cannot reach provider at {url}: {exc}") from None
    return _parse_response(body, texts, dim)


def _embed_subprocess(chunks: list[list[str]], command: str, dim: int) -> list[Vector]:
    """One request object per line on stdin, one response object per line back."""
    try:
        proc = subprocess.Popen(
            shlex.split(command),
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            text=True,
            encoding="utf-8",
        )
    except OSError as exc:
        raise ProviderUnreachableError(f"cannot start provider {command!r}: {exc}") from None
    vectors: list[Vector] = []
    try:
        assert proc.stdin is not None and proc.stdout is not None
        for chunk in chunks:
            try:
                proc.stdin.write(json.dumps({"texts": chunk}) + "\n")
                proc.stdin.flush()
                line = proc.stdout.readline()
            except (BrokenPipeError, OSError) as exc:
                raise ProviderUnreachableError(f"provider {command!r} died: {exc}") from None
            if not line:
                raise ProviderProtocolError(f"provider {command!r} produced no response line")
            vectors.extend(_parse_response(line, chunk, dim))
    finally:
        try:
            proc.stdin.close()  # type: ignore[union-attr]
        except OSError:
            pass
        try:
            proc.wait(timeout=30)
        except subprocess.TimeoutExpired:
            proc.kill()
    return vectors


def embed_batch(texts: list[str], config: EmbeddingProviderConfig) -> list[Vector]:
    """Embed texts in order; duplicates are computed once and shared."""
    unique: dict[str, int] = {}
    for text in texts:
        if text not in unique:
            unique[text] = len(unique)
    unique_texts = list(unique)

    if config.kind is ProviderKind.BUILTIN:
        unique_vectors = [embed_text_builtin(t, config.dim) for t in unique_texts]
    else:
        assert config.endpoint is not None
        chunks = [
            unique_texts[i : i + _BATCH_CHUNK] for i in range(0, len(unique_texts), _BATCH_CHUNK)
        ]
        if config.endpoint.startswith(("http://", "https://")):
            unique_vectors = []
            for chunk in chunks:
                unique_vectors.extend(_embed_http(chunk, config.endpoint, config.dim))
        else:
            unique_vectors = _embed_subprocess(chunks, config.endpoint, config.dim)

    return [unique_vectors[unique[t]] for t in texts]


def cosine(a: Vector, b: Vector) -> float:
    """Cosine similarity, clamped to [-1, 1]; 0.0 if either norm is zero."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"cosine of shapes {a.shape} vs {b.shape}")
    norm_a = math.sqrt(float(np.dot(a, a)))
    norm_b = math.sqrt(float(np.dot(b, b)))
    if norm_a == 0.0 or norm_b == 0.0:
        return 0.0
    value = float(np.dot(a, b)) / (norm_a * norm_b)
    return max(-1.0, min(1.0, value))
