"""Scoring backends: text embeddings and image-text similarities.

The consistency metrics are computed against an abstract ``ScoringProvider``
so the whole evaluation suite can run offline. Three implementations ship
with the toolkit:

- ``MockProvider``: a strict fixture table mapping exact strings to vectors
  and exact (image locator, text) pairs to similarities; unknown keys raise
  ``ProviderContract``.
- ``ConstantProvider``: every text embeds to the same unit vector and every
  pair scores a fixed similarity; handy for identity-style tests.
- ``HttpProvider``: JSON-over-HTTP client for a provider service such as the
  bundled sidecar. Endpoints (all relative to the base URL):
  POST /embed_texts       {"texts": [str, ...]}
                          -> {"vectors": [[float, ...], ...], "dim": int}
  POST /score_image_text  {"pairs": [{"image": str, "text": str}, ...]}
                          -> {"scores": [float, ...]}        (each in [-1, 1])
  POST /capabilities      {} -> {"embedding_dim": int, "max_text_len": int,
                                 "supports_image_text": bool}

Validation of provider responses (counts, dimensions, similarity range)
lives in the module-level ``embed_texts`` / ``score_image_text`` functions;
metric code goes through those rather than calling providers directly.
"""

from __future__ import annotations

import abc
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np
import requests

from .errors import IOFailure, ProviderContract, ProviderUnavailable, SchemaError

DEFAULT_MAX_TEXT_LEN = 4096


@dataclass(frozen=True)
class ProviderCapabilities:
    embedding_dim: int
    max_text_len: int
    supports_image_text: bool


class ScoringProvider(abc.ABC):
    """Backend supplying text embeddings and image-text similarities."""

    @abc.abstractmethod
    def capabilities(self) -> ProviderCapabilities: ...

    @abc.abstractmethod
    def embed_texts(self, texts: Sequence[str]) -> list[np.ndarray]: ...

    @abc.abstractmethod
    def score_image_text(self, pairs: Sequence[tuple[str, str]]) -> list[float]: ...


class MockProvider(ScoringProvider):
    """Deterministic provider backed by an exact-match fixture table.

    Fixture file schema:
        {"text_vectors": {str: [float, ...]},
         "pair_scores": [{"image": str, "text": str, "score": float}],
         "max_text_len": int?}
    """

    def __init__(
        self,
        text_vectors: dict[str, Sequence[float]],
        pair_scores: dict[tuple[str, str], float] | None = None,
        max_text_len: int = DEFAULT_MAX_TEXT_LEN,
    ):
        self._vectors = {
            text: np.asarray(vec, dtype=float) for text, vec in text_vectors.items()
        }
        dims = {v.shape[0] for v in self._vectors.values()}
        if len(dims) > 1:
            raise ProviderContract(f"fixture vectors have mixed dimensions {dims}")
        self._dim = dims.pop() if dims else 8
        self._pairs = dict(pair_scores or {})
        self._max_text_len = max_text_len

    @classmethod
    def from_file(cls, path: str | Path) -> MockProvider:
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise IOFailure(f"cannot read fixture {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise SchemaError(f"fixture {path} is not valid JSON: {exc.msg}") from exc
        if not isinstance(data, dict):
            raise SchemaError(f"fixture {path} must be a JSON object")
        pairs = {
            (entry["image"], entry["text"]): float(entry["score"])
            for entry in data.get("pair_scores", [])
        }
        return cls(
            text_vectors=data.get("text_vectors", {}),
            pair_scores=pairs,
            max_text_len=int(data.get("max_text_len", DEFAULT_MAX_TEXT_LEN)),
        )

    def capabilities(self) -> ProviderCapabilities:
        return ProviderCapabilities(
            embedding_dim=self._dim,
            max_text_len=self._max_text_len,
            supports_image_text=True,
        )

    def embed_texts(self, texts: Sequence[str]) -> list[np.ndarray]:
        missing = [t for t in texts if t not in self._vectors]
        if missing:
            raise ProviderContract(f"no fixture vector for text {missing[0]!r}")
        return [self._vectors[t] for t in texts]

    def score_image_text(self, pairs: Sequence[tuple[str, str]]) -> list[float]:
        missing = [p for p in pairs if p not in self._pairs]
        if missing:
            raise ProviderContract(f"no fixture score for pair {missing[0]!r}")
        return [self._pairs[p] for p in pairs]


class ConstantProvider(ScoringProvider):
    """Embeds every text to the same unit vector; scores every pair alike."""

    def __init__(
        self,
        similarity: float = 1.0,
        embedding_dim: int = 8,
        max_text_len: int = DEFAULT_MAX_TEXT_LEN,
    ):
        self._similarity = similarity
        self._vector = np.zeros(embedding_dim)
        self._vector[0] = 1.0
        self._max_text_len = max_text_len

    def capabilities(self) -> ProviderCapabilities:
        return ProviderCapabilities(
            embedding_dim=self._vector.shape[0],
            max_text_len=self._max_text_len,
            supports_image_text=True,
        )

    def embed_texts(self, texts: Sequence[str]) -> list[np.ndarray]:
        return [self._vector] * len(texts)

    def score_image_text(self, pairs: Sequence[tuple[str, str]]) -> list[float]:
        return [self._similarity] * len(pairs)


class HttpProvider(ScoringProvider):
    """Client for a provider service speaking the JSON wire protocol."""

    def __init__(self, endpoint: str, timeout: float = 60.0):
        self._base = endpoint.rstrip("/")
        self._timeout = timeout
        self._session = requests.Session()
        self._capabilities: ProviderCapabilities | None = None

    def _post(self, op: str, body: dict) -> dict:
        try:
            response = self._session.post(
                f"{self._base}/{op}", json=body, timeout=self._timeout
            )
            response.raise_for_status()
            data = response.json()
        except requests.RequestException as exc:
            raise ProviderUnavailable(f"{op} failed against {self._base}: {exc}") from exc
        except ValueError as exc:
            raise ProviderContract(f"{op} returned non-JSON body") from exc
        if not isinstance(data, dict):
            raise ProviderContract(f"{op} returned {type(data).__name__}, not object")
        return data

    def capabilities(self) -> ProviderCapabilities:
        if self._capabilities is None:
            data = self._post("capabilities", {})
            try:
                self._capabilities = ProviderCapabilities(
                    embedding_dim=int(data["embedding_dim"]),
                    max_text_len=int(data["max_text_len"]),
                    supports_image_text=bool(data["supports_image_text"]),
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise ProviderContract(f"malformed capabilities: {data}") from exc
        return self._capabilities

    def embed_texts(self, texts: Sequence[str]) -> list[np.ndarray]:
        data = self._post("embed_texts", {"texts": list(texts)})
        vectors = data.get("vectors")
        if not isinstance(vectors, list):
            raise ProviderContract("embed_texts response is missing 'vectors'")
        return [np.asarray(vec, dtype=float) for vec in vectors]

    def score_image_text(self, pairs: Sequence[tuple[str, str]]) -> list[float]:
        body = {"pairs": [{"image": image, "text": text} for image, text in pairs]}
        data = self._post("score_image_text", body)
        scores = data.get("scores")
        if not isinstance(scores, list):
            raise ProviderContract("score_image_text response is missing 'scores'")
        return [float(s) for s in scores]


def embed_texts(provider: ScoringProvider, texts: Sequence[str]) -> list[np.ndarray]:
    """Batch-embed texts with response validation.

    Checks the one-vector-per-text contract, the advertised dimension, and
    finiteness; violations raise ``ProviderContract``.
    """
    texts = list(texts)
    if not texts:
        return []
    for text in texts:
        if not text.strip():
            raise ValueError("texts to embed must be nonempty after trimming")
    vectors = provider.embed_texts(texts)
    if len(vectors) != len(texts):
        raise ProviderContract(
            f"requested {len(texts)} embeddings, received {len(vectors)}"
        )
    dim = provider.capabilities().embedding_dim
    for vec in vectors:
        if vec.ndim != 1 or vec.shape[0] != dim:
            raise ProviderContract(
                f"embedding has shape {vec.shape}, expected ({dim},)"
            )
        if not np.all(np.isfinite(vec)):
            raise ProviderContract("embedding contains non-finite values")
        if not np.any(vec):
            raise ProviderContract("embedding is all-zero")
    return vectors


def score_image_text(
    provider: ScoringProvider, pairs: Sequence[tuple[str, str]]
) -> list[float]:
    """Batch-score (image, text) pairs with response validation."""
    pairs = list(pairs)
    if not pairs:
        return []
    if not provider.capabilities().supports_image_text:
        raise ProviderContract("provider does not support image-text scoring")
    scores = provider.score_image_text(pairs)
    if len(scores) != len(pairs):
        raise ProviderContract(f"requested {len(pairs)} scores, received {len(scores)}")
    for score in scores:
        if not math.isfinite(score) or not -1.0 <= score <= 1.0:
            raise ProviderContract(f"similarity {score} outside [-1, 1]")
    return scores
