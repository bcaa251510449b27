"""Text embedding providers and vector math.

Two providers share one contract: a remote JSON-over-HTTP endpoint in the
shape of the common hosted embedding APIs, and a deterministic local
feature-hashing embedder so retrieval is testable offline. All vectors are
float32 and L2-normalized at embed time, which lets the index use plain dot
products as cosine.
"""

from __future__ import annotations

import re
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import httpx
import numpy as np

from .errors import DimensionMismatch, EmptyText, ProviderError
from .hashutil import hash64_text

__all__ = [
    "EmbeddingProviderSpec",
    "EmbeddingProvider",
    "LocalHashProvider",
    "RemoteEmbeddingProvider",
    "make_embedding_provider",
    "hash_embed",
    "normalize",
    "cosine",
]

_WORD_RE = re.compile(r"[^\W_]+(?:'[^\W_]+)?", re.UNICODE)


def normalize(vector: np.ndarray) -> np.ndarray:
    """L2-normalize to float32; the zero vector passes through unchanged."""
    v = np.asarray(vector, dtype=np.float64)
    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        return v.astype(np.float32)
    return (v / norm).astype(np.float32)


def hash_embed(text: str, dim: int) -> np.ndarray:
    """Deterministic feature-hashing embedding.

    Lowercases the text, extracts word unigrams, word bigrams and character
    trigrams, hashes each feature with a fixed 64-bit hash, and accumulates
    +-1 per occurrence: the bucket is the hash mod dim, the sign is hash
    bit 63. The result is L2-normalized. Empty text gives the zero vector.
    """
    if dim <= 0:
        raise ValueError(f"dim must be positive, got {dim}")
    counts = np.zeros(dim, dtype=np.float64)
    lowered = text.lower()
    words = _WORD_RE.findall(lowered)
    features = [f"w:{w}" for w in words]
    features += [f"b:{a} {b}" for a, b in zip(words, words[1:])]
    collapsed = " ".join(lowered.split())
    features += [f"c:{collapsed[i:i + 3]}" for i in range(len(collapsed) - 2)]
    for feature in features:
        h = hash64_text(feature)
        sign = -1.0 if (h >> 63) & 1 else 1.0
        counts[h % dim] += sign
    return normalize(counts)


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity clamped to [-1, 1]; 0 when either vector is zero."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"vector dims differ: {a.shape} vs {b.shape}")
    a64 = a.astype(np.float64)
    b64 = b.astype(np.float64)
    na = float(np.linalg.norm(a64))
    nb = float(np.linalg.norm(b64))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.clip(np.dot(a64, b64) / (na * nb), -1.0, 1.0))


@dataclass(frozen=True)
class EmbeddingProviderSpec:
    """Declarative provider description (what config files carry)."""

    kind: str  # "local_hash" | "remote"
    model_name: str
    dim: int
    endpoint: str = ""
    api_key_env: str = "VIDRAG_EMBED_API_KEY"
    batch_size: int = 64

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "model_name": self.model_name,
            "dim": self.dim,
            "endpoint": self.endpoint,
            "batch_size": self.batch_size,
        }


class EmbeddingProvider:
    """Shared contract: embed_batch returns one unit vector per input text."""

    spec: EmbeddingProviderSpec

    @property
    def dim(self) -> int:
        return self.spec.dim

    def embed_batch(self, texts: list[str]) -> list[np.ndarray]:
        self._check_texts(texts)
        batches = [
            texts[i:i + self.spec.batch_size]
            for i in range(0, len(texts), self.spec.batch_size)
        ]
        vectors: list[np.ndarray] = []
        for batch in self._run_batches(batches):
            vectors.extend(batch)
        return vectors

    def embed_one(self, text: str) -> np.ndarray:
        return self.embed_batch([text])[0]

    @staticmethod
    def _check_texts(texts: list[str]) -> None:
        for i, text in enumerate(texts):
            if not text.strip():
                raise EmptyText(i)

    def _run_batches(self, batches: list[list[str]]) -> list[list[np.ndarray]]:
        return [self._embed(batch) for batch in batches]

    def _embed(self, texts: list[str]) -> list[np.ndarray]:
        raise NotImplementedError


class LocalHashProvider(EmbeddingProvider):
    """Offline deterministic provider built on hash_embed."""

    def __init__(self, dim: int = 256, model_name: str = "local-hash-v1"):
        self.spec = EmbeddingProviderSpec(kind="local_hash", model_name=model_name, dim=dim)

    def _embed(self, texts: list[str]) -> list[np.ndarray]:
        return [hash_embed(text, self.spec.dim) for text in texts]


@dataclass
class RetryPolicy:
    attempts: int = 3
    backoff_s: float = 0.5  # doubles per retry
    retry_statuses: tuple[int, ...] = (429, 500, 502, 503, 504)


def request_with_retries(
    client: httpx.Client,
    url: str,
    payload: dict,
    headers: dict,
    policy: RetryPolicy,
    sleep=time.sleep,
) -> httpx.Response:
    """POST with retries on transport errors and retryable statuses."""
    last_error: Exception | None = None
    for attempt in range(policy.attempts):
        if attempt:
            sleep(policy.backoff_s * (2 ** (attempt - 1)))
        try:
            response = client.post(url, json=payload, headers=headers)
        except httpx.HTTPError as exc:
            last_error = exc
            continue
        if response.status_code in policy.retry_statuses:
            last_error = ProviderError(
                f"{url} returned {response.status_code}: {response.text[:200]}"
            )
            continue
        if response.status_code >= 400:
            raise ProviderError(
                f"{url} returned {response.status_code}: {response.text[:200]}"
            )
        return response
    raise ProviderError(
        f"request to {url} failed after {policy.attempts} attempts: {last_error}"
    )


class RemoteEmbeddingProvider(EmbeddingProvider):
    """JSON-over-HTTP embedding endpoint.

    Request {model, input: [texts]}, response {data: [{index, embedding}]}.
    Sub-batches run on a small thread pool; output order always matches
    input order.
    """

    def __init__(
        self,
        spec: EmbeddingProviderSpec,
        api_key: str,
        retry: RetryPolicy | None = None,
        concurrency: int = 4,
        transport: httpx.BaseTransport | None = None,
        sleep=time.sleep,
    ):
        if not spec.endpoint:
            raise ProviderError("remote embedding provider requires an endpoint")
        self.spec = spec
        self._headers = {"Authorization": f"Bearer {api_key}"} if api_key else {}
        self._retry = retry or RetryPolicy()
        self._concurrency = max(1, concurrency)
        self._client = httpx.Client(transport=transport, timeout=30.0)
        self._sleep = sleep

    def _run_batches(self, batches: list[list[str]]) -> list[list[np.ndarray]]:
        if len(batches) == 1:
            return [self._embed(batches[0])]
        with ThreadPoolExecutor(max_workers=self._concurrency) as pool:
            return list(pool.map(self._embed, batches))

    def _embed(self, texts: list[str]) -> list[np.ndarray]:
        response = request_with_retries(
            self._client,
            self.spec.endpoint,
            {"model": self.spec.model_name, "input": texts},
            self._headers,
            self._retry,
            sleep=self._sleep,
        )
        try:
            data = response.json()["data"]
            rows = sorted(data, key=lambda item: item["index"])
            vectors = [np.asarray(row["embedding"], dtype=np.float32) for row in rows]
        except (KeyError, TypeError, ValueError) as exc:
            raise ProviderError(f"malformed embedding response: {exc}") from exc
        if len(vectors) != len(texts):
            raise ProviderError(
                f"embedding response returned {len(vectors)} vectors for {len(texts)} texts"
            )
        for v in vectors:
            if v.shape != (self.spec.dim,):
                raise ProviderError(
                    f"embedding dim {v.shape} does not match provider dim {self.spec.dim}"
                )
        return [normalize(v) for v in vectors]


def make_embedding_provider(
    spec: EmbeddingProviderSpec, api_key: str = "", **kwargs
) -> EmbeddingProvider:
    if spec.kind == "local_hash":
        return LocalHashProvider(dim=spec.dim, model_name=spec.model_name)
    if spec.kind == "remote":
        return RemoteEmbeddingProvider(spec, api_key=api_key, **kwargs)
    raise ValueError(f"unknown embedding provider kind {spec.kind!r}")
