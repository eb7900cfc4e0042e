"""Pair scorers and sentence embedders.

Two interfaces bind the toolkit to models: a pair scorer maps sentence
pairs to scores in [0, 1] (the cross-encoder role) and a sentence embedder
maps sentences to fixed-dimension vectors (the bi-encoder role). Both are
implemented here twice: a deterministic in-process synthetic oracle for
desk-scale experiments, and an HTTP client for a remote model service.

Every scorer in this package is symmetric, score(a, b) == score(b, a),
since all supported tasks have symmetric similarity relations.
"""

from __future__ import annotations

import hashlib
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Protocol, Sequence, runtime_checkable

import numpy as np
import requests

from .bm25 import tokenize
from .data import normalize_text
from .errors import ScorerProtocolError

TextPair = tuple[str, str]


@runtime_checkable
class PairScorer(Protocol):
    def score_batch(self, pairs: Sequence[TextPair]) -> list[float]: ...


@runtime_checkable
class SentenceEmbedder(Protocol):
    def embed_batch(self, texts: Sequence[str]) -> np.ndarray: ...


def stable_seed(*parts: object) -> int:
    """Process-stable 64-bit seed derived from the given parts."""
    payload = "\x1f".join(str(p) for p in parts).encode("utf-8")
    return int.from_bytes(hashlib.blake2b(payload, digest_size=8).digest(), "big")


def token_unit_vector(token: str, dim: int, seed: int, salt: str = "latent") -> np.ndarray:
    """Deterministic pseudo-random unit vector for a token.

    Seeded hashing (not Python's randomized hash) keeps vectors stable
    across processes, so lexically overlapping sentences always receive
    correlated representations.
    """
    rng = np.random.default_rng(stable_seed(seed, salt, token))
    v = rng.standard_normal(dim)
    norm = np.linalg.norm(v)
    return v / norm


@dataclass
class SyntheticOracle:
    """Deterministic stand-in for a trained cross-encoder.

    Each sentence gets a latent vector: the token-frequency-weighted sum
    of seeded per-token unit vectors. The true similarity of a pair is the
    cosine of the latents rescaled to [0, 1] via (cos + 1) / 2; the oracle
    score adds Gaussian noise of scale ``noise`` and clamps to [0, 1].
    Lexical overlap therefore correlates with similarity, as in real data.
    """

    dim: int = 8
    seed: int = 0
    noise: float = 0.0
    _latents: dict[str, np.ndarray] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("latent dimension must be >= 1")
        if self.noise < 0:
            raise ValueError("noise level must be >= 0")

    def latent(self, text: str) -> np.ndarray:
        key = normalize_text(text)
        cached = self._latents.get(key)
        if cached is not None:
            return cached
        tokens = tokenize(key) or [""]
        v = np.zeros(self.dim)
        for token in tokens:
            v += token_unit_vector(token, self.dim, self.seed)
        self._latents[key] = v
        return v

    def true_similarity(self, a: str, b: str) -> float:
        u, v = self.latent(a), self.latent(b)
        nu, nv = np.linalg.norm(u), np.linalg.norm(v)
        if nu == 0.0 or nv == 0.0:
            return 0.5
        return (float(np.dot(u, v) / (nu * nv)) + 1.0) / 2.0

    def score_pair(self, a: str, b: str) -> float:
        s = self.true_similarity(a, b)
        if self.noise > 0.0:
            lo, hi = sorted((normalize_text(a), normalize_text(b)))
            rng = np.random.default_rng(stable_seed(self.seed, "noise", lo, hi))
            s += float(rng.normal(0.0, self.noise))
        return min(1.0, max(0.0, s))

    def score_batch(self, pairs: Sequence[TextPair]) -> list[float]:
        return [self.score_pair(a, b) for a, b in pairs]

    def embed_batch(self, texts: Sequence[str]) -> np.ndarray:
        return np.stack([self.latent(t) for t in texts])


_TRANSIENT_STATUS = {502, 503, 504}


class RemoteScorer:
    """HTTP client for the /score, /embed, /health model service protocol.

    Transient failures (connection errors, 5xx) are retried with
    exponential backoff; any batch that still fails aborts the whole call.
    Responses violating the protocol (wrong length, scores outside [0, 1],
    malformed JSON) raise ScorerProtocolError immediately.
    """

    def __init__(
        self,
        endpoint: str,
        *,
        batch_size: int = 32,
        timeout: float = 30.0,
        retries: int = 3,
        backoff: float = 0.25,
        parallelism: int = 1,
        session: requests.Session | None = None,
    ):
        if batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if parallelism < 1:
            raise ValueError("parallelism must be >= 1")
        self.endpoint = endpoint.rstrip("/")
        self.batch_size = batch_size
        self.timeout = timeout
        self.retries = retries
        self.backoff = backoff
        self.parallelism = parallelism
        self._session = session if session is not None else requests.Session()

    def _post(self, route: str, payload: dict) -> dict:
        last_exc: Exception | None = None
        for attempt in range(self.retries + 1):
            if attempt:
                time.sleep(self.backoff * 2 ** (attempt - 1))
            try:
                response = self._session.post(
                    f"{self.endpoint}{route}", json=payload, timeout=self.timeout
                )
            except requests.RequestException as exc:
                last_exc = exc
                continue
            if response.status_code in _TRANSIENT_STATUS:
                last_exc = ScorerProtocolError(
                    f"{route} returned transient status {response.status_code}"
                )
                continue
            if response.status_code != 200:
                raise ScorerProtocolError(
                    f"{route} returned status {response.status_code}: {response.text[:200]}"
                )
            try:
                return response.json()
            except ValueError as exc:
                raise ScorerProtocolError(f"{route} returned malformed JSON") from exc
        raise ScorerProtocolError(
            f"{route} failed after {self.retries + 1} attempts: {last_exc}"
        ) from last_exc

    def _score_chunk(self, chunk: Sequence[TextPair]) -> list[float]:
        body = self._post("/score", {"pairs": [[a, b] for a, b in chunk]})
        scores = body.get("scores") if isinstance(body, dict) else None
        if not isinstance(scores, list):
            raise ScorerProtocolError("/score response missing 'scores' list")
        if len(scores) != len(chunk):
            raise ScorerProtocolError(
                f"/score returned {len(scores)} scores for {len(chunk)} pairs"
            )
        out = []
        for value in scores:
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ScorerProtocolError(f"/score returned non-numeric value {value!r}")
            x = float(value)
            if not np.isfinite(x) or not 0.0 <= x <= 1.0:
                raise ScorerProtocolError(f"/score returned out-of-range value {x}")
            out.append(x)
        return out

    def _embed_chunk(self, chunk: Sequence[str]) -> list[list[float]]:
        body = self._post("/embed", {"sentences": list(chunk)})
        embeddings = body.get("embeddings") if isinstance(body, dict) else None
        if not isinstance(embeddings, list):
            raise ScorerProtocolError("/embed response missing 'embeddings' list")
        if len(embeddings) != len(chunk):
            raise ScorerProtocolError(
                f"/embed returned {len(embeddings)} vectors for {len(chunk)} sentences"
            )
        return embeddings

    def _map_chunks(self, worker, chunks: list) -> list:
        if self.parallelism == 1 or len(chunks) <= 1:
            return [worker(c) for c in chunks]
        with ThreadPoolExecutor(max_workers=self.parallelism) as pool:
            return list(pool.map(worker, chunks))

    def score_batch(self, pairs: Sequence[TextPair]) -> list[float]:
        chunks = [
            pairs[start : start + self.batch_size]
            for start in range(0, len(pairs), self.batch_size)
        ]
        out: list[float] = []
        for scores in self._map_chunks(self._score_chunk, chunks):
            out.extend(scores)
        return out

    def embed_batch(self, texts: Sequence[str]) -> np.ndarray:
        chunks = [
            texts[start : start + self.batch_size]
            for start in range(0, len(texts), self.batch_size)
        ]
        rows: list[list[float]] = []
        for vectors in self._map_chunks(self._embed_chunk, chunks):
            rows.extend(vectors)
        matrix = np.asarray(rows, dtype=np.float64)
        if matrix.ndim != 2:
            raise ScorerProtocolError("/embed returned ragged vectors")
        if not np.all(np.isfinite(matrix)):
            raise ScorerProtocolError("/embed returned non-finite entries")
        return matrix

    def health(self) -> dict:
        try:
            response = self._session.get(f"{self.endpoint}/health", timeout=self.timeout)
        except requests.RequestException as exc:
            raise ScorerProtocolError(f"/health unreachable: {exc}") from exc
        if response.status_code != 200:
            raise ScorerProtocolError(f"/health returned status {response.status_code}")
        return response.json()


def remote_score(
    endpoint: str, pairs: Sequence[TextPair], batch_size: int = 32, **kwargs
) -> list[float]:
    """Score pairs against a remote service; order follows the input."""
    return RemoteScorer(endpoint, batch_size=batch_size, **kwargs).score_batch(pairs)
