"""Model backends behind the scoring service.

A backend spec is either ``hash[:key=value,...]`` for the deterministic
token-hash model (no downloads, used in tests and offline setups) or any
other string, which is treated as a sentence-transformers model name.
"""

from __future__ import annotations

import hashlib
import re

import numpy as np

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


def _tokens(text: str) -> list[str]:
    return [m.group(0) for m in _TOKEN_RE.finditer(text.lower())] or [""]


def _seed_from(*parts) -> int:
    payload = "\x1f".join(str(p) for p in parts).encode("utf-8")
    return int.from_bytes(hashlib.blake2b(payload, digest_size=8).digest(), "big")


class HashBackend:
    """Deterministic stand-in model built from hashed token vectors.

    Sentences map to the sum of per-token unit vectors; pair scores are
    the cosine of the two sentence vectors rescaled to [0, 1]. The same
    object serves both the scoring and the embedding role.
    """

    def __init__(self, dim: int = 64, seed: int = 0):
        if dim < 1:
            raise ValueError("dim must be >= 1")
        self.dim = dim
        self.seed = seed
        self._cache: dict[str, np.ndarray] = {}

    def _vector(self, text: str) -> np.ndarray:
        key = text.strip()
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        v = np.zeros(self.dim)
        for token in _tokens(key):
            rng = np.random.default_rng(_seed_from(self.seed, "tok", token))
            raw = rng.standard_normal(self.dim)
            v += raw / np.linalg.norm(raw)
        self._cache[key] = v
        return v

    def score(self, pairs: list[tuple[str, str]]) -> list[float]:
        out = []
        for a, b in pairs:
            u, v = self._vector(a), self._vector(b)
            nu, nv = np.linalg.norm(u), np.linalg.norm(v)
            if nu == 0.0 or nv == 0.0:
                out.append(0.5)
                continue
            out.append((float(u @ v / (nu * nv)) + 1.0) / 2.0)
        return out

    def embed(self, texts: list[str]) -> list[list[float]]:
        return [self._vector(t).tolist() for t in texts]


def _parse_hash_spec(spec: str) -> HashBackend:
    options = {"dim": 64, "seed": 0}
    _, _, tail = spec.partition(":")
    if tail:
        for item in tail.split(","):
            key, _, value = item.partition("=")
            if key not in options:
                raise ValueError(f"unknown hash backend option {key!r}")
            options[key] = int(value)
    return HashBackend(dim=options["dim"], seed=options["seed"])


class TransformerPairScorer:
    """Cross-encoder scoring via sentence-transformers."""

    def __init__(self, model_name: str):
        from sentence_transformers import CrossEncoder

        self._model = CrossEncoder(model_name)

    def score(self, pairs: list[tuple[str, str]]) -> list[float]:
        raw = self._model.predict([list(p) for p in pairs])
        arr = np.asarray(raw, dtype=np.float64).reshape(len(pairs), -1)
        if arr.shape[1] > 1:
            # multi-class heads: probability mass of the last (positive) class
            exps = np.exp(arr - arr.max(axis=1, keepdims=True))
            arr = (exps / exps.sum(axis=1, keepdims=True))[:, -1:]
        scores = arr[:, 0]
        if scores.min() < 0.0 or scores.max() > 1.0:
            scores = 1.0 / (1.0 + np.exp(-scores))
        return [float(s) for s in scores]


class TransformerEmbedder:
    """Bi-encoder embedding via sentence-transformers."""

    def __init__(self, model_name: str):
        from sentence_transformers import SentenceTransformer

        self._model = SentenceTransformer(model_name)
        self.dim = int(self._model.get_sentence_embedding_dimension())

    def embed(self, texts: list[str]) -> list[list[float]]:
        vectors = self._model.encode(texts, convert_to_numpy=True)
        return [v.tolist() for v in np.asarray(vectors, dtype=np.float64)]


def load_pair_scorer(spec: str):
    if spec == "hash" or spec.startswith("hash:"):
        return _parse_hash_spec(spec)
    return TransformerPairScorer(spec)


def load_embedder(spec: str):
    if spec == "hash" or spec.startswith("hash:"):
        return _parse_hash_spec(spec)
    return TransformerEmbedder(spec)
