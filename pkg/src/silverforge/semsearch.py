"""Exact cosine-similarity top-k retrieval over sentence embeddings."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .data import Sentence
from .errors import DatasetError

CACHE_FORMAT = "silverforge-embeddings"
CACHE_VERSION = 1


def cosine(u: Sequence[float] | np.ndarray, v: Sequence[float] | np.ndarray) -> float:
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape or u.ndim != 1:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise ValueError("cosine undefined for zero-norm vector")
    return float(np.dot(u, v) / (nu * nv))


@dataclass
class EmbeddingMatrix:
    """One embedding row per sentence id, rows ordered by ascending id.

    Zero-norm rows are rejected at construction: they indicate a broken
    embedder, not a legitimate sentence representation.
    """

    ids: tuple[int, ...]
    vectors: np.ndarray
    _row_of: dict[int, int] = field(init=False, repr=False)
    _unit: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.vectors = np.asarray(self.vectors, dtype=np.float64)
        if self.vectors.ndim != 2 or self.vectors.shape[0] != len(self.ids):
            raise ValueError("vectors must be a 2-D array with one row per id")
        if len(set(self.ids)) != len(self.ids):
            raise ValueError("duplicate sentence ids")
        if list(self.ids) != sorted(self.ids):
            raise ValueError("rows must be ordered by ascending sentence id")
        if not np.all(np.isfinite(self.vectors)):
            raise ValueError("embeddings contain non-finite entries")
        norms = np.linalg.norm(self.vectors, axis=1)
        if np.any(norms == 0.0):
            bad = [self.ids[i] for i in np.nonzero(norms == 0.0)[0]]
            raise ValueError(f"zero-norm embedding for sentence ids {bad}")
        self._row_of = {sid: row for row, sid in enumerate(self.ids)}
        self._unit = self.vectors / norms[:, None]

    @property
    def dim(self) -> int:
        return int(self.vectors.shape[1])

    @classmethod
    def from_embedder(
        cls, sentences: Sequence[Sentence], embedder, batch_size: int = 64
    ) -> "EmbeddingMatrix":
        ordered = sorted(sentences, key=lambda s: s.id)
        rows = []
        for start in range(0, len(ordered), batch_size):
            batch = [s.text for s in ordered[start : start + batch_size]]
            rows.append(np.asarray(embedder.embed_batch(batch), dtype=np.float64))
        vectors = np.concatenate(rows, axis=0) if rows else np.zeros((0, 1))
        return cls(tuple(s.id for s in ordered), vectors)

    def top_k(self, query_id: int, k: int) -> list[tuple[int, float]]:
        """Exact top-k neighbours of a sentence, self excluded.

        Ordering is (similarity desc, id asc), which makes top_k(k + 1)
        extend top_k(k) as a prefix.
        """
        if k < 1:
            raise ValueError("k must be >= 1")
        row = self._row_of.get(query_id)
        if row is None:
            raise KeyError(f"unknown sentence id {query_id}")
        sims = self._unit @ self._unit[row]
        order = np.lexsort((np.asarray(self.ids), -sims))
        out: list[tuple[int, float]] = []
        for idx in order:
            sid = self.ids[int(idx)]
            if sid == query_id:
                continue
            out.append((sid, float(sims[int(idx)])))
            if len(out) == k:
                break
        return out


def save_embedding_cache(path: str, matrix: EmbeddingMatrix) -> None:
    """Persist embeddings as JSONL with a versioned header carrying dim."""
    with open(path, "w", encoding="utf-8") as fh:
        header = {
            "format": CACHE_FORMAT,
            "version": CACHE_VERSION,
            "dim": matrix.dim,
            "count": len(matrix.ids),
        }
        fh.write(json.dumps(header) + "\n")
        for sid, row in zip(matrix.ids, matrix.vectors):
            fh.write(json.dumps({"id": sid, "vector": row.tolist()}) + "\n")


def load_embedding_cache(path: str) -> EmbeddingMatrix:
    with open(path, encoding="utf-8") as fh:
        raw = fh.readline()
        try:
            header = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise DatasetError("invalid cache header", path=path, line=1) from exc
        if header.get("format") != CACHE_FORMAT:
            raise DatasetError("not an embedding cache file", path=path, line=1)
        if header.get("version") != CACHE_VERSION:
            raise DatasetError(
                f"unsupported cache version {header.get('version')!r}", path=path, line=1
            )
        dim = header.get("dim")
        records: list[tuple[int, list[float]]] = []
        for line_no, raw in enumerate(fh, start=2):
            if not raw.strip():
                continue
            record = json.loads(raw)
            vector = record.get("vector")
            if not isinstance(vector, list) or len(vector) != dim:
                raise DatasetError(
                    f"vector length {len(vector) if isinstance(vector, list) else '?'} "
                    f"does not match header dim {dim}",
                    path=path,
                    line=line_no,
                )
            records.append((int(record["id"]), vector))
    records.sort(key=lambda r: r[0])
    ids = tuple(r[0] for r in records)
    vectors = np.asarray([r[1] for r in records], dtype=np.float64)
    return EmbeddingMatrix(ids, vectors)
