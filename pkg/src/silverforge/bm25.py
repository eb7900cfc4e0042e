"""Tokenizer, inverted index, and Okapi BM25 top-k retrieval.

The index holds the whole (desk-scale) sentence collection in memory and
is rebuilt per run; retrieval is exact and matches brute-force ranking.
"""

from __future__ import annotations

import math
import re
from bisect import insort
from collections import Counter
from typing import Iterable, Sequence

from .data import Sentence

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


def tokenize(text: str) -> list[str]:
    """Lowercase terms split on non-alphanumerics; no stemming, no stopwords."""
    return [m.group(0) for m in _TOKEN_RE.finditer(text.lower())]


class Bm25Index:
    """Inverted index with Okapi BM25 scoring.

    Uses the non-negative IDF variant ln(1 + (N - n_t + 0.5)/(n_t + 0.5)),
    which avoids negative contributions for terms occurring in more than
    half the documents. Saturation and length normalization follow the
    standard Okapi form with parameters k1 and b.
    """

    def __init__(self, k1: float = 1.5, b: float = 0.75):
        if k1 <= 0:
            raise ValueError("k1 must be > 0")
        if not 0.0 <= b <= 1.0:
            raise ValueError("b must be in [0, 1]")
        self.k1 = k1
        self.b = b
        self.postings: dict[str, list[tuple[int, int]]] = {}
        self.doc_lengths: dict[int, int] = {}

    @classmethod
    def build(
        cls, sentences: Iterable[Sentence], k1: float = 1.5, b: float = 0.75
    ) -> "Bm25Index":
        index = cls(k1=k1, b=b)
        for s in sentences:
            index.add(s.id, s.text)
        return index

    def add(self, doc_id: int, text: str) -> None:
        if doc_id in self.doc_lengths:
            raise ValueError(f"document {doc_id} already indexed")
        terms = tokenize(text)
        self.doc_lengths[doc_id] = len(terms)
        for term, tf in Counter(terms).items():
            insort(self.postings.setdefault(term, []), (doc_id, tf))

    @property
    def doc_count(self) -> int:
        return len(self.doc_lengths)

    @property
    def avg_doc_len(self) -> float:
        if not self.doc_lengths:
            return 0.0
        return sum(self.doc_lengths.values()) / len(self.doc_lengths)

    def _idf(self, term: str) -> float:
        n_t = len(self.postings.get(term, ()))
        if n_t == 0:
            return 0.0
        n = self.doc_count
        return math.log((n - n_t + 0.5) / (n_t + 0.5) + 1.0)

    def score(self, query: Sequence[str], doc_id: int) -> float:
        """BM25 score of one document against a term sequence.

        Repeated query terms contribute with multiplicity, so the score is
        invariant to query term order.
        """
        if doc_id not in self.doc_lengths:
            raise KeyError(f"unknown document id {doc_id}")
        dl = self.doc_lengths[doc_id]
        avgdl = self.avg_doc_len
        total = 0.0
        for term, qtf in sorted(Counter(query).items()):
            postings = self.postings.get(term)
            if not postings:
                continue
            tf = next((f for d, f in postings if d == doc_id), 0)
            if tf == 0:
                continue
            denom = tf + self.k1 * (1.0 - self.b + self.b * dl / avgdl)
            total += qtf * self._idf(term) * tf * (self.k1 + 1.0) / denom
        return total

    def _accumulate(self, query: Sequence[str]) -> dict[int, float]:
        avgdl = self.avg_doc_len
        scores: dict[int, float] = {}
        for term, qtf in sorted(Counter(query).items()):
            postings = self.postings.get(term)
            if not postings:
                continue
            idf = self._idf(term)
            for doc_id, tf in postings:
                dl = self.doc_lengths[doc_id]
                denom = tf + self.k1 * (1.0 - self.b + self.b * dl / avgdl)
                scores[doc_id] = scores.get(doc_id, 0.0) + qtf * idf * tf * (self.k1 + 1.0) / denom
        return scores

    def top_k(self, query: Sentence, k: int) -> list[tuple[int, float]]:
        """At most k (doc id, score) hits for the query sentence.

        The query sentence itself is excluded, only strictly positive
        scores are returned, and ordering is (score desc, doc id asc).
        """
        if k < 1:
            raise ValueError("k must be >= 1")
        scores = self._accumulate(tokenize(query.text))
        scores.pop(query.id, None)
        ranked = sorted(
            ((doc_id, s) for doc_id, s in scores.items() if s > 0.0),
            key=lambda item: (-item[1], item[0]),
        )
        return ranked[:k]
