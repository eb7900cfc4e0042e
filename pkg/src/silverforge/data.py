"""Core domain types and dataset ingestion for sentence-pair tasks.

A dataset is a split-aware collection of labeled sentence pairs. Sentence
identity is the NFC-normalized, trimmed text; integer ids are assigned in
first-seen order at ingestion. Pairs are stored in canonical order
(smaller id first) because every task in scope has a symmetric similarity
relation.
"""

from __future__ import annotations

import json
import math
import unicodedata
from dataclasses import dataclass, field, replace
from typing import Iterable, Literal, Sequence

from .errors import DatasetError

Task = Literal["regression", "classification"]
Provenance = Literal["gold", "silver"]
Strategy = Literal["rs", "bm25", "ss", "bm25_ss", "kde"]

STRATEGIES: tuple[str, ...] = ("rs", "bm25", "ss", "bm25_ss", "kde")
SPLITS: tuple[str, ...] = ("train", "dev", "test")


def normalize_text(text: str) -> str:
    """NFC-normalize and trim a sentence; this defines sentence identity."""
    return unicodedata.normalize("NFC", text).strip()


@dataclass(frozen=True, order=True)
class Sentence:
    id: int
    text: str

    def __post_init__(self):
        if not self.text:
            raise ValueError("sentence text must be non-empty after trimming")


@dataclass(frozen=True)
class SentencePair:
    """An unordered sentence pair; use :func:`canonicalize` to order it."""

    a: Sentence
    b: Sentence

    def __post_init__(self):
        if self.a.id == self.b.id:
            raise ValueError(f"self-pair rejected (sentence id {self.a.id})")

    @property
    def key(self) -> tuple[int, int]:
        return (self.a.id, self.b.id)

    @property
    def text_key(self) -> tuple[str, str]:
        """Identity independent of the id space, for cross-file comparisons."""
        return tuple(sorted((self.a.text, self.b.text)))  # type: ignore[return-value]


def canonicalize(pair: SentencePair) -> SentencePair:
    """Return the pair ordered so that ``a.id < b.id``; idempotent."""
    if pair.a.id < pair.b.id:
        return pair
    return SentencePair(pair.b, pair.a)


@dataclass(frozen=True)
class LabeledPair:
    pair: SentencePair
    score: float
    provenance: Provenance = "gold"
    strategy: str | None = None

    def __post_init__(self):
        if not math.isfinite(self.score):
            raise ValueError(f"score must be finite, got {self.score!r}")
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"score out of range [0, 1]: {self.score!r}")


@dataclass(frozen=True)
class PairDataset:
    task: Task
    train: tuple[LabeledPair, ...] = ()
    dev: tuple[LabeledPair, ...] = ()
    test: tuple[LabeledPair, ...] = ()

    def split(self, name: str) -> tuple[LabeledPair, ...]:
        if name not in SPLITS:
            raise ValueError(f"unknown split {name!r}")
        return getattr(self, name)

    def with_train(self, train: Sequence[LabeledPair]) -> "PairDataset":
        return replace(self, train=tuple(train))


@dataclass(frozen=True)
class SamplingConfig:
    strategy: Strategy
    top_k: int = 5
    rs_pair_budget: int | None = None  # None: resolved to 20x gold-train size
    seed: int = 0
    include_gold_pairs: bool = False

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.top_k < 1:
            raise ValueError("top_k must be >= 1")
        if self.rs_pair_budget is not None and self.rs_pair_budget < 1:
            raise ValueError("rs_pair_budget must be >= 1")


class SentenceInterner:
    """Assigns stable ids to sentences in first-seen order.

    Two raw texts that agree after normalization map to the same Sentence.
    """

    def __init__(self):
        self._by_text: dict[str, Sentence] = {}

    def intern(self, raw_text: str) -> Sentence:
        text = normalize_text(raw_text)
        if not text:
            raise ValueError("sentence text is empty after trimming")
        found = self._by_text.get(text)
        if found is None:
            found = Sentence(len(self._by_text), text)
            self._by_text[text] = found
        return found

    def sentences(self) -> list[Sentence]:
        return sorted(self._by_text.values(), key=lambda s: s.id)

    def __len__(self) -> int:
        return len(self._by_text)


# --- pair codes ---------------------------------------------------------
#
# Canonical pairs over n sentences are indexed 0 .. n(n-1)/2 - 1 in
# lexicographic (i, j) order with i < j. The bijection lets samplers draw
# uniform pairs without materializing the universe.

def num_canonical_pairs(n: int) -> int:
    return n * (n - 1) // 2


def pair_code(i: int, j: int, n: int) -> int:
    """Rank of the canonical position pair (i, j), i < j < n."""
    if not 0 <= i < j < n:
        raise ValueError(f"invalid position pair ({i}, {j}) for n={n}")
    return i * (2 * n - i - 1) // 2 + (j - i - 1)


def pair_from_code(code: int, n: int) -> tuple[int, int]:
    """Inverse of :func:`pair_code`."""
    total = num_canonical_pairs(n)
    if not 0 <= code < total:
        raise ValueError(f"pair code {code} out of range for n={n}")
    # Largest i with i*(2n-i-1)/2 <= code; solve the quadratic, then nudge
    # to undo integer-sqrt truncation.
    i = int((2 * n - 1 - math.isqrt((2 * n - 1) ** 2 - 8 * code)) // 2)
    while i * (2 * n - i - 1) // 2 > code:
        i -= 1
    while (i + 1) * (2 * n - i - 2) // 2 <= code and i + 1 < n - 1:
        i += 1
    j = code - i * (2 * n - i - 1) // 2 + i + 1
    return i, j


def unique_sentences(
    dataset: PairDataset, splits: Sequence[str] = SPLITS
) -> list[Sentence]:
    """Distinct sentences across the chosen splits, ordered by id.

    Deduplication is by normalized text, which by construction coincides
    with id equality for sentences interned from the same corpus.
    """
    seen: dict[str, Sentence] = {}
    for name in splits:
        for lp in dataset.split(name):
            for s in (lp.pair.a, lp.pair.b):
                key = normalize_text(s.text)
                if key not in seen:
                    seen[key] = s
    return sorted(seen.values(), key=lambda s: s.id)


# --- file IO ------------------------------------------------------------

JSONL_FIELDS = ("sentence1", "sentence2", "label")


def _parse_jsonl_record(raw: str, path: str, line_no: int) -> dict:
    try:
        record = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise DatasetError(f"invalid JSON ({exc.msg})", path=path, line=line_no) from exc
    if not isinstance(record, dict):
        raise DatasetError("record is not a JSON object", path=path, line=line_no)
    return record


def _parse_score(value: object, path: str, line_no: int) -> float:
    try:
        score = float(value)  # type: ignore[arg-type]
    except (TypeError, ValueError) as exc:
        raise DatasetError(f"label {value!r} is not a number", path=path, line=line_no) from exc
    if not math.isfinite(score):
        raise DatasetError(f"label {score!r} is not finite", path=path, line=line_no)
    if not 0.0 <= score <= 1.0:
        raise DatasetError(f"label {score} outside [0, 1]", path=path, line=line_no)
    return score


def load_labeled_pairs(
    path: str,
    fmt: Literal["jsonl", "tsv"] = "jsonl",
    *,
    task: Task = "regression",
    interner: SentenceInterner | None = None,
    col_s1: int = 0,
    col_s2: int = 1,
    col_label: int = 2,
    default_provenance: Provenance = "gold",
) -> list[LabeledPair]:
    """Read one split's labeled pairs, canonicalized, rejecting duplicates.

    Out-of-range scores are rejected, never clamped. For classification
    tasks, gold labels must be exactly 0 or 1; silver records (marked by a
    ``provenance`` field) may carry continuous soft labels.
    """
    interner = interner if interner is not None else SentenceInterner()
    pairs: list[LabeledPair] = []
    seen: set[tuple[int, int]] = set()
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            if fmt == "jsonl":
                record = _parse_jsonl_record(raw, path, line_no)
                missing = [f for f in JSONL_FIELDS if f not in record]
                if missing:
                    raise DatasetError(f"missing fields {missing}", path=path, line=line_no)
                s1, s2, label = record["sentence1"], record["sentence2"], record["label"]
                provenance = record.get("provenance", default_provenance)
                strategy = record.get("strategy")
            elif fmt == "tsv":
                cols = raw.rstrip("\n").split("\t")
                needed = max(col_s1, col_s2, col_label)
                if len(cols) <= needed:
                    raise DatasetError(
                        f"expected at least {needed + 1} columns, got {len(cols)}",
                        path=path,
                        line=line_no,
                    )
                s1, s2, label = cols[col_s1], cols[col_s2], cols[col_label]
                provenance, strategy = default_provenance, None
            else:
                raise ValueError(f"unknown format {fmt!r}")

            if provenance not in ("gold", "silver"):
                raise DatasetError(
                    f"invalid provenance {provenance!r}", path=path, line=line_no
                )
            score = _parse_score(label, path, line_no)
            if task == "classification" and provenance == "gold" and score not in (0.0, 1.0):
                raise DatasetError(
                    f"classification gold label must be 0 or 1, got {score}",
                    path=path,
                    line=line_no,
                )
            try:
                pair = canonicalize(SentencePair(interner.intern(s1), interner.intern(s2)))
            except ValueError as exc:
                raise DatasetError(str(exc), path=path, line=line_no) from exc
            if pair.key in seen:
                raise DatasetError(
                    f"duplicate pair {pair.a.text!r} / {pair.b.text!r}",
                    path=path,
                    line=line_no,
                )
            seen.add(pair.key)
            pairs.append(LabeledPair(pair, score, provenance, strategy))
    return pairs


def load_dataset(
    path: str,
    fmt: Literal["jsonl", "tsv"] = "jsonl",
    task: Task = "regression",
    **kwargs,
) -> PairDataset:
    """Load a single file as the train split of a new dataset."""
    return PairDataset(task=task, train=tuple(load_labeled_pairs(path, fmt, task=task, **kwargs)))


def load_splits(
    task: Task,
    train: str | None = None,
    dev: str | None = None,
    test: str | None = None,
    fmt: Literal["jsonl", "tsv"] = "jsonl",
    **kwargs,
) -> PairDataset:
    """Assemble a dataset from per-split files sharing one id space.

    Enforces split hygiene: a pair may not appear in more than one split.
    """
    interner = SentenceInterner()
    loaded: dict[str, tuple[LabeledPair, ...]] = {}
    claimed: dict[tuple[int, int], str] = {}
    for name, p in (("train", train), ("dev", dev), ("test", test)):
        if p is None:
            loaded[name] = ()
            continue
        pairs = load_labeled_pairs(p, fmt, task=task, interner=interner, **kwargs)
        for lp in pairs:
            owner = claimed.get(lp.pair.key)
            if owner is not None:
                raise DatasetError(
                    f"pair {lp.pair.a.text!r} / {lp.pair.b.text!r} appears in "
                    f"both {owner!r} and {name!r} splits",
                    path=p,
                )
            claimed[lp.pair.key] = name
        loaded[name] = tuple(pairs)
    return PairDataset(task=task, train=loaded["train"], dev=loaded["dev"], test=loaded["test"])


def pair_record(lp: LabeledPair) -> dict:
    record: dict = {
        "sentence1": lp.pair.a.text,
        "sentence2": lp.pair.b.text,
        # Integral scores are written as JSON integers; this is the
        # canonical form, making save(load(x)) byte-stable.
        "label": int(lp.score) if lp.score.is_integer() else lp.score,
    }
    if lp.provenance != "gold":
        record["provenance"] = lp.provenance
        if lp.strategy is not None:
            record["strategy"] = lp.strategy
    return record


def dump_labeled_pairs(pairs: Iterable[LabeledPair]) -> str:
    return "".join(json.dumps(pair_record(lp), ensure_ascii=False) + "\n" for lp in pairs)


def save_labeled_pairs(path: str, pairs: Iterable[LabeledPair]) -> None:
    """Write one split as JSONL with a fixed field order."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dump_labeled_pairs(pairs))


def save_candidate_pairs(path: str, pairs: Iterable[SentencePair]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for pair in pairs:
            fh.write(
                json.dumps(
                    {"sentence1": pair.a.text, "sentence2": pair.b.text},
                    ensure_ascii=False,
                )
                + "\n"
            )


def load_candidate_pairs(
    path: str, interner: SentenceInterner | None = None
) -> list[SentencePair]:
    """Read unlabeled candidate pairs, canonicalized and deduplicated."""
    interner = interner if interner is not None else SentenceInterner()
    out: list[SentencePair] = []
    seen: set[tuple[int, int]] = set()
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            record = _parse_jsonl_record(raw, path, line_no)
            for f in ("sentence1", "sentence2"):
                if f not in record:
                    raise DatasetError(f"missing field {f!r}", path=path, line=line_no)
            try:
                pair = canonicalize(
                    SentencePair(
                        interner.intern(record["sentence1"]),
                        interner.intern(record["sentence2"]),
                    )
                )
            except ValueError as exc:
                raise DatasetError(str(exc), path=path, line=line_no) from exc
            if pair.key not in seen:
                seen.add(pair.key)
                out.append(pair)
    return out
