"""Embedding interchange file: JSON-Lines, one record per fragment.

Record schema:
{"fragment_key": str, "description": str, "tokens": [str], "sections": [str],
 "embeddings": [[float,...],...], "d_text": int, "encoder": str}

Floats survive the round trip bit-exactly (json repr of IEEE doubles).
"""

from __future__ import annotations

import hashlib
import json
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class EmbeddingStoreError(Exception):
    pass


class FormatError(EmbeddingStoreError):
    pass


class DimMismatchError(EmbeddingStoreError):
    pass


_REQUIRED = ("fragment_key", "description", "tokens", "sections", "embeddings",
             "d_text", "encoder")


@dataclass
class EmbeddingRecord:
    fragment_key: str
    description: str
    tokens: list[str]
    sections: list[str]
    embeddings: np.ndarray  # [n_tokens, d_text]
    encoder: str

    @property
    def d_text(self) -> int:
        return self.embeddings.shape[1]


class EmbeddingStore:
    def __init__(self, records: dict[str, EmbeddingRecord] | None = None,
                 content_hash: str = ""):
        self.records: dict[str, EmbeddingRecord] = records or {}
        self.content_hash = content_hash

    def __len__(self) -> int:
        return len(self.records)

    def __contains__(self, key: str) -> bool:
        return key in self.records

    def get(self, key: str) -> EmbeddingRecord | None:
        return self.records.get(key)

    @property
    def d_text(self) -> int | None:
        for record in self.records.values():
            return record.d_text
        return None


def _parse_record(obj: dict, line_no: int) -> EmbeddingRecord:
    for key in _REQUIRED:
        if key not in obj:
            raise FormatError(f"line {line_no}: missing field {key!r}")
    tokens = obj["tokens"]
    sections = obj["sections"]
    rows = obj["embeddings"]
    if not isinstance(tokens, list) or not all(isinstance(t, str) for t in tokens):
        raise FormatError(f"line {line_no}: tokens must be a list of strings")
    if len(sections) != len(tokens):
        raise DimMismatchError(
            f"line {line_no}: {len(tokens)} tokens but {len(sections)} section labels"
        )
    if len(rows) != len(tokens):
        raise DimMismatchError(
            f"line {line_no}: {len(tokens)} tokens but {len(rows)} embedding rows"
        )
    d_text = obj["d_text"]
    matrix = np.array(rows, dtype=np.float64)
    if matrix.size == 0:
        matrix = matrix.reshape(0, d_text)
    if matrix.ndim != 2 or matrix.shape[1] != d_text:
        raise DimMismatchError(
            f"line {line_no}: embedding rows of width {matrix.shape[-1] if matrix.ndim else 0}"
            f" but d_text={d_text}"
        )
    return EmbeddingRecord(
        fragment_key=obj["fragment_key"],
        description=obj["description"],
        tokens=list(tokens),
        sections=list(sections),
        embeddings=matrix,
        encoder=obj["encoder"],
    )


def read_embedding_store(path) -> EmbeddingStore:
    """Read and validate a JSON-Lines store; duplicate keys last-wins."""
    raw = Path(path).read_bytes()
    store = EmbeddingStore(content_hash=hashlib.sha256(raw).hexdigest())
    d_text: int | None = None
    for line_no, line in enumerate(raw.decode("utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except ValueError as exc:
            raise FormatError(f"line {line_no}: invalid JSON ({exc})") from exc
        record = _parse_record(obj, line_no)
        if d_text is None:
            d_text = record.d_text
        elif record.d_text != d_text:
            raise DimMismatchError(
                f"line {line_no}: d_text {record.d_text} != store-wide {d_text}"
            )
        if record.fragment_key in store.records:
            warnings.warn(
                f"duplicate fragment_key {record.fragment_key!r} at line {line_no}; "
                "keeping the later record", stacklevel=2,
            )
        store.records[record.fragment_key] = record
    return store


def write_embedding_store(records, path) -> None:
    """Write records (iterable, sorted by key) in the interchange format."""
    ordered = sorted(records, key=lambda r: r.fragment_key)
    lines = []
    for record in ordered:
        lines.append(json.dumps({
            "fragment_key": record.fragment_key,
            "description": record.description,
            "tokens": record.tokens,
            "sections": record.sections,
            "embeddings": [[float(x) for x in row] for row in record.embeddings],
            "d_text": record.d_text,
            "encoder": record.encoder,
        }, sort_keys=True))
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""))
