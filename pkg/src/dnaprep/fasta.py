"""Streaming FASTA ingestion.

Records are yielded one at a time so peak memory stays bounded by the
longest single sequence. Lowercase bases are uppercased, CRLF endings are
tolerated, and gzip-compressed files are opened transparently when the
filename ends in ``.gz``. Any body byte outside A/C/G/T/N aborts with the
offending line number.
"""

from __future__ import annotations

import gzip
from typing import Iterator

from .core import DnaSequence
from .errors import DataError

_VALID = b"ACGTN"


def read_fasta(path) -> Iterator[DnaSequence]:
    """Yield validated sequences from a FASTA file in record order."""
    opener = gzip.open if str(path).endswith(".gz") else open
    with opener(path, "rb") as fh:
        record_id: str | None = None
        chunks: list[bytes] = []
        for lineno, raw in enumerate(fh, 1):
            line = raw.rstrip(b"\r\n")
            if not line:
                continue
            if line.startswith(b">"):
                if record_id is not None:
                    yield _make(record_id, chunks)
                header = line[1:].strip()
                if not header:
                    raise DataError(f"{path}: empty FASTA header on line {lineno}")
                record_id = header.split()[0].decode("ascii", errors="replace")
                chunks = []
            else:
                if record_id is None:
                    raise DataError(f"{path}: sequence data before any header on line {lineno}")
                body = line.upper()
                if body.translate(None, delete=_VALID):
                    bad = next(bytes([b]) for b in body if b not in _VALID)
                    raise DataError(f"{path}: invalid symbol {bad!r} on line {lineno}")
                chunks.append(body)
        if record_id is not None:
            yield _make(record_id, chunks)


def _make(record_id: str, chunks: list[bytes]) -> DnaSequence:
    return DnaSequence(b"".join(chunks).decode("ascii"), source_id=record_id)
