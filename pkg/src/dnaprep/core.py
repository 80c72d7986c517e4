"""Nucleotide sequences, token vocabularies, and reverse-complement machinery.

Everything downstream (tokenizers, masking, statistics) is built on the two
types defined here: :class:`DnaSequence`, a validated uppercase nucleotide
string, and :class:`Vocabulary`, an ordered token set with special-token
bookkeeping and a reverse-complement label map.

Conventions fixed here for determinism:

* nucleotide order is ``A < C < G < T``, so the id of a k-mer equals its
  base-4 value under A=0, C=1, G=2, T=3;
* special tokens ``[CLS] [SEP] [MASK] [PAD] [UNK]`` are appended after all
  non-special tokens, keeping non-special ids contiguous from 0;
* ``[CULL]`` (the replacement token for pruned entries) is an ordinary,
  non-special token;
* the reverse complement of ``N`` is ``N``.

All types are treated as immutable after construction and are safe to share
across threads.
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field

from .errors import ConfigError, DataError

NUCLEOTIDES = "ACGT"
N_CHAR = "N"

KMER = "kmer"
WORD = "word"
BPE = "bpe"
VOCAB_KINDS = (KMER, WORD, BPE)

SPECIAL_NAMES = ("CLS", "SEP", "MASK", "PAD", "UNK")
SPECIAL_TOKENS = {name: f"[{name}]" for name in SPECIAL_NAMES}
CULL_TOKEN = "[CULL]"

VOCAB_FORMAT_VERSION = 1

_COMPLEMENT = str.maketrans("ACGTN", "TGCAN")
_VALID_BYTES = b"ACGTN"
_BAD_BYTE_RE = re.compile(b"[^ACGTN]")


def _validate_bases(text: str) -> str:
    """Uppercase ``text`` and check it only contains A/C/G/T/N.

    Returns the normalized string; raises :class:`DataError` naming the
    first offending byte and its offset otherwise.
    """
    try:
        raw = text.encode("ascii")
    except UnicodeEncodeError as exc:
        raise DataError(f"non-ASCII character in sequence at offset {exc.start}") from None
    upper = raw.upper()
    if upper.translate(None, delete=_VALID_BYTES):
        match = _BAD_BYTE_RE.search(upper)
        assert match is not None
        raise DataError(
            f"invalid symbol {bytes([upper[match.start()]])!r} at offset {match.start()}"
        )
    return upper.decode("ascii")


@dataclass(frozen=True)
class DnaSequence:
    """An immutable DNA sequence over the alphabet ``{A, C, G, T, N}``.

    Lowercase input is uppercased on construction (soft-masked regions are
    treated as ordinary bases); any other symbol is rejected. Empty
    sequences are legal and tokenize to empty token lists.
    """

    bases: str
    source_id: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "bases", _validate_bases(self.bases))

    def __len__(self) -> int:
        return len(self.bases)


def reverse_complement(seq: DnaSequence) -> DnaSequence:
    """Return the reverse complement (A<->T, C<->G, N->N) of ``seq``."""
    return DnaSequence(rc_string(seq.bases), seq.source_id)


def rc_string(bases: str) -> str:
    """Reverse-complement a plain nucleotide string (no validation)."""
    return bases.translate(_COMPLEMENT)[::-1]


@dataclass
class Vocabulary:
    """Ordered token set: index in ``tokens`` is the token id.

    ``specials`` maps the names CLS/SEP/MASK/PAD/UNK to their ids; special
    ids always occupy the tail of the id range so non-special ids are
    contiguous from 0 (stable label spaces when culling). ``merges`` is
    only populated for BPE vocabularies and records the ordered merge
    rules used to rebuild the token set and to encode.
    """

    kind: str
    tokens: tuple[str, ...]
    specials: dict[str, int]
    k: int | None = None
    merges: tuple[tuple[str, str], ...] = ()

    _token_to_id: dict[str, int] = field(init=False, repr=False, compare=False)
    _kmer_value_lut: object = field(init=False, repr=False, compare=False, default=None)

    def __post_init__(self) -> None:
        if self.kind not in VOCAB_KINDS:
            raise ConfigError(f"unknown vocabulary kind {self.kind!r}")
        if self.kind in (KMER, WORD) and self.k is None:
            raise ConfigError(f"{self.kind} vocabulary requires k")
        self.tokens = tuple(self.tokens)
        self.merges = tuple((l, r) for l, r in self.merges)
        self._token_to_id = {t: i for i, t in enumerate(self.tokens)}
        if len(self._token_to_id) != len(self.tokens):
            raise DataError("duplicate token strings in vocabulary")
        n_special = len(self.specials)
        expected = {len(self.tokens) - n_special + i for i in range(n_special)}
        if set(self.specials.values()) != expected:
            raise DataError("special tokens must occupy the tail of the id range")
        for name, sid in self.specials.items():
            if self.tokens[sid] != SPECIAL_TOKENS.get(name):
                raise DataError(f"special {name} does not match token at id {sid}")
        if CULL_TOKEN in self._token_to_id and self._token_to_id[CULL_TOKEN] >= self.n_nonspecial:
            raise DataError(f"{CULL_TOKEN} must not be a special token")

    # -- id bookkeeping ----------------------------------------------------

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def n_nonspecial(self) -> int:
        return len(self.tokens) - len(self.specials)

    def special_id(self, name: str) -> int:
        return self.specials[name]

    @property
    def special_ids(self) -> frozenset[int]:
        return frozenset(self.specials.values())

    def is_special(self, token_id: int) -> bool:
        return token_id >= self.n_nonspecial

    @property
    def mask_id(self) -> int:
        return self.specials["MASK"]

    @property
    def unk_id(self) -> int:
        return self.specials["UNK"]

    @property
    def cull_id(self) -> int | None:
        return self._token_to_id.get(CULL_TOKEN)

    def id_of(self, token: str) -> int:
        try:
            return self._token_to_id[token]
        except KeyError:
            raise DataError(f"token {token!r} not in vocabulary") from None

    def token_of(self, token_id: int) -> str:
        return self.tokens[token_id]

    def __contains__(self, token: str) -> bool:
        return token in self._token_to_id

    # -- reverse complement ------------------------------------------------

    def rc_label(self, token_id: int) -> int:
        """Map a non-special token id to its reverse-complement label id.

        For RC-closed vocabularies (k-mer / word) this is the id of the
        reverse-complement token. For BPE the label lives in a parallel
        label space indexed identically to the vocabulary (label i means
        "reverse complement of token i"), so the id is returned unchanged.
        """
        if self.is_special(token_id):
            raise ValueError(f"special token id {token_id} has no reverse complement")
        if self.kind == BPE:
            return token_id
        rc = rc_string(self.tokens[token_id])
        rid = self._token_to_id.get(rc)
        if rid is None:
            # A culled vocabulary may have lost the complement token.
            if self.cull_id is not None:
                return self.cull_id
            raise ValueError(f"reverse complement {rc!r} missing from vocabulary")
        return rid

    def n_run_tokens(self) -> tuple[str, ...]:
        """N-run tokens present in the vocabulary, longest first."""
        runs = [t for t in self.tokens if set(t) == {N_CHAR}]
        return tuple(sorted(runs, key=len, reverse=True))

    # -- serialization -----------------------------------------------------

    def to_json_bytes(self) -> bytes:
        obj = {
            "format_version": VOCAB_FORMAT_VERSION,
            "kind": self.kind,
            "k": self.k,
            "tokens": list(self.tokens),
            "specials": dict(self.specials),
            "merges": [[l, r] for l, r in self.merges],
        }
        return (json.dumps(obj, indent=1) + "\n").encode("utf-8")

    def save(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(self.to_json_bytes())

    @classmethod
    def from_json_bytes(cls, data: bytes) -> "Vocabulary":
        try:
            obj = json.loads(data.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise DataError(f"not a vocabulary file: {exc}") from None
        if obj.get("format_version") != VOCAB_FORMAT_VERSION:
            raise DataError(f"unsupported vocabulary format_version {obj.get('format_version')!r}")
        return cls(
            kind=obj["kind"],
            tokens=tuple(obj["tokens"]),
            specials={str(k): int(v) for k, v in obj["specials"].items()},
            k=obj.get("k"),
            merges=tuple((l, r) for l, r in obj.get("merges", [])),
        )

    @classmethod
    def load(cls, path) -> "Vocabulary":
        with open(path, "rb") as fh:
            return cls.from_json_bytes(fh.read())


def rc_label(token_id: int, vocab: Vocabulary) -> int:
    """Functional form of :meth:`Vocabulary.rc_label`."""
    return vocab.rc_label(token_id)


def _with_specials(tokens: list[str]) -> tuple[tuple[str, ...], dict[str, int]]:
    base = len(tokens)
    specials = {name: base + i for i, name in enumerate(SPECIAL_NAMES)}
    return tuple(tokens + [SPECIAL_TOKENS[n] for n in SPECIAL_NAMES]), specials


def build_kmer_vocab(k: int, include_n_tokens: bool = False, kind: str = KMER) -> Vocabulary:
    """Enumerate the 4**k k-mers (A<C<G<T lexicographic) plus specials.

    With ``include_n_tokens`` the homogeneous N-run tokens ``N*k .. N``
    are appended after the k-mers; these are what the N-segmentation
    priority list draws from. ``kind`` selects whether the vocabulary is
    tagged for the overlapping (kmer) or non-overlapping (word) tokenizer;
    the token set is identical.
    """
    if not 1 <= k <= 12:
        raise ConfigError(f"k must be in [1, 12], got {k}")
    if kind not in (KMER, WORD):
        raise ConfigError(f"build_kmer_vocab supports kmer/word kinds, got {kind!r}")
    toks = ["".join(p) for p in itertools.product(NUCLEOTIDES, repeat=k)]
    if include_n_tokens:
        toks.extend(N_CHAR * run for run in range(k, 0, -1))
    tokens, specials = _with_specials(toks)
    return Vocabulary(kind=kind, tokens=tokens, specials=specials, k=k)


def bpe_vocab_from_merges(merges) -> Vocabulary:
    """Build a BPE vocabulary from an ordered merge list.

    Tokens are the four nucleotides followed by each merge's output string
    in merge order (a rare duplicate output maps back to the existing id).
    """
    toks = list(NUCLEOTIDES)
    seen = set(toks)
    pairs = []
    for left, right in merges:
        pairs.append((left, right))
        out = left + right
        if out not in seen:
            seen.add(out)
            toks.append(out)
    tokens, specials = _with_specials(toks)
    return Vocabulary(kind=BPE, tokens=tokens, specials=specials, merges=tuple(pairs))
