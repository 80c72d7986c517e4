"""Sequence encoders: overlapping k-mer, non-overlapping word, and BPE.

Three "N" handling modes are supported for every tokenizer:

* ``as_unk`` -- any token window containing N becomes ``[UNK]``;
* ``drop``   -- such windows are skipped;
* ``seg_n``  -- the sequence is segmented at N boundaries, non-N stretches
  are tokenized normally, and N runs are greedily covered by the longest
  N-run token that fits (requires a vocabulary built with N tokens).

The k-mer and word encoders are numpy-vectorized (a 6-mer pass over a
chromosome-scale sequence runs at tens of MB/s) and are exactly
reproducible: the same input and spec always produce the same ids.

BPE training is deterministic: the most frequent adjacent pair is merged
at every step, occurrences are counted non-overlapping left-to-right
within each N-delimited run, and frequency ties are broken by the
lexicographic order of the concatenated pair string.
"""

from __future__ import annotations

import heapq
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .core import (
    BPE,
    KMER,
    N_CHAR,
    NUCLEOTIDES,
    WORD,
    DnaSequence,
    Vocabulary,
    bpe_vocab_from_merges,
)
from .errors import ConfigError, DataError

N_MODE_AS_UNK = "as_unk"
N_MODE_DROP = "drop"
N_MODE_SEG = "seg_n"
N_MODES = (N_MODE_AS_UNK, N_MODE_DROP, N_MODE_SEG)

_CODE_LUT = np.full(256, 255, dtype=np.uint8)
for _i, _c in enumerate(NUCLEOTIDES):
    _CODE_LUT[ord(_c)] = _i
_CODE_LUT[ord(N_CHAR)] = 4
_N_CODE = 4

_ACGT_SET = frozenset(NUCLEOTIDES)
_BASE_VALUE = {c: i for i, c in enumerate(NUCLEOTIDES)}


@dataclass
class TokenizerSpec:
    """A vocabulary plus the N-handling mode and sentinel flag."""

    vocab: Vocabulary
    n_mode: str = N_MODE_AS_UNK
    add_sentinels: bool = False

    def __post_init__(self) -> None:
        if self.n_mode not in N_MODES:
            raise ConfigError(f"unknown n_mode {self.n_mode!r}")
        if self.n_mode == N_MODE_SEG and not self.vocab.n_run_tokens():
            raise ConfigError("seg_n mode requires a vocabulary built with N-run tokens")
        if self.n_mode == N_MODE_AS_UNK and "UNK" not in self.vocab.specials:
            raise ConfigError("as_unk mode requires an UNK special token")


def _codes(bases: str) -> np.ndarray:
    return _CODE_LUT[np.frombuffer(bases.encode("ascii"), dtype=np.uint8)]


def _wrap_sentinels(ids: np.ndarray, vocab: Vocabulary, add: bool) -> np.ndarray:
    if not add:
        return ids
    return np.concatenate(
        (
            np.asarray([vocab.special_id("CLS")], dtype=ids.dtype),
            ids,
            np.asarray([vocab.special_id("SEP")], dtype=ids.dtype),
        )
    )


def _kmer_value(token: str) -> int:
    value = 0
    for ch in token:
        value = value * 4 + _BASE_VALUE[ch]
    return value


_IDENTITY = "identity"


def _value_lut(vocab: Vocabulary):
    """Map the base-4 value of a k-mer to its id in ``vocab``.

    Returns None for a complete k-mer vocabulary (the mapping is the
    identity, so callers can skip the gather); for a culled vocabulary,
    values whose token was removed map to the [CULL] id.
    """
    if vocab._kmer_value_lut is not None:
        cached = vocab._kmer_value_lut
        return None if cached is _IDENTITY else cached
    k = vocab.k
    size = 4**k
    pure = sum(1 for t in vocab.tokens[: vocab.n_nonspecial] if set(t) <= _ACGT_SET)
    complete = (
        pure == size
        and vocab.tokens[0] == "A" * k
        and vocab.tokens[size - 1] == "T" * k
        and _kmer_value(vocab.tokens[size // 3]) == size // 3
    )
    if complete:
        vocab._kmer_value_lut = _IDENTITY
        return None
    fill = vocab.cull_id
    if fill is None:
        raise DataError("vocabulary is missing k-mers and has no [CULL] token")
    lut = np.full(size, fill, dtype=np.int32)
    for tok, tid in vocab._token_to_id.items():
        if len(tok) == k and set(tok) <= _ACGT_SET:
            lut[_kmer_value(tok)] = tid
    vocab._kmer_value_lut = lut
    return lut


def _window_values(codes: np.ndarray, k: int, stride: int) -> tuple[np.ndarray, np.ndarray]:
    """Base-4 value of each width-k window plus a contains-N flag.

    N positions contribute an arbitrary digit to the value; every flagged
    window is overridden or dropped by the caller before use.
    """
    n = codes.size
    if stride == 1:
        m = n - k + 1
        if m <= 0:
            return np.empty(0, dtype=np.int32), np.empty(0, dtype=bool)
        n_flags = codes == _N_CODE
        if n_flags.any():
            csum = np.concatenate(([0], np.cumsum(n_flags, dtype=np.int64)))
            has_n = (csum[k:] - csum[:-k]) > 0
            clean = np.minimum(codes, 3)
        else:
            has_n = np.zeros(m, dtype=bool)
            clean = codes
        # 4**12 < 2**31, so int32 holds any k <= 12 window value
        vals = clean[:m].astype(np.int32)
        for j in range(1, k):
            vals <<= 2
            vals += clean[j : j + m]
        return vals, has_n
    m = n // k
    if m <= 0:
        return np.empty(0, dtype=np.int32), np.empty(0, dtype=bool)
    grid = codes[: m * k].reshape(m, k).astype(np.int32)
    has_n = (grid == _N_CODE).any(axis=1)
    np.minimum(grid, 3, out=grid)
    powers = 4 ** np.arange(k - 1, -1, -1, dtype=np.int32)
    return grid @ powers, has_n


def _ids_from_codes(codes: np.ndarray, spec: TokenizerSpec, stride: int) -> np.ndarray:
    vocab = spec.vocab
    vals, has_n = _window_values(codes, vocab.k, stride)
    lut = _value_lut(vocab)
    core = vals if lut is None else lut[vals]
    if spec.n_mode == N_MODE_AS_UNK:
        if has_n.any():
            core[has_n] = vocab.unk_id  # every id fits int32 (4**12 + specials)
    else:
        core = core[~has_n]
    return core


def _fixed_width_ids(bases: str, spec: TokenizerSpec, stride: int) -> np.ndarray:
    if spec.n_mode == N_MODE_SEG:
        core = _segmented_ids(bases, spec.vocab, stride)
    else:
        core = _ids_from_codes(_codes(bases), spec, stride)
    return _wrap_sentinels(core, spec.vocab, spec.add_sentinels)


def kmer_tokenize(seq: DnaSequence, spec: TokenizerSpec) -> np.ndarray:
    """Overlapping k-mer encoding: width-k window, stride 1.

    N-free output length is ``max(0, n - k + 1)`` before sentinels;
    consecutive tokens share a (k-1)-nucleotide overlap.
    """
    if spec.vocab.kind != KMER:
        raise ConfigError(f"kmer_tokenize requires a kmer vocabulary, got {spec.vocab.kind}")
    return _fixed_width_ids(seq.bases, spec, stride=1)


def word_tokenize(seq: DnaSequence, spec: TokenizerSpec) -> np.ndarray:
    """Non-overlapping k-mer encoding: stride k, sub-k remainder dropped."""
    if spec.vocab.kind != WORD:
        raise ConfigError(f"word_tokenize requires a word vocabulary, got {spec.vocab.kind}")
    return _fixed_width_ids(seq.bases, spec, stride=spec.vocab.k)


def tokenize(seq: DnaSequence, spec: TokenizerSpec) -> np.ndarray:
    """Dispatch to the encoder matching ``spec.vocab.kind``."""
    if spec.vocab.kind == KMER:
        return kmer_tokenize(seq, spec)
    if spec.vocab.kind == WORD:
        return word_tokenize(seq, spec)
    return bpe_encode(seq, spec.vocab, n_mode=spec.n_mode, add_sentinels=spec.add_sentinels)


# -- N segmentation ---------------------------------------------------------


def _iter_n_runs(bases: str) -> Iterator[tuple[int, int, bool]]:
    """Yield (start, end, is_n_run) for maximal N / non-N stretches."""
    i, n = 0, len(bases)
    while i < n:
        j = i
        if bases[i] == N_CHAR:
            while j < n and bases[j] == N_CHAR:
                j += 1
            yield i, j, True
        else:
            while j < n and bases[j] != N_CHAR:
                j += 1
            yield i, j, False
        i = j


def _cover_n_run(length: int, priority: tuple[str, ...]) -> list[str]:
    out: list[str] = []
    rem = length
    for tok in priority:
        width = len(tok)
        reps = rem // width
        if reps:
            out.extend([tok] * reps)
            rem -= reps * width
    if rem:
        raise DataError(
            f"N run residue of {rem} not coverable by priority tokens {list(priority)}"
        )
    return out


def segment_with_n(seq: DnaSequence, k: int, priority: Iterable[str] | None = None) -> list[str]:
    """Segment a sequence into width-k tiles and N-run tokens.

    Non-N stretches are tiled in steps of k (sub-k remainders dropped);
    each maximal N run is covered greedily by the longest priority token
    that fits, residual N's falling through to shorter tokens. ``priority``
    defaults to the homogeneous runs ``N*k .. N`` and must be sorted by
    decreasing length.
    """
    if priority is None:
        priority = tuple(N_CHAR * run for run in range(k, 0, -1))
    else:
        priority = tuple(priority)
        if any(set(t) != {N_CHAR} for t in priority):
            raise ConfigError("priority tokens must be homogeneous N runs")
        if list(priority) != sorted(priority, key=len, reverse=True):
            raise ConfigError("priority must be sorted by decreasing token length")
    out: list[str] = []
    for start, end, is_n in _iter_n_runs(seq.bases):
        if is_n:
            out.extend(_cover_n_run(end - start, priority))
        else:
            for pos in range(start, end - k + 1, k):
                out.append(seq.bases[pos : pos + k])
    return out


def _segmented_ids(bases: str, vocab: Vocabulary, stride: int) -> np.ndarray:
    """seg_n core: tokenize non-N stretches with the tokenizer's own stride."""
    priority = vocab.n_run_tokens()
    lut = _value_lut(vocab)
    parts: list[np.ndarray] = []
    for start, end, is_n in _iter_n_runs(bases):
        if is_n:
            covered = _cover_n_run(end - start, priority)
            parts.append(np.array([vocab.id_of(t) for t in covered], dtype=np.int64))
        else:
            vals, _ = _window_values(_codes(bases[start:end]), vocab.k, stride)
            parts.append(vals if lut is None else lut[vals])
    if not parts:
        return np.empty(0, dtype=np.int64)
    return np.concatenate(parts).astype(np.int64)


# -- BPE training -------------------------------------------------------------


class _BpeState:
    """Linked-list corpus with exact pair counts and a lazy max-heap.

    Token positions live in flat arrays with prev/next links; -1 marks a
    run boundary. ``counts`` holds non-overlapping left-to-right pair
    counts: for a pair with distinct sides this equals the plain adjacency
    count, while a self-pair (t, t) counts floor(run_len / 2) per maximal
    run of t. The heap holds (-count, concat, left_string, pair) entries
    and is cleaned lazily: an entry is stale once its recorded count no
    longer matches ``counts``.
    """

    def __init__(self, runs: Iterable[str]):
        tok: list[int] = []
        prv: list[int] = []
        nxt: list[int] = []
        for run in runs:
            start = len(tok)
            for ch in run:
                tok.append(_BASE_VALUE[ch])
            end = len(tok)
            for pos in range(start, end):
                prv.append(pos - 1 if pos > start else -1)
                nxt.append(pos + 1 if pos + 1 < end else -1)
        self.tok = tok
        self.prv = prv
        self.nxt = nxt
        self.strings = list(NUCLEOTIDES)
        self.str_to_id = {s: i for i, s in enumerate(self.strings)}
        self.counts: dict[tuple[int, int], int] = {}
        self.positions: dict[tuple[int, int], set[int]] = {}
        self.heap: list[tuple[int, str, str, tuple[int, int]]] = []
        self._build_counts()

    # counts bookkeeping ----------------------------------------------------

    def _build_counts(self) -> None:
        tok, prv, nxt = self.tok, self.prv, self.nxt
        for start in range(len(tok)):
            if prv[start] != -1:
                continue
            i = start
            same_len = 1
            while True:
                j = nxt[i]
                if j == -1:
                    break
                pair = (tok[i], tok[j])
                self.positions.setdefault(pair, set()).add(i)
                if tok[i] == tok[j]:
                    same_len += 1
                else:
                    if same_len > 1:
                        self._bump((tok[i], tok[i]), same_len // 2)
                    same_len = 1
                    self._bump(pair, 1)
                i = j
            if same_len > 1:
                self._bump((tok[i], tok[i]), same_len // 2)

    def _bump(self, pair: tuple[int, int], delta: int) -> None:
        if delta == 0:
            return
        new = self.counts.get(pair, 0) + delta
        self.counts[pair] = new
        if new > 0:
            left, right = self.strings[pair[0]], self.strings[pair[1]]
            heapq.heappush(self.heap, (-new, left + right, left, pair))

    def _add_adj(self, left_pos: int, pair: tuple[int, int], delta: int = 1) -> None:
        self.positions.setdefault(pair, set()).add(left_pos)
        self._bump(pair, delta)

    def _drop_adj(self, left_pos: int, pair: tuple[int, int]) -> None:
        occ = self.positions.get(pair)
        if occ is not None:
            occ.discard(left_pos)
        self._bump(pair, -1)

    def _chain_len(self, pos: int, token: int) -> int:
        """Number of (token, token) adjacencies in the run through ``pos``."""
        edges = 0
        q = pos
        while True:
            p = self.prv[q]
            if p == -1 or self.tok[p] != token:
                break
            edges += 1
            q = p
        q = pos
        while True:
            j = self.nxt[q]
            if j == -1 or self.tok[j] != token:
                break
            edges += 1
            q = j
        return edges

    def _drop_boundary_homo(self, left_pos: int, token: int) -> None:
        # The removed edge sits at one end of its run, so the chain only
        # shortens by one: the count drops exactly when the length is odd.
        length = self._chain_len(left_pos, token)
        pair = (token, token)
        occ = self.positions.get(pair)
        if occ is not None:
            occ.discard(left_pos)
        self._bump(pair, -1 if length % 2 == 1 else 0)

    def _recount_homo(self, token: int) -> None:
        """Authoritative (token, token) recount from the positions set.

        Needed only in the rare case where a merge's output string equals
        a pre-existing token, which breaks the fresh-token assumptions of
        the incremental chain accounting.
        """
        pair = (token, token)
        occ = {
            p
            for p in self.positions.get(pair, set())
            if self.tok[p] == token and self.nxt[p] != -1 and self.tok[self.nxt[p]] == token
        }
        self.positions[pair] = occ
        total = 0
        seen: set[int] = set()
        for p in occ:
            if p in seen:
                continue
            q = p
            while self.prv[q] in occ:
                q = self.prv[q]
            edges = 0
            while q in occ:
                seen.add(q)
                edges += 1
                q = self.nxt[q]
            total += (edges + 1) // 2
        self._bump(pair, total - self.counts.get(pair, 0))

    # merge selection ---------------------------------------------------------

    def best_pair(self) -> tuple[int, int] | None:
        while self.heap:
            neg, _concat, _left, pair = self.heap[0]
            if self.counts.get(pair, 0) == -neg and -neg > 0:
                return pair
            heapq.heappop(self.heap)
        return None

    # merge application ---------------------------------------------------------

    def merge(self, pair: tuple[int, int]) -> tuple[int, bool]:
        """Apply one merge everywhere; returns (merged id, was fresh token)."""
        a, b = pair
        out = self.strings[a] + self.strings[b]
        new_id = self.str_to_id.get(out)
        fresh = new_id is None
        if fresh:
            new_id = len(self.strings)
            self.strings.append(out)
            self.str_to_id[out] = new_id
        occ = sorted(self.positions.pop(pair, ()))
        self.counts.pop(pair, None)
        if a == b:
            self._merge_homo(a, new_id, occ)
        else:
            self._merge_hetero(a, b, new_id, occ)
        if not fresh:
            self._recount_homo(new_id)
        return new_id, fresh

    def _splice(self, i: int, j: int, new_id: int) -> None:
        tok, prv, nxt = self.tok, self.prv, self.nxt
        right = nxt[j]
        tok[i] = new_id
        nxt[i] = right
        if right != -1:
            prv[right] = i
        tok[j] = -1
        prv[j] = -1
        nxt[j] = -1

    def _merge_hetero(self, a: int, b: int, c: int, occ: list[int]) -> None:
        tok, prv, nxt = self.tok, self.prv, self.nxt
        run_end_len: dict[int, int] = {}
        for i in occ:
            j = nxt[i]
            if tok[i] != a or j == -1 or tok[j] != b:
                continue  # defensive: distinct-sided occurrences never overlap
            left = prv[i]
            right = nxt[j]
            if left != -1:
                x = tok[left]
                if x == a:
                    self._drop_boundary_homo(left, a)
                else:
                    self._drop_adj(left, (x, a))
            if right != -1:
                y = tok[right]
                if y == b:
                    self._drop_boundary_homo(j, b)
                else:
                    self._drop_adj(j, (b, y))
            self._splice(i, j, c)
            if left != -1 and tok[left] == c:
                # chain of freshly merged tokens: count grows on every 2nd link
                length = run_end_len.get(left, 1) + 1
                run_end_len[i] = length
                self._add_adj(left, (c, c), delta=length // 2 - (length - 1) // 2)
            else:
                run_end_len[i] = 1
                if left != -1:
                    self._add_adj(left, (tok[left], c))
            if right != -1:
                self._add_adj(i, (c, tok[right]), delta=0 if tok[right] == c else 1)

    def _merge_homo(self, a: int, c: int, occ: list[int]) -> None:
        tok, prv, nxt = self.tok, self.prv, self.nxt
        occ_set = set(occ)
        consumed: set[int] = set()
        for start in occ:
            if start in consumed or (prv[start] != -1 and prv[start] in occ_set):
                continue  # not the head edge of its run
            chain = [start]
            q = start
            while True:
                j = nxt[q]
                if j == -1 or tok[j] != a:
                    break
                chain.append(j)
                q = j
            consumed.update(chain[:-1])
            run_len = len(chain)
            reps = run_len // 2
            left = prv[chain[0]]
            right = nxt[chain[-1]]
            if left != -1:
                self._drop_adj(left, (tok[left], a))
            if right != -1 and run_len % 2 == 0:
                self._drop_adj(chain[-1], (a, tok[right]))
            heads = []
            for idx in range(0, run_len - 1, 2):
                self._splice(chain[idx], chain[idx + 1], c)
                heads.append(chain[idx])
            if left != -1:
                self._add_adj(left, (tok[left], c), delta=0 if tok[left] == c else 1)
            for prev_head in heads[:-1]:
                self._add_adj(prev_head, (c, c), delta=0)
            self._bump((c, c), reps // 2)
            if run_len % 2 == 1:
                self._add_adj(heads[-1], (c, a))
            elif right != -1:
                self._add_adj(heads[-1], (c, tok[right]), delta=0 if tok[right] == c else 1)


def _corpus_runs(corpus: Iterable[DnaSequence]) -> Iterator[str]:
    for seq in corpus:
        for run in seq.bases.split(N_CHAR):
            if run:
                yield run


def bpe_train(corpus: Iterable[DnaSequence], target_size: int) -> Vocabulary:
    """Train a BPE vocabulary of ``target_size`` non-special tokens.

    Exactly ``target_size - 4`` merges are performed on top of the
    single-nucleotide alphabet; no merge crosses an N or a sequence
    boundary. If the corpus runs out of adjacent pairs first, the
    vocabulary is returned at the achieved size with a warning.
    """
    return _train(corpus, target_size, snapshot_sizes=())[0]


def bpe_train_sizes(corpus: Iterable[DnaSequence], sizes: Iterable[int]) -> dict[int, Vocabulary]:
    """Train once to ``max(sizes)`` and emit the vocabulary at each size.

    Greedy BPE merges depend only on the corpus and the preceding merges,
    so the size-S vocabulary is exactly the S-token prefix of the largest
    training run.
    """
    wanted = sorted(set(sizes))
    if not wanted:
        raise ConfigError("no sizes requested")
    return _train(corpus, wanted[-1], snapshot_sizes=tuple(wanted))[1]


def _train(
    corpus: Iterable[DnaSequence],
    target_size: int,
    snapshot_sizes: tuple[int, ...],
) -> tuple[Vocabulary, dict[int, Vocabulary]]:
    if target_size < 4:
        raise ConfigError(f"target_size must be >= 4 (the base alphabet), got {target_size}")
    state = _BpeState(_corpus_runs(corpus))
    merges: list[tuple[str, str]] = []
    snaps: dict[int, Vocabulary] = {}
    size = 4
    if size in snapshot_sizes:
        snaps[size] = bpe_vocab_from_merges([])
    while size < target_size:
        pair = state.best_pair()
        if pair is None:
            warnings.warn(
                f"corpus exhausted after {len(merges)} merges; "
                f"vocabulary truncated at {size} non-special tokens",
                stacklevel=2,
            )
            break
        left, right = state.strings[pair[0]], state.strings[pair[1]]
        _, fresh = state.merge(pair)
        merges.append((left, right))
        if fresh:
            size += 1
            if size in snapshot_sizes:
                snaps[size] = bpe_vocab_from_merges(merges)
    vocab = bpe_vocab_from_merges(merges)
    for want in snapshot_sizes:
        if want not in snaps:
            snaps[want] = vocab  # exhausted before reaching this size
    return vocab, snaps


# -- BPE encoding -------------------------------------------------------------


def _merge_ranks(vocab: Vocabulary) -> dict[tuple[str, str], int]:
    ranks: dict[tuple[str, str], int] = {}
    for rank, pair in enumerate(vocab.merges):
        ranks.setdefault(pair, rank)
    return ranks


def _encode_run(run: str, vocab: Vocabulary, ranks: dict[tuple[str, str], int]) -> list[str]:
    """Merge-rank encoding of one N-free run into token strings."""
    toks = list(run)
    while len(toks) > 1:
        best_rank = None
        for i in range(len(toks) - 1):
            r = ranks.get((toks[i], toks[i + 1]))
            if r is not None and (best_rank is None or r < best_rank):
                best_rank = r
        if best_rank is None:
            break
        left, right = vocab.merges[best_rank]
        out: list[str] = []
        i = 0
        while i < len(toks):
            if i + 1 < len(toks) and toks[i] == left and toks[i + 1] == right:
                out.append(left + right)
                i += 2
            else:
                out.append(toks[i])
                i += 1
        toks = out
    return toks


def bpe_encode(
    seq: DnaSequence,
    vocab: Vocabulary,
    n_mode: str = N_MODE_AS_UNK,
    add_sentinels: bool = False,
) -> np.ndarray:
    """Encode a sequence with a trained BPE vocabulary.

    N splits the sequence into independently encoded runs; each N itself
    resolves per ``n_mode`` (seg_n requires N-run tokens in the
    vocabulary, which stock BPE vocabularies do not carry).
    """
    if vocab.kind != BPE:
        raise ConfigError(f"bpe_encode requires a BPE vocabulary, got {vocab.kind}")
    if n_mode not in N_MODES:
        raise ConfigError(f"unknown n_mode {n_mode!r}")
    if n_mode == N_MODE_SEG and not vocab.n_run_tokens():
        raise ConfigError("seg_n mode requires a vocabulary built with N-run tokens")
    ranks = _merge_ranks(vocab)
    cull = vocab.cull_id
    ids: list[int] = []
    for start, end, is_n in _iter_n_runs(seq.bases):
        if is_n:
            if n_mode == N_MODE_AS_UNK:
                ids.extend([vocab.unk_id] * (end - start))
            elif n_mode == N_MODE_SEG:
                ids.extend(
                    vocab.id_of(t) for t in _cover_n_run(end - start, vocab.n_run_tokens())
                )
        else:
            for tok in _encode_run(seq.bases[start:end], vocab, ranks):
                tid = vocab._token_to_id.get(tok)
                if tid is None:
                    if cull is None:
                        raise DataError(f"token {tok!r} missing from BPE vocabulary")
                    tid = cull
                ids.append(tid)
    return _wrap_sentinels(np.asarray(ids, dtype=np.int64), vocab, add_sentinels)


def decode_ids(ids, vocab: Vocabulary) -> str:
    """Concatenate token strings, skipping special tokens."""
    return "".join(vocab.tokens[i] for i in np.asarray(ids) if not vocab.is_special(int(i)))


# -- parallel encoding ---------------------------------------------------------


def kmer_tokenize_parallel(seq: DnaSequence, spec: TokenizerSpec, threads: int) -> np.ndarray:
    """Chunked multi-threaded k-mer encoding, byte-identical to the serial path.

    The sequence is split into window-aligned chunks overlapping by k-1
    bases; each chunk is encoded independently and the results are
    concatenated in order. seg_n mode falls back to the serial encoder
    (segmentation is not window-local).
    """
    if spec.vocab.kind != KMER:
        raise ConfigError("parallel encoding is only defined for the kmer tokenizer")
    if threads <= 1 or spec.n_mode == N_MODE_SEG:
        return kmer_tokenize(seq, spec)
    k = spec.vocab.k
    m = len(seq.bases) - k + 1
    if m <= 0:
        return kmer_tokenize(seq, spec)
    inner = TokenizerSpec(spec.vocab, spec.n_mode, add_sentinels=False)
    codes = _codes(seq.bases)
    step = -(-m // threads)
    bounds = [(s, min(s + step, m)) for s in range(0, m, step)]

    def chunk(span: tuple[int, int]) -> np.ndarray:
        s, e = span
        # numpy view, no copy: the heavy ufunc work runs GIL-free
        return _ids_from_codes(codes[s : e + k - 1], inner, stride=1)

    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(chunk, bounds))
    return _wrap_sentinels(np.concatenate(parts), spec.vocab, spec.add_sentinels)
