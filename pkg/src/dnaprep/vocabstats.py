"""Token frequency and entropy analytics, importance bucketing, and culling.

Frequencies are exact counts over the tokenized corpus; the successor
distribution (and its Shannon entropy, in bits) is computed within
sequences only, never across record boundaries. Per-token prediction
accuracies are consumed from an external file -- this toolkit never
computes them.

Culling replaces a set of non-special tokens with a single ``[CULL]``
token. The removal set is capped at 10% of the non-special vocabulary,
and encoding under the culled vocabulary differs from the original
encoding only at positions whose token was removed.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .core import CULL_TOKEN, SPECIAL_TOKENS, Vocabulary
from .errors import ConstraintError, DataError
from .tokenizers import TokenizerSpec, tokenize

FREQ_BANDS = ("low", "mid", "high")
ACC_BANDS = ("low", "high")
CULL_FRACTION_MAX = 0.10


@dataclass
class TokenStats:
    token_id: int
    token: str
    frequency: int
    rel_freq: float
    context_entropy: float
    accuracy: float | None = None


def compute_token_stats(
    corpus,
    spec: TokenizerSpec,
    accuracy: dict[int, float] | None = None,
) -> list[TokenStats]:
    """Count tokens and successor entropy over a corpus.

    Returns one row per vocabulary id, ordered by id. ``rel_freq`` is
    normalized over non-special emissions. ``accuracy`` maps token ids to
    externally measured prediction accuracies; unknown ids are rejected.
    """
    vocab = spec.vocab
    size = len(vocab)
    freq = np.zeros(size, dtype=np.int64)
    pair_keys: list[np.ndarray] = []
    for seq in corpus:
        ids = tokenize(seq, spec)
        freq += np.bincount(ids, minlength=size)
        if ids.size >= 2:
            pair_keys.append(ids[:-1] * size + ids[1:])
    entropy = np.zeros(size, dtype=np.float64)
    if pair_keys:
        keys, counts = np.unique(np.concatenate(pair_keys), return_counts=True)
        lefts = keys // size
        for left in np.unique(lefts):
            sel = counts[lefts == left].astype(np.float64)
            probs = sel / sel.sum()
            entropy[left] = float(-(probs * np.log2(probs)).sum())
    if accuracy is not None:
        unknown = sorted(set(accuracy) - set(range(size)))
        if unknown:
            raise DataError(f"accuracy file references unknown token ids: {unknown}")
    nonspecial_total = int(freq[: vocab.n_nonspecial].sum())
    denom = nonspecial_total if nonspecial_total else 1
    return [
        TokenStats(
            token_id=i,
            token=vocab.tokens[i],
            frequency=int(freq[i]),
            rel_freq=freq[i] / denom,
            context_entropy=float(entropy[i]),
            accuracy=None if accuracy is None else accuracy.get(i),
        )
        for i in range(size)
    ]


def load_accuracy_csv(path, vocab: Vocabulary) -> dict[int, float]:
    """Read a token_id,accuracy CSV (header row optional)."""
    out: dict[int, float] = {}
    offenders: list[str] = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().lower() in ("token_id", ""):
                continue
            tid = int(row[0])
            acc = float(row[1])
            if not 0 <= tid < len(vocab):
                offenders.append(row[0])
                continue
            out[tid] = acc
    if offenders:
        raise DataError(f"accuracy file references unknown token ids: {offenders}")
    return out


def bucket_tokens(
    stats: list[TokenStats],
    freq_edges: tuple[float, float] | None = None,
    acc_edge: float | None = None,
) -> dict[int, tuple[str, str]]:
    """Assign every non-special token to a (frequency, accuracy) bucket.

    Frequency splits at the tertiles of rel_freq by default, accuracy at
    its median; explicit edges override either. Values equal to an edge
    go to the lower band, so an all-equal column lands in one band.
    """
    rows = [s for s in stats if _is_body_row(s)]
    if any(s.accuracy is None for s in rows):
        missing = [s.token_id for s in rows if s.accuracy is None]
        raise DataError(f"accuracy required for bucketing; missing ids: {missing[:10]}")
    freqs = np.array([s.rel_freq for s in rows])
    accs = np.array([s.accuracy for s in rows])
    if freq_edges is None:
        freq_edges = tuple(np.quantile(freqs, [1 / 3, 2 / 3]))
    if acc_edge is None:
        acc_edge = float(np.median(accs))
    lo, hi = freq_edges
    out: dict[int, tuple[str, str]] = {}
    for row in rows:
        if row.rel_freq <= lo:
            band = "low"
        elif row.rel_freq <= hi:
            band = "mid"
        else:
            band = "high"
        out[row.token_id] = (band, "low" if row.accuracy <= acc_edge else "high")
    return out


def _is_body_row(s: TokenStats) -> bool:
    return s.token not in SPECIAL_TOKENS.values()


def write_stats_csv(path, stats: list[TokenStats], buckets: dict[int, tuple[str, str]] | None = None) -> None:
    """Emit the stats table with the fixed column order."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ["token_id", "token", "frequency", "rel_freq", "context_entropy", "accuracy", "freq_band", "acc_band"]
        )
        for s in stats:
            fb, ab = (buckets or {}).get(s.token_id, ("", ""))
            writer.writerow(
                [
                    s.token_id,
                    s.token,
                    s.frequency,
                    f"{s.rel_freq:.10g}",
                    f"{s.context_entropy:.10g}",
                    "" if s.accuracy is None else f"{s.accuracy:.10g}",
                    fb,
                    ab,
                ]
            )


# -- culling ---------------------------------------------------------------------


@dataclass(frozen=True)
class CullSpec:
    """Which non-special ids to prune; the [CULL] id is assigned on culling."""

    remove_ids: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        object.__setattr__(self, "remove_ids", frozenset(int(i) for i in self.remove_ids))


def cull_vocab(vocab: Vocabulary, spec: CullSpec) -> tuple[Vocabulary, dict[int, int]]:
    """Remove tokens and append [CULL]; returns (culled vocab, id remap).

    The remap sends every surviving id to its new id and every removed id
    to the [CULL] id. Removal is capped at 10% of the non-special
    vocabulary; special ids cannot be removed.
    """
    if CULL_TOKEN in vocab:
        raise DataError("vocabulary already contains a [CULL] token")
    specials_hit = [i for i in spec.remove_ids if vocab.is_special(i)]
    if specials_hit:
        raise ValueError(f"cannot cull special token ids: {sorted(specials_hit)}")
    out_of_range = [i for i in spec.remove_ids if not 0 <= i < len(vocab)]
    if out_of_range:
        raise ValueError(f"cull ids out of range: {sorted(out_of_range)}")
    limit = CULL_FRACTION_MAX * vocab.n_nonspecial
    if len(spec.remove_ids) > limit:
        raise ConstraintError(
            f"removing {len(spec.remove_ids)} of {vocab.n_nonspecial} non-special tokens "
            f"exceeds the {CULL_FRACTION_MAX:.0%} bound"
        )
    survivors = [i for i in range(vocab.n_nonspecial) if i not in spec.remove_ids]
    tokens = [vocab.tokens[i] for i in survivors] + [CULL_TOKEN]
    cull_id = len(tokens) - 1
    specials = {}
    for name in vocab.specials:
        specials[name] = len(tokens)
        tokens.append(SPECIAL_TOKENS[name])
    culled = Vocabulary(
        kind=vocab.kind,
        tokens=tuple(tokens),
        specials=specials,
        k=vocab.k,
        merges=vocab.merges,
    )
    remap = {old: new for new, old in enumerate(survivors)}
    for old in spec.remove_ids:
        remap[old] = cull_id
    for name, old in vocab.specials.items():
        remap[old] = specials[name]
    return culled, remap


def remap_ids(ids, remap: dict[int, int]) -> np.ndarray:
    """Apply a cull remap to an id array."""
    ids = np.asarray(ids, dtype=np.int64)
    table = np.full(max(remap) + 1, -1, dtype=np.int64)
    for old, new in remap.items():
        table[old] = new
    out = table[ids]
    if (out < 0).any():
        bad = ids[out < 0][0]
        raise DataError(f"id {int(bad)} has no remap entry")
    return out
