"""Neighbor-masking plans for masked-token-prediction pretraining data.

Two modes are provided:

* ``fixed`` -- the corrected strategy: a target token is masked together
  with every non-special token within distance k-1 (the positions whose
  k-mers share nucleotides with it), special tokens are never masked, and
  only the originally selected targets are labeled;
* ``flawed`` -- a faithful replication of the historical buggy
  implementation: the neighborhood offsets are ``1-floor(k/2) ..
  k-floor(k/2)``, neighbor masking does not skip special tokens, and
  every input-masked position is labeled.

All randomness derives from (master_seed, sequence ordinal), so plans are
byte-identical regardless of how many worker threads produce them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import Vocabulary
from .errors import ConfigError

MODE_FIXED = "fixed"
MODE_FLAWED = "flawed"
MASK_MODES = (MODE_FIXED, MODE_FLAWED)


@dataclass(frozen=True)
class MaskConfig:
    """Masking parameters plus the vocabulary facts the ops need."""

    p: float = 0.11
    k: int = 1
    mode: str = MODE_FIXED
    master_seed: int = 0
    special_ids: frozenset[int] = frozenset()
    mask_id: int = -1

    def __post_init__(self) -> None:
        if not 0.0 <= self.p <= 1.0:
            raise ConfigError(f"masking probability must be in [0, 1], got {self.p}")
        if self.k < 1:
            raise ConfigError(f"neighborhood parameter k must be >= 1, got {self.k}")
        if self.mode not in MASK_MODES:
            raise ConfigError(f"unknown masking mode {self.mode!r}")

    @classmethod
    def for_vocab(
        cls,
        vocab: Vocabulary,
        p: float = 0.11,
        mode: str = MODE_FIXED,
        master_seed: int = 0,
    ) -> "MaskConfig":
        """Derive k (1 for word/BPE), the special ids, and the MASK id."""
        k = vocab.k if vocab.kind == "kmer" else 1
        return cls(
            p=p,
            k=k,
            mode=mode,
            master_seed=master_seed,
            special_ids=vocab.special_ids,
            mask_id=vocab.mask_id,
        )


@dataclass
class MaskPlan:
    """One sequence's masking outcome.

    ``m_positions`` are the prediction targets selected first;
    ``m_in_positions`` is the (larger) set recorded as input-masked after
    neighbor expansion. ``labels`` maps every labeled position to the
    original token id: the key set equals ``m_positions`` in fixed mode
    and ``m_in_positions`` in flawed mode (that equality is the historical
    bug). In fixed mode, and in flawed mode with k >= 2, every position in
    ``m_in_positions`` carries MASK in ``input_ids``; flawed mode with
    k = 1 replicates the printed loop exactly, which leaves the selected
    target itself unmasked.
    """

    input_ids: np.ndarray
    m_positions: tuple[int, ...]
    m_in_positions: tuple[int, ...]
    labels: dict[int, int]
    original_ids: np.ndarray = field(repr=False)
    special_positions: frozenset[int] = field(repr=False)
    mode: str = MODE_FIXED
    k: int = 1
    mask_id: int = -1


def _special_mask(tokens: np.ndarray, cfg: MaskConfig) -> np.ndarray:
    if not cfg.special_ids:
        return np.zeros(tokens.size, dtype=bool)
    return np.isin(tokens, np.fromiter(cfg.special_ids, dtype=np.int64))


def _cover(n: int, centers: np.ndarray, lo: int, hi: int) -> np.ndarray:
    """Boolean array marking positions within [c+lo, c+hi] of any center."""
    hits = np.zeros(n + 1, dtype=np.int64)
    starts = np.clip(centers + lo, 0, n)
    stops = np.clip(centers + hi + 1, 0, n)
    np.add.at(hits, starts, 1)
    np.add.at(hits, stops, -1)
    return np.cumsum(hits[:n]) > 0


def select_targets(tokens, cfg: MaskConfig, seq_ordinal: int) -> np.ndarray:
    """Independently select each non-special position with probability p.

    The RNG stream is derived from (master_seed, seq_ordinal), so the
    same sequence at the same ordinal always draws the same targets.
    """
    tokens = np.asarray(tokens, dtype=np.int64)
    rng = np.random.default_rng((cfg.master_seed, seq_ordinal))
    draws = rng.random(tokens.size)
    picked = (draws < cfg.p) & ~_special_mask(tokens, cfg)
    return np.flatnonzero(picked)


def neighbor_mask(tokens, m_positions, cfg: MaskConfig) -> MaskPlan:
    """Expand targets to their overlap neighborhood and build the plan."""
    tokens = np.asarray(tokens, dtype=np.int64)
    n = tokens.size
    special = _special_mask(tokens, cfg)
    centers = np.asarray(sorted(int(p) for p in m_positions), dtype=np.int64)
    centers = centers[~special[centers]] if centers.size else centers
    k = cfg.k

    if cfg.mode == MODE_FIXED:
        in_mask = _cover(n, centers, -(k - 1), k - 1) & ~special if centers.size else np.zeros(n, dtype=bool)
        masked = in_mask
        label_positions = centers
    else:
        lo = 1 - k // 2
        hi = k - k // 2
        masked = _cover(n, centers, lo, hi) if centers.size else np.zeros(n, dtype=bool)
        in_mask = masked.copy()
        in_mask[centers] = True  # the algorithm seeds M_in with M itself
        label_positions = np.flatnonzero(in_mask)

    input_ids = tokens.copy()
    input_ids[masked] = cfg.mask_id
    m_in = np.flatnonzero(in_mask)
    return MaskPlan(
        input_ids=input_ids,
        m_positions=tuple(int(p) for p in centers),
        m_in_positions=tuple(int(p) for p in m_in),
        labels={int(p): int(tokens[p]) for p in label_positions},
        original_ids=tokens,
        special_positions=frozenset(int(p) for p in np.flatnonzero(special)),
        mode=cfg.mode,
        k=k,
        mask_id=cfg.mask_id,
    )


def verify_no_leakage(plan: MaskPlan, k: int) -> bool:
    """Check the zero-leakage condition over a plan's labeled targets.

    True iff every non-special position within distance k-1 of any
    labeled target is input-masked, and (fixed mode) no labeled position
    lies outside the selected target set.
    """
    targets = np.asarray(sorted(plan.labels), dtype=np.int64)
    if plan.mode == MODE_FIXED and not set(plan.labels) <= set(plan.m_positions):
        return False
    if targets.size == 0:
        return True
    n = plan.input_ids.size
    needed = _cover(n, targets, -(k - 1), k - 1)
    special = np.zeros(n, dtype=bool)
    if plan.special_positions:
        special[np.fromiter(plan.special_positions, dtype=np.int64)] = True
    in_mask = np.zeros(n, dtype=bool)
    if plan.m_in_positions:
        in_mask[np.asarray(plan.m_in_positions, dtype=np.int64)] = True
    return bool(np.all(~needed | special | in_mask))
