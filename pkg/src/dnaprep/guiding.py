"""Auxiliary supervision targets attached to a masking plan.

Four guiding tasks are generated:

* FTM ("frozen tokens melt") labels the neighbor positions that were
  masked purely to prevent leakage -- the input-masked set minus the
  prediction targets. Only meaningful for overlapping tokenizers.
* MST ("masking special token") additionally masks every special token
  in the input and labels those positions with the original special ids.
* SOP ("sentence order prediction") swaps the two halves of the
  non-special token span with a configured probability and emits the
  binary swap label.
* CSP ("complementary strand prediction") labels every strictly unmasked
  non-special position with the reverse complement of its token; labels
  live in the parallel RC label space.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Vocabulary
from .errors import ConfigError
from .masking import MODE_FIXED, MaskPlan

TASK_FTM = "ftm"
TASK_MST = "mst"
TASK_SOP = "sop"
TASK_CSP = "csp"
GUIDING_TASKS = (TASK_FTM, TASK_MST, TASK_SOP, TASK_CSP)

LABEL_SPACE_V = "vocab"
LABEL_SPACE_RC = "rc_vocab"
LABEL_SPACE_BINARY = "binary"


@dataclass
class GuidingTargets:
    task: str
    positions: tuple[int, ...]
    labels: dict[int, int] | None
    label: int | None
    label_space: str


def ftm_targets(plan: MaskPlan) -> GuidingTargets:
    """Label the leakage-prevention neighbors: input-masked minus targets."""
    if plan.mode != MODE_FIXED:
        raise ConfigError("FTM targets are defined for fixed-mode plans only")
    if plan.k < 2:
        raise ConfigError("FTM requires an overlapping tokenizer (k >= 2)")
    positions = tuple(sorted(set(plan.m_in_positions) - set(plan.m_positions)))
    return GuidingTargets(
        task=TASK_FTM,
        positions=positions,
        labels={p: int(plan.original_ids[p]) for p in positions},
        label=None,
        label_space=LABEL_SPACE_V,
    )


def mst_apply(tokens, plan: MaskPlan) -> tuple[np.ndarray, GuidingTargets]:
    """Mask every special position in the plan's input and label it.

    Returns the updated input ids and the targets; a sequence without
    special tokens yields empty targets.
    """
    tokens = np.asarray(tokens, dtype=np.int64)
    positions = tuple(sorted(plan.special_positions))
    updated = plan.input_ids.copy()
    for pos in positions:
        updated[pos] = plan.mask_id
    targets = GuidingTargets(
        task=TASK_MST,
        positions=positions,
        labels={p: int(tokens[p]) for p in positions},
        label=None,
        label_space=LABEL_SPACE_V,
    )
    return updated, targets


def sop_transform(tokens, reverse_prob: float, rng, special_ids=frozenset()) -> tuple[np.ndarray, int]:
    """Swap the two halves of the non-special span with probability ``reverse_prob``.

    The span is split at floor(len/2) and the halves exchanged; sentinels
    keep their positions. Fewer than two non-special tokens is an
    identity transform with label 0.
    """
    if not 0.0 <= reverse_prob <= 1.0:
        raise ConfigError(f"reverse_prob must be in [0, 1], got {reverse_prob}")
    tokens = np.asarray(tokens, dtype=np.int64)
    out = tokens.copy()
    if special_ids:
        body = np.flatnonzero(~np.isin(tokens, np.fromiter(special_ids, dtype=np.int64)))
    else:
        body = np.arange(tokens.size)
    if body.size < 2 or rng.random() >= reverse_prob:
        return out, 0
    half = body.size // 2
    order = np.concatenate((body[half:], body[:half]))
    out[body] = tokens[order]
    return out, 1


def csp_targets(plan: MaskPlan, vocab: Vocabulary) -> GuidingTargets:
    """Label every strictly unmasked non-special position with its RC token."""
    n = plan.input_ids.size
    excluded = set(plan.m_in_positions) | plan.special_positions
    positions = tuple(p for p in range(n) if p not in excluded)
    return GuidingTargets(
        task=TASK_CSP,
        positions=positions,
        labels={p: vocab.rc_label(int(plan.original_ids[p])) for p in positions},
        label=None,
        label_space=LABEL_SPACE_RC,
    )
