"""End-to-end batch generation: tokenize, mask, attach guiding targets.

One JSONL record is emitted per window (sequences longer than the window
length are split before masking, each window keeping its own record).
Output is byte-identical for identical (inputs, config, seed) regardless
of worker-thread count: every random draw derives from (master_seed,
window ordinal), windows are processed in input order, and the record
field order is fixed.

Each run also writes ``<output>.manifest.json`` echoing the resolved
configuration, the tool version, and content digests of inputs and
output, so any artifact can be reproduced exactly.
"""

from __future__ import annotations

import hashlib
import json
import os
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Iterable, Iterator

import numpy as np

from . import __version__
from .core import DnaSequence, Vocabulary
from .errors import ConfigError
from .guiding import (
    GUIDING_TASKS,
    TASK_CSP,
    TASK_FTM,
    TASK_MST,
    TASK_SOP,
    GuidingTargets,
    csp_targets,
    ftm_targets,
    mst_apply,
    sop_transform,
)
from .masking import MODE_FIXED, MaskConfig, neighbor_mask, select_targets
from .tokenizers import N_MODE_AS_UNK, TokenizerSpec, tokenize

_SOP_STREAM = 1  # sub-stream tag so SOP draws never collide with masking draws


@dataclass
class PipelineConfig:
    """Resolved settings for one batch-generation run."""

    vocab_path: str
    fasta_path: str
    out_path: str
    n_mode: str = N_MODE_AS_UNK
    add_sentinels: bool = True
    p: float = 0.11
    mode: str = MODE_FIXED
    master_seed: int = 0
    guiding: tuple[str, ...] = ()
    sop_reverse_prob: float = 0.01
    window: int = 512
    threads: int = 1

    def __post_init__(self) -> None:
        self.guiding = tuple(self.guiding)
        unknown = [t for t in self.guiding if t not in GUIDING_TASKS]
        if unknown:
            raise ConfigError(f"unknown guiding tasks: {unknown}")
        if self.window < 1:
            raise ConfigError(f"window must be >= 1, got {self.window}")
        if self.threads < 1:
            raise ConfigError(f"threads must be >= 1, got {self.threads}")


@dataclass
class PipelineResult:
    out_path: str
    manifest_path: str
    n_records: int
    output_digest: str
    manifest: dict = field(repr=False)


def iter_windows(seqs: Iterable[DnaSequence], window: int) -> Iterator[DnaSequence]:
    """Split sequences into fixed-size windows, ids marking the span."""
    for seq in seqs:
        if len(seq.bases) <= window:
            yield seq
            continue
        for start in range(0, len(seq.bases), window):
            piece = seq.bases[start : start + window]
            yield DnaSequence(piece, source_id=f"{seq.source_id}:{start}-{start + len(piece)}")


def _guiding_entry(targets: GuidingTargets) -> dict:
    entry: dict = {"task": targets.task}
    if targets.label is not None:
        entry["label"] = targets.label
    else:
        entry["positions"] = list(targets.positions)
        entry["labels"] = {str(p): targets.labels[p] for p in sorted(targets.labels)}
    return entry


def build_record(
    seq: DnaSequence,
    ordinal: int,
    spec: TokenizerSpec,
    mask_cfg: MaskConfig,
    cfg: PipelineConfig,
) -> dict:
    """Produce one batch record; pure function of its arguments."""
    ids = tokenize(seq, spec)
    guiding: list[dict] = []
    sop_entry = None
    if TASK_SOP in cfg.guiding:
        rng = np.random.default_rng((cfg.master_seed, ordinal, _SOP_STREAM))
        ids, label = sop_transform(
            ids, cfg.sop_reverse_prob, rng, special_ids=mask_cfg.special_ids
        )
        sop_entry = {"task": TASK_SOP, "label": label}
    targets = select_targets(ids, mask_cfg, ordinal)
    plan = neighbor_mask(ids, targets, mask_cfg)
    input_ids = plan.input_ids
    if TASK_FTM in cfg.guiding:
        guiding.append(_guiding_entry(ftm_targets(plan)))
    if TASK_MST in cfg.guiding:
        input_ids, mst = mst_apply(ids, plan)
        guiding.append(_guiding_entry(mst))
    if sop_entry is not None:
        guiding.append(sop_entry)
    if TASK_CSP in cfg.guiding:
        guiding.append(_guiding_entry(csp_targets(plan, spec.vocab)))
    return {
        "seq_id": seq.source_id,
        "input_ids": input_ids.tolist(),
        "m_in": list(plan.m_in_positions),
        "m": list(plan.m_positions),
        "labels": {str(p): plan.labels[p] for p in sorted(plan.labels)},
        "guiding": guiding,
    }


def _sha256(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


def run_pipeline(cfg: PipelineConfig, sequences: Iterable[DnaSequence] | None = None) -> PipelineResult:
    """Generate the batch file and its manifest.

    ``sequences`` defaults to streaming ``cfg.fasta_path``; passing an
    iterable directly is the library entry point.
    """
    vocab = Vocabulary.load(cfg.vocab_path)
    spec = TokenizerSpec(vocab, n_mode=cfg.n_mode, add_sentinels=cfg.add_sentinels)
    mask_cfg = MaskConfig.for_vocab(
        vocab, p=cfg.p, mode=cfg.mode, master_seed=cfg.master_seed
    )
    if TASK_FTM in cfg.guiding:
        if mask_cfg.k < 2:
            raise ConfigError("FTM requires an overlapping tokenizer (k >= 2)")
        if cfg.mode != MODE_FIXED:
            raise ConfigError("FTM requires fixed-mode masking")
    if sequences is None:
        from .fasta import read_fasta

        sequences = read_fasta(cfg.fasta_path)
    windows = enumerate(iter_windows(sequences, cfg.window))

    def work(item: tuple[int, DnaSequence]) -> bytes:
        ordinal, seq = item
        record = build_record(seq, ordinal, spec, mask_cfg, cfg)
        return (json.dumps(record, separators=(",", ":")) + "\n").encode("utf-8")

    n_records = 0
    with open(cfg.out_path, "wb") as out:
        if cfg.threads > 1:
            # Bounded look-ahead keeps memory independent of corpus size
            # while results are still written in input order.
            with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
                pending: deque = deque()
                for item in windows:
                    pending.append(pool.submit(work, item))
                    if len(pending) >= cfg.threads * 4:
                        out.write(pending.popleft().result())
                        n_records += 1
                while pending:
                    out.write(pending.popleft().result())
                    n_records += 1
        else:
            for item in windows:
                out.write(work(item))
                n_records += 1

    manifest = {
        "tool": "dnaprep",
        "version": __version__,
        "config": asdict(cfg),
        "inputs": {
            "vocab": _sha256(cfg.vocab_path),
            "fasta": _sha256(cfg.fasta_path) if os.path.exists(cfg.fasta_path) else None,
        },
        "outputs": {"batch": _sha256(cfg.out_path), "records": n_records},
    }
    manifest_path = cfg.out_path + ".manifest.json"
    with open(manifest_path, "wb") as fh:
        fh.write((json.dumps(manifest, indent=2) + "\n").encode("utf-8"))
    return PipelineResult(
        out_path=cfg.out_path,
        manifest_path=manifest_path,
        n_records=n_records,
        output_digest=manifest["outputs"]["batch"],
        manifest=manifest,
    )
