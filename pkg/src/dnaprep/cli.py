"""Command-line surface.

Subcommands: build-vocab, tokenize, mask, guide, leakage, vocab-stats,
cull, benchstats. Exit codes: 0 ok, 1 usage error, 2 data error,
3 constraint violation. ``DNAPREP_SEED`` and ``DNAPREP_THREADS``
override the corresponding flags when those are left at their defaults.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__
from .benchstats import criteria_report, load_runs_csv, load_scaling_csv
from .core import BPE, KMER, WORD, Vocabulary, build_kmer_vocab
from .errors import ConfigError, DnaPrepError
from .fasta import read_fasta
from .guiding import GUIDING_TASKS
from .leakage import empirical_plan_leakage, leakage_report
from .masking import MASK_MODES, MODE_FIXED, MaskPlan
from .pipeline import PipelineConfig, iter_windows, run_pipeline
from .tokenizers import N_MODE_AS_UNK, N_MODES, TokenizerSpec, bpe_train, tokenize
from .vocabstats import (
    CullSpec,
    bucket_tokens,
    compute_token_stats,
    cull_vocab,
    load_accuracy_csv,
    write_stats_csv,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_CONSTRAINT = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # noqa: D401 - argparse hook
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _env_int(name: str, default: int) -> int:
    value = os.environ.get(name)
    return int(value) if value else default


def _add_pipeline_args(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--vocab", required=True, help="vocabulary JSON file")
    sub.add_argument("--fasta", required=True, help="input FASTA (.gz accepted)")
    sub.add_argument("--out", required=True, help="output JSONL batch file")
    sub.add_argument("--n-mode", choices=N_MODES, default=N_MODE_AS_UNK)
    sub.add_argument("--no-sentinels", action="store_true", help="do not wrap records in CLS/SEP")
    sub.add_argument("--p", type=float, default=0.11, help="masking probability")
    sub.add_argument("--mode", choices=MASK_MODES, default=MODE_FIXED)
    sub.add_argument("--seed", type=int, default=None, help="master seed (env DNAPREP_SEED)")
    sub.add_argument("--window", type=int, default=512, help="max window length in bases")
    sub.add_argument("--threads", type=int, default=None, help="worker threads (env DNAPREP_THREADS)")


def _pipeline_config(args: argparse.Namespace, guiding: tuple[str, ...]) -> PipelineConfig:
    seed = args.seed if args.seed is not None else _env_int("DNAPREP_SEED", 0)
    threads = args.threads if args.threads is not None else _env_int("DNAPREP_THREADS", 1)
    return PipelineConfig(
        vocab_path=args.vocab,
        fasta_path=args.fasta,
        out_path=args.out,
        n_mode=args.n_mode,
        add_sentinels=not args.no_sentinels,
        p=args.p,
        mode=args.mode,
        master_seed=seed,
        guiding=guiding,
        sop_reverse_prob=getattr(args, "sop_prob", 0.01),
        window=args.window,
        threads=threads,
    )


def build_parser() -> _Parser:
    parser = _Parser(prog="dnaprep", description=__doc__)
    parser.add_argument("--version", action="version", version=f"dnaprep {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("build-vocab", parents=[], help="construct a vocabulary file")
    p.add_argument("--kind", choices=(KMER, WORD, BPE), required=True)
    p.add_argument("--k", type=int, help="token width for kmer/word vocabularies")
    p.add_argument("--include-n-tokens", action="store_true")
    p.add_argument("--fasta", help="training corpus (BPE only)")
    p.add_argument("--target-size", type=int, help="non-special vocabulary size (BPE only)")
    p.add_argument("--out", required=True)

    p = subs.add_parser("tokenize", help="encode FASTA records to token ids")
    p.add_argument("--vocab", required=True)
    p.add_argument("--fasta", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--n-mode", choices=N_MODES, default=N_MODE_AS_UNK)
    p.add_argument("--sentinels", action="store_true", help="wrap each record in CLS/SEP")
    p.add_argument("--window", type=int, default=0, help="split long records (0 = never)")

    p = subs.add_parser("mask", help="generate masked-prediction batches")
    _add_pipeline_args(p)

    p = subs.add_parser("guide", help="mask and attach guiding-task targets")
    _add_pipeline_args(p)
    p.add_argument(
        "--tasks",
        default="csp",
        help=f"comma-separated subset of {','.join(GUIDING_TASKS)}",
    )
    p.add_argument("--sop-prob", type=float, default=0.01, help="SOP swap probability")

    p = subs.add_parser("leakage", help="leakage analysis, closed-form or per batch")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--m", type=int, help="consecutive masked-token count")
    p.add_argument("--batch", help="batch JSONL: stream per-record leakage instead")

    p = subs.add_parser("vocab-stats", help="token frequency/entropy table")
    p.add_argument("--vocab", required=True)
    p.add_argument("--fasta", required=True)
    p.add_argument("--out", required=True, help="output CSV")
    p.add_argument("--n-mode", choices=N_MODES, default=N_MODE_AS_UNK)
    p.add_argument("--accuracy", help="token_id,accuracy CSV for bucketing")

    p = subs.add_parser("cull", help="prune tokens into a [CULL]-bearing vocabulary")
    p.add_argument("--vocab", required=True)
    p.add_argument("--remove", required=True, help="comma-separated token ids, or @file with one id per line")
    p.add_argument("--out", required=True)

    p = subs.add_parser("benchstats", help="stability/validity gate over run tables")
    p.add_argument("--runs", required=True)
    p.add_argument("--scaling")
    p.add_argument("--sigma-threshold", type=float, default=None)
    p.add_argument("--r2-min", type=float, default=0.4)
    p.add_argument("--std", choices=("sample", "population"), default="sample")
    p.add_argument("--out", help="write the JSON report here as well")

    return parser


def _cmd_build_vocab(args) -> int:
    if args.kind in (KMER, WORD):
        if args.k is None:
            raise ConfigError("--k is required for kmer/word vocabularies")
        vocab = build_kmer_vocab(args.k, include_n_tokens=args.include_n_tokens, kind=args.kind)
    else:
        if not args.fasta or not args.target_size:
            raise ConfigError("--fasta and --target-size are required for BPE training")
        vocab = bpe_train(read_fasta(args.fasta), args.target_size)
    vocab.save(args.out)
    return EXIT_OK


def _cmd_tokenize(args) -> int:
    vocab = Vocabulary.load(args.vocab)
    spec = TokenizerSpec(vocab, n_mode=args.n_mode, add_sentinels=args.sentinels)
    seqs = read_fasta(args.fasta)
    if args.window:
        seqs = iter_windows(seqs, args.window)
    with open(args.out, "wb") as out:
        for seq in seqs:
            record = {"seq_id": seq.source_id, "ids": tokenize(seq, spec).tolist()}
            out.write((json.dumps(record, separators=(",", ":")) + "\n").encode())
    return EXIT_OK


def _cmd_mask(args, tasks: tuple[str, ...] = ()) -> int:
    result = run_pipeline(_pipeline_config(args, tasks))
    print(f"{result.n_records} records -> {result.out_path} (sha256 {result.output_digest[:16]})")
    return EXIT_OK


def _cmd_guide(args) -> int:
    tasks = tuple(t.strip() for t in args.tasks.split(",") if t.strip())
    return _cmd_mask(args, tasks)


def _cmd_leakage(args) -> int:
    if args.batch:
        with open(args.batch, "rb") as fh:
            for line in fh:
                record = json.loads(line)
                plan = _plan_from_record(record)
                out = {
                    "seq_id": record.get("seq_id"),
                    "leakage_percent": empirical_plan_leakage(plan, args.k),
                }
                print(json.dumps(out, separators=(",", ":")))
        return EXIT_OK
    if args.m is None:
        raise ConfigError("either --m or --batch is required")
    print(json.dumps(leakage_report(args.k, args.m).to_dict(), indent=2))
    return EXIT_OK


def _plan_from_record(record: dict) -> MaskPlan:
    import numpy as np

    ids = np.asarray(record["input_ids"], dtype=np.int64)
    return MaskPlan(
        input_ids=ids,
        m_positions=tuple(record["m"]),
        m_in_positions=tuple(record["m_in"]),
        labels={int(k): v for k, v in record["labels"].items()},
        original_ids=ids,
        special_positions=frozenset(),
    )


def _cmd_vocab_stats(args) -> int:
    vocab = Vocabulary.load(args.vocab)
    spec = TokenizerSpec(vocab, n_mode=args.n_mode)
    accuracy = load_accuracy_csv(args.accuracy, vocab) if args.accuracy else None
    stats = compute_token_stats(read_fasta(args.fasta), spec, accuracy=accuracy)
    buckets = bucket_tokens(stats) if accuracy else None
    write_stats_csv(args.out, stats, buckets)
    return EXIT_OK


def _cmd_cull(args) -> int:
    vocab = Vocabulary.load(args.vocab)
    if args.remove.startswith("@"):
        with open(args.remove[1:]) as fh:
            ids = [int(line) for line in fh if line.strip()]
    else:
        ids = [int(part) for part in args.remove.split(",") if part.strip()]
    culled, remap = cull_vocab(vocab, CullSpec(frozenset(ids)))
    culled.save(args.out)
    with open(args.out + ".remap.json", "w") as fh:
        json.dump({str(k): v for k, v in sorted(remap.items())}, fh, indent=1)
        fh.write("\n")
    return EXIT_OK


def _cmd_benchstats(args) -> int:
    runs = load_runs_csv(args.runs)
    scaling = load_scaling_csv(args.scaling) if args.scaling else ()
    report = criteria_report(
        runs,
        scaling,
        sigma_threshold=args.sigma_threshold,
        r2_min=args.r2_min,
        estimator=args.std,
    )
    print(report.to_table())
    print(f"selected: {', '.join(report.selected) if report.selected else '(none)'}")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(report.to_json() + "\n")
    return EXIT_OK


_COMMANDS = {
    "build-vocab": _cmd_build_vocab,
    "tokenize": _cmd_tokenize,
    "mask": _cmd_mask,
    "guide": _cmd_guide,
    "leakage": _cmd_leakage,
    "vocab-stats": _cmd_vocab_stats,
    "cull": _cmd_cull,
    "benchstats": _cmd_benchstats,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except BrokenPipeError:
        # downstream consumer closed (e.g. piping into head); not an error
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return EXIT_OK
    except DnaPrepError as exc:
        _report_error(exc)
        return getattr(exc, "exit_code", EXIT_DATA)
    except ValueError as exc:
        _report_error(exc)
        return EXIT_DATA
    except OSError as exc:
        _report_error(exc)
        return EXIT_DATA


def _report_error(exc: Exception) -> None:
    payload = {"error": type(exc).__name__, "message": str(exc)}
    print(json.dumps(payload), file=sys.stderr)


if __name__ == "__main__":
    raise SystemExit(main())
