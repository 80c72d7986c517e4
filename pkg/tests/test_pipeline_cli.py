import hashlib
import json

import numpy as np
import pytest

from dnaprep import (
    DnaSequence,
    MaskConfig,
    PipelineConfig,
    build_kmer_vocab,
    iter_windows,
    run_pipeline,
    select_targets,
)
from dnaprep.cli import main


@pytest.fixture
def vocab6_path(tmp_path):
    path = tmp_path / "vocab6.json"
    build_kmer_vocab(6).save(path)
    return str(path)


@pytest.fixture
def vocab3_path(tmp_path):
    path = tmp_path / "vocab3.json"
    build_kmer_vocab(3).save(path)
    return str(path)


def write_fasta(tmp_path, text, name="in.fa"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def read_jsonl(path):
    with open(path) as fh:
        return [json.loads(line) for line in fh]


def find_seed_selecting(vocab, n_tokens, want, p=0.11, max_seed=20000):
    """Smallest master seed whose ordinal-0 draw picks exactly ``want``."""
    toks = np.array(
        [vocab.special_id("CLS")] + list(range(1, n_tokens - 1)) + [vocab.special_id("SEP")]
    )
    for seed in range(max_seed):
        cfg = MaskConfig.for_vocab(vocab, p=p, master_seed=seed)
        if set(select_targets(toks, cfg, 0).tolist()) == want:
            return seed
    raise AssertionError("no seed found")


class TestWindows:
    def test_short_sequence_untouched(self):
        seqs = [DnaSequence("ACGT", "s")]
        assert [w.source_id for w in iter_windows(seqs, 10)] == ["s"]

    def test_long_sequence_split_with_spans(self):
        seqs = [DnaSequence("A" * 25, "s")]
        got = list(iter_windows(seqs, 10))
        assert [w.source_id for w in got] == ["s:0-10", "s:10-20", "s:20-25"]
        assert "".join(w.bases for w in got) == "A" * 25


class TestRunPipeline:
    def test_identical_invocations_identical_digests(self, tmp_path, vocab3_path):
        fasta = write_fasta(tmp_path, ">a\nACGTACGTTGCA\n>b\nTTGCAACG\n")
        digests = []
        for name in ("one.jsonl", "two.jsonl"):
            cfg = PipelineConfig(
                vocab_path=vocab3_path,
                fasta_path=fasta,
                out_path=str(tmp_path / name),
                master_seed=11,
            )
            digests.append(run_pipeline(cfg).output_digest)
        assert digests[0] == digests[1]

    def test_thread_count_invariance(self, tmp_path, vocab3_path):
        fasta = write_fasta(tmp_path, "".join(f">s{i}\nACGTACGTTGCAACGGATCC\n" for i in range(40)))
        outs = []
        for threads, name in ((1, "t1.jsonl"), (4, "t4.jsonl")):
            cfg = PipelineConfig(
                vocab_path=vocab3_path,
                fasta_path=fasta,
                out_path=str(tmp_path / name),
                master_seed=3,
                threads=threads,
                guiding=("ftm", "mst", "sop", "csp"),
            )
            outs.append(run_pipeline(cfg).output_digest)
        assert outs[0] == outs[1]

    def test_empty_fasta(self, tmp_path, vocab3_path):
        fasta = write_fasta(tmp_path, "")
        cfg = PipelineConfig(
            vocab_path=vocab3_path, fasta_path=fasta, out_path=str(tmp_path / "out.jsonl")
        )
        result = run_pipeline(cfg)
        assert result.n_records == 0
        assert (tmp_path / "out.jsonl").read_bytes() == b""
        manifest = json.loads((tmp_path / "out.jsonl.manifest.json").read_text())
        assert manifest["outputs"]["records"] == 0

    def test_manifest_reproducibility_fields(self, tmp_path, vocab3_path):
        fasta = write_fasta(tmp_path, ">a\nACGTACGT\n")
        cfg = PipelineConfig(
            vocab_path=vocab3_path, fasta_path=fasta, out_path=str(tmp_path / "out.jsonl")
        )
        result = run_pipeline(cfg)
        manifest = json.loads(open(result.manifest_path).read())
        assert manifest["tool"] == "dnaprep"
        assert manifest["config"]["master_seed"] == 0
        with open(fasta, "rb") as fh:
            assert manifest["inputs"]["fasta"] == hashlib.sha256(fh.read()).hexdigest()
        assert manifest["outputs"]["batch"] == result.output_digest

    def test_fixed_vs_flawed_crafted_diff(self, tmp_path, vocab6_path):
        # 10 bases -> 5 body tokens at k=6; a lone target at position 2
        # makes both modes mask the whole body, so the outputs differ
        # exactly at the wrongly masked [CLS] and in the label sets.
        vocab = build_kmer_vocab(6)
        seed = find_seed_selecting(vocab, n_tokens=7, want={2})
        fasta = write_fasta(tmp_path, ">x\nACGTACGTAC\n")
        records = {}
        for mode in ("fixed", "flawed"):
            cfg = PipelineConfig(
                vocab_path=vocab6_path,
                fasta_path=fasta,
                out_path=str(tmp_path / f"{mode}.jsonl"),
                mode=mode,
                master_seed=seed,
            )
            run_pipeline(cfg)
            records[mode] = read_jsonl(tmp_path / f"{mode}.jsonl")[0]
        fixed, flawed = records["fixed"], records["flawed"]
        assert fixed["m"] == flawed["m"] == [2]
        diff = [
            i
            for i, (a, b) in enumerate(zip(fixed["input_ids"], flawed["input_ids"]))
            if a != b
        ]
        assert diff == [0]  # only [CLS] differs
        assert flawed["input_ids"][0] == vocab.mask_id
        assert set(flawed["m_in"]) - set(fixed["m_in"]) == {0}
        assert sorted(map(int, fixed["labels"])) == [2]
        assert sorted(map(int, flawed["labels"])) == [0, 1, 2, 3, 4, 5]

    def test_guiding_payload(self, tmp_path, vocab3_path):
        fasta = write_fasta(tmp_path, ">a\nACGTACGTTGCA\n")
        cfg = PipelineConfig(
            vocab_path=vocab3_path,
            fasta_path=fasta,
            out_path=str(tmp_path / "g.jsonl"),
            guiding=("ftm", "mst", "sop", "csp"),
            master_seed=5,
        )
        run_pipeline(cfg)
        record = read_jsonl(tmp_path / "g.jsonl")[0]
        tasks = [entry["task"] for entry in record["guiding"]]
        assert tasks == ["ftm", "mst", "sop", "csp"]
        vocab = build_kmer_vocab(3)
        assert record["input_ids"][0] == vocab.mask_id  # MST masked [CLS]
        sop = record["guiding"][2]
        assert sop["label"] in (0, 1)
        csp = record["guiding"][3]
        assert not set(csp["positions"]) & set(record["m_in"])

    def test_ftm_requires_overlap(self, tmp_path):
        word_path = str(tmp_path / "word.json")
        build_kmer_vocab(3, kind="word").save(word_path)
        fasta = write_fasta(tmp_path, ">a\nACGTAC\n")
        cfg = PipelineConfig(
            vocab_path=word_path,
            fasta_path=fasta,
            out_path=str(tmp_path / "x.jsonl"),
            guiding=("ftm",),
        )
        from dnaprep import ConfigError

        with pytest.raises(ConfigError):
            run_pipeline(cfg)


class TestCli:
    def test_build_vocab_and_tokenize(self, tmp_path):
        vocab_path = str(tmp_path / "v.json")
        assert main(["build-vocab", "--kind", "kmer", "--k", "3", "--out", vocab_path]) == 0
        fasta = write_fasta(tmp_path, ">a\nACGTAC\n")
        out = str(tmp_path / "tok.jsonl")
        assert main(["tokenize", "--vocab", vocab_path, "--fasta", fasta, "--out", out]) == 0
        vocab = build_kmer_vocab(3)
        record = read_jsonl(out)[0]
        assert [vocab.tokens[i] for i in record["ids"]] == ["ACG", "CGT", "GTA", "TAC"]

    def test_build_vocab_bpe(self, tmp_path):
        fasta = write_fasta(tmp_path, ">a\n" + "ACGTACGT" * 40 + "\n")
        out = str(tmp_path / "bpe.json")
        assert main(["build-vocab", "--kind", "bpe", "--fasta", fasta, "--target-size", "8", "--out", out]) == 0
        from dnaprep import Vocabulary

        vocab = Vocabulary.load(out)
        assert vocab.kind == "bpe" and vocab.n_nonspecial == 8

    def test_mask_and_leakage_batch(self, tmp_path, vocab3_path, capsys):
        fasta = write_fasta(tmp_path, ">a\nACGTACGTTGCAACGT\n")
        out = str(tmp_path / "b.jsonl")
        assert main([
            "mask", "--vocab", vocab3_path, "--fasta", fasta, "--out", out, "--p", "0.5", "--seed", "4",
        ]) == 0
        capsys.readouterr()
        assert main(["leakage", "--k", "3", "--batch", out]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        payload = json.loads(lines[0])
        assert set(payload) == {"seq_id", "leakage_percent"}

    def test_leakage_closed_form(self, capsys):
        assert main(["leakage", "--k", "6", "--m", "6"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["ratio_percent"] == pytest.approx(100 * 5 / 6)

    def test_guide_subcommand(self, tmp_path, vocab3_path, capsys):
        fasta = write_fasta(tmp_path, ">a\nACGTACGTTGCA\n")
        out = str(tmp_path / "g.jsonl")
        assert main([
            "guide", "--vocab", vocab3_path, "--fasta", fasta, "--out", out, "--tasks", "csp,mst",
        ]) == 0
        record = read_jsonl(out)[0]
        assert [e["task"] for e in record["guiding"]] == ["mst", "csp"]

    def test_vocab_stats_and_cull(self, tmp_path, vocab3_path, capsys):
        fasta = write_fasta(tmp_path, ">a\nACGTACGTTGCAACGT\n")
        stats_out = str(tmp_path / "stats.csv")
        assert main(["vocab-stats", "--vocab", vocab3_path, "--fasta", fasta, "--out", stats_out]) == 0
        header = open(stats_out).readline().strip()
        assert header.startswith("token_id,token,frequency")
        culled_out = str(tmp_path / "culled.json")
        assert main(["cull", "--vocab", vocab3_path, "--remove", "0,1,2", "--out", culled_out]) == 0
        from dnaprep import Vocabulary

        culled = Vocabulary.load(culled_out)
        assert culled.cull_id is not None
        remap = json.loads(open(culled_out + ".remap.json").read())
        assert remap["0"] == culled.cull_id

    def test_cull_bound_exit_code(self, tmp_path, vocab3_path, capsys):
        ids = ",".join(str(i) for i in range(7))
        code = main(["cull", "--vocab", vocab3_path, "--remove", ids, "--out", str(tmp_path / "c.json")])
        assert code == 3
        err = capsys.readouterr().err
        assert json.loads(err)["error"] == "ConstraintError"

    def test_benchstats_cli(self, tmp_path, capsys):
        runs = tmp_path / "runs.csv"
        runs.write_text(
            "dataset_id,variant,seed,metric_value\n"
            + "\n".join(
                f"d{i},pretrained,{s},{70 + i + s * 0.01}" for i in range(4) for s in range(3)
            )
            + "\n"
            + "\n".join(f"d{i},baseline:cnn,0,{60 + i}" for i in range(4))
            + "\n"
        )
        scaling = tmp_path / "scaling.csv"
        scaling.write_text(
            "dataset_id,pretrain_size,metric_value\n"
            + "\n".join(f"d{i},{10**x},{50 + x}" for i in range(4) for x in (1, 2, 3))
            + "\n"
        )
        report_out = str(tmp_path / "report.json")
        code = main([
            "benchstats", "--runs", str(runs), "--scaling", str(scaling), "--out", report_out,
        ])
        assert code == 0
        table = capsys.readouterr().out
        assert "selected:" in table
        payload = json.loads(open(report_out).read())
        assert set(payload["datasets"]) == {"d0", "d1", "d2", "d3"}

    def test_usage_error_exit_1(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["mask", "--vocab"])  # missing value
        assert exc.value.code == 1

    def test_data_error_exit_2(self, tmp_path, vocab3_path, capsys):
        fasta = write_fasta(tmp_path, ">a\nAXGT\n")
        code = main(["mask", "--vocab", vocab3_path, "--fasta", fasta, "--out", str(tmp_path / "o.jsonl")])
        assert code == 2

    def test_env_seed_override(self, tmp_path, vocab3_path, monkeypatch):
        fasta = write_fasta(tmp_path, ">a\nACGTACGTTGCA\n")
        out_a = str(tmp_path / "a.jsonl")
        out_b = str(tmp_path / "b.jsonl")
        monkeypatch.setenv("DNAPREP_SEED", "777")
        assert main(["mask", "--vocab", vocab3_path, "--fasta", fasta, "--out", out_a]) == 0
        monkeypatch.delenv("DNAPREP_SEED")
        assert main(["mask", "--vocab", vocab3_path, "--fasta", fasta, "--out", out_b, "--seed", "777"]) == 0
        assert open(out_a, "rb").read() == open(out_b, "rb").read()
