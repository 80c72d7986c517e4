import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dnaprep import (
    DataError,
    ConfigError,
    DnaSequence,
    build_kmer_vocab,
    rc_label,
    reverse_complement,
)
from dnaprep.core import CULL_TOKEN, SPECIAL_TOKENS, Vocabulary, bpe_vocab_from_merges

dna = st.text(alphabet="ACGTN", max_size=200)


class TestDnaSequence:
    def test_uppercases_input(self):
        assert DnaSequence("acgTn").bases == "ACGTN"

    def test_rejects_bad_byte_with_offset(self):
        with pytest.raises(DataError, match=r"b'X' at offset 2"):
            DnaSequence("ACXGT")

    def test_rejects_non_ascii(self):
        with pytest.raises(DataError):
            DnaSequence("ACéGT")

    def test_empty_is_legal(self):
        assert len(DnaSequence("")) == 0


class TestReverseComplement:
    def test_atcg(self):
        assert reverse_complement(DnaSequence("ATCG")).bases == "CGAT"

    def test_empty(self):
        assert reverse_complement(DnaSequence("")).bases == ""

    def test_n_maps_to_n(self):
        assert reverse_complement(DnaSequence("ANT")).bases == "ANT"

    @given(dna)
    def test_involution(self, bases):
        seq = DnaSequence(bases)
        assert reverse_complement(reverse_complement(seq)).bases == seq.bases

    def test_gattaca(self):
        seq = DnaSequence("GATTACA")
        assert reverse_complement(reverse_complement(seq)).bases == "GATTACA"


class TestKmerVocab:
    @pytest.mark.parametrize("k,count", [(1, 4), (3, 64), (6, 4096)])
    def test_nonspecial_counts(self, k, count):
        assert build_kmer_vocab(k).n_nonspecial == count

    def test_lexicographic_order(self):
        vocab = build_kmer_vocab(2)
        assert vocab.tokens[:4] == ("AA", "AC", "AG", "AT")
        assert vocab.tokens[15] == "TT"

    def test_k_out_of_range(self):
        with pytest.raises(ConfigError):
            build_kmer_vocab(0)
        with pytest.raises(ConfigError):
            build_kmer_vocab(13)

    def test_n_tokens_longest_first(self):
        vocab = build_kmer_vocab(3, include_n_tokens=True)
        assert vocab.n_run_tokens() == ("NNN", "NN", "N")
        assert vocab.n_nonspecial == 64 + 3

    def test_specials_occupy_tail(self):
        vocab = build_kmer_vocab(2)
        assert sorted(vocab.specials.values()) == list(range(16, 21))
        for name, sid in vocab.specials.items():
            assert vocab.tokens[sid] == SPECIAL_TOKENS[name]


class TestRcLabel:
    def test_single_nucleotide(self):
        vocab = build_kmer_vocab(1)
        assert rc_label(vocab.id_of("A"), vocab) == vocab.id_of("T")

    def test_k3(self):
        vocab = build_kmer_vocab(3)
        assert vocab.tokens[rc_label(vocab.id_of("ATC"), vocab)] == "GAT"

    def test_involution_over_all_ids(self):
        vocab = build_kmer_vocab(3)
        ids = np.arange(vocab.n_nonspecial)
        mapped = np.array([vocab.rc_label(int(i)) for i in ids])
        assert sorted(mapped) == list(ids)  # permutation
        assert all(vocab.rc_label(int(m)) == i for i, m in zip(ids, mapped))

    def test_special_rejected(self):
        vocab = build_kmer_vocab(2)
        with pytest.raises(ValueError):
            vocab.rc_label(vocab.special_id("CLS"))

    def test_bpe_labels_parallel_space(self):
        vocab = bpe_vocab_from_merges([("A", "T"), ("AT", "C")])
        assert vocab.rc_label(vocab.id_of("ATC")) == vocab.id_of("ATC")

    def test_fixed_points_are_rc_palindromes(self):
        vocab = build_kmer_vocab(2)
        from dnaprep.core import rc_string

        for i in range(vocab.n_nonspecial):
            tok = vocab.tokens[i]
            assert (vocab.rc_label(i) == i) == (rc_string(tok) == tok)


class TestSerialization:
    def test_round_trip_bytes_exact(self, tmp_path):
        vocab = build_kmer_vocab(3, include_n_tokens=True)
        path = tmp_path / "vocab.json"
        vocab.save(path)
        loaded = Vocabulary.load(path)
        assert loaded == vocab
        again = tmp_path / "again.json"
        loaded.save(again)
        assert path.read_bytes() == again.read_bytes()

    def test_lf_endings_and_format_version(self, tmp_path):
        vocab = build_kmer_vocab(1)
        path = tmp_path / "v.json"
        vocab.save(path)
        data = path.read_bytes()
        assert b"\r" not in data
        assert json.loads(data)["format_version"] == 1

    def test_bpe_round_trip_keeps_merge_order(self, tmp_path):
        vocab = bpe_vocab_from_merges([("A", "T"), ("C", "G"), ("AT", "CG")])
        path = tmp_path / "bpe.json"
        vocab.save(path)
        assert Vocabulary.load(path).merges == vocab.merges

    def test_rejects_duplicate_tokens(self):
        with pytest.raises(DataError):
            Vocabulary(kind="bpe", tokens=("A", "A"), specials={})

    def test_cull_must_not_be_special(self):
        toks = ("A", "C", "G", "T", CULL_TOKEN)
        with pytest.raises(DataError):
            Vocabulary(kind="bpe", tokens=toks, specials={"CULL": 4})
