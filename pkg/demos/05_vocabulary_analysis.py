"""Token statistics, importance bucketing, and vocabulary culling.

Run: python demos/05_vocabulary_analysis.py
"""

import numpy as np

from dnaprep import (
    CullSpec,
    DnaSequence,
    TokenizerSpec,
    bucket_tokens,
    build_kmer_vocab,
    compute_token_stats,
    cull_vocab,
    kmer_tokenize,
)

rng = np.random.default_rng(4)
# A corpus with deliberately skewed composition so frequencies spread out.
corpus = [
    DnaSequence("".join(rng.choice(list("ACGT"), p=[0.4, 0.3, 0.2, 0.1], size=800)))
    for _ in range(5)
]

vocab = build_kmer_vocab(2)
spec = TokenizerSpec(vocab)
stats = compute_token_stats(corpus, spec)

print("token frequency / successor entropy (bits):")
for row in sorted(stats[: vocab.n_nonspecial], key=lambda s: -s.frequency)[:8]:
    print(f"  {row.token}: freq {row.frequency:>5}  rel {row.rel_freq:.4f}  H {row.context_entropy:.3f}")

# Importance bucketing needs per-token accuracies from a trained model;
# simulate an external measurement here.
accuracy = {i: float(rng.uniform(0.3, 0.9)) for i in range(vocab.n_nonspecial)}
stats = compute_token_stats(corpus, spec, accuracy=accuracy)
buckets = bucket_tokens(stats)
grid = {}
for band in buckets.values():
    grid[band] = grid.get(band, 0) + 1
print("\nfrequency x accuracy buckets:")
for freq_band in ("high", "mid", "low"):
    cells = [f"{acc_band}:{grid.get((freq_band, acc_band), 0):>2}" for acc_band in ("high", "low")]
    print(f"  {freq_band:>4} freq  " + "  ".join(cells))

# Cull the rarest tokens (up to the 10% bound); removed tokens encode to
# [CULL] while everything else keeps its identity.
rarest = sorted(stats[: vocab.n_nonspecial], key=lambda s: s.frequency)[: vocab.n_nonspecial // 10]
remove = frozenset(s.token_id for s in rarest)
culled, remap = cull_vocab(vocab, CullSpec(remove))
print(f"\nculled {len(remove)} tokens -> vocabulary of {len(culled)} (was {len(vocab)})")
probe = DnaSequence("".join(rng.choice(list("ACGT"), size=30)))
before = kmer_tokenize(probe, spec)
after = kmer_tokenize(probe, TokenizerSpec(culled))
changed = [i for i, (a, b) in enumerate(zip(before, after)) if vocab.tokens[a] != culled.tokens[b]]
print(f"probe re-encoded: {len(changed)} of {before.size} positions now [CULL]")
