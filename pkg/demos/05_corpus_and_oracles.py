"""
The seeded corpus and its naive oracles
=======================================

Everything downstream (tests, benchmarks, the CLI) leans on deterministic
generators: same spec, same bytes.  Each optimized statistic has a slow
termwise oracle next to it, so the prefix-sum fast paths can be checked
against code simple enough to read in one sitting.
"""

import tempfile
from pathlib import Path

import numpy as np

from almostconv import (
    candidate_limit,
    check_strong,
    c_block,
    c_sliding,
    oracle_block_residual,
    oracle_residual,
    random_instances,
    read_sequence,
    standard_corpus,
    write_sequence,
)

corpus = standard_corpus(10_000)
print(f"standard corpus: {len(corpus)} instances")
print(f"{'kind':16s} {'d':>2s} {'norm':>4s} {'bound':>6s}  limit")
for inst in corpus:
    t = "unknown" if inst.truth is None else np.array2string(inst.truth, precision=3)
    print(
        f"{inst.spec.kind:16s} {inst.sample.dim:2d} {inst.spec.norm:>4s} "
        f"{inst.sample.bound:6.2f}  {t}"
    )

# verdicts against the stated limits (estimated where unknown)
print("\nverdicts at window 1024, tolerance 5e-3:")
for inst in corpus:
    x = inst.sample
    v = inst.truth if inst.truth is not None else candidate_limit(x)
    verdict = check_strong(x, v, 1024, 5e-3, divergence_floor=5e-2)
    print(f"{inst.spec.kind:16s} {verdict.status:12s} residual {verdict.residual:.3e}")

# fast path vs oracle on a batch of randomized instances
print("\noracle agreement on 20 randomized instances:")
worst = 0.0
for inst in random_instances(20, 400, seed=99):
    x = inst.sample
    v = np.zeros(x.dim)
    for n in (3, 17):
        worst = max(worst, abs(c_sliding(x, n, center=v) - oracle_residual(x, v, n)))
        worst = max(
            worst, abs(c_block(x, n, center=v) - oracle_block_residual(x, v, n))
        )
print(f"largest |fast - oracle| over all checks: {worst:.2e}")

# files round-trip bit for bit
path = Path(tempfile.mkdtemp()) / "instance.jsonl"
write_sequence(corpus[0].sample, path)
back = read_sequence(path)
assert np.array_equal(back.samples, corpus[0].sample.samples)
print(f"\nround trip through {path}: identical bytes back")
