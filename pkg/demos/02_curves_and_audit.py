"""
Window curves, CSV export, and the subadditivity audit
======================================================

The sliding curve n -> c_n is not arbitrary: weighted by n it must be
subadditive, because a window of length m + n splits into one of length m
and one of length n starting where the first ends.  The audit below uses
that exact inequality as a tamper check on stored curves.
"""

import tempfile
from pathlib import Path

from almostconv import (
    CesaroCurve,
    GeneratorSpec,
    estimate_p,
    estimate_q,
    fekete_audit,
    generate,
    read_curve_csv,
    write_curve_csv,
)

spec = GeneratorSpec("periodic", 8000, params={"pattern": [2.0, -1.0, 0.5, -0.5]})
made = generate(spec)
x = made.sample
print(f"periodic sequence, pattern mean {made.truth[0]}, horizon {x.length}")

p = estimate_p(x, 512)
q = estimate_q(x, 512)
print(f"sliding curve: c_1 = {p.curve.value_at(1):.4f} ... c_512 = {p.c_at_N:.4f}")
print(f"running min {p.running_min:.4f}, block tail max {q.tail_max:.4f}")

# export both curves; residual columns are optional and skipped here
out = Path(tempfile.mkdtemp()) / "curves.csv"
write_curve_csv(out, p.curve, q.curve)
cols = read_curve_csv(out)
print(f"wrote {out} with columns {sorted(cols)}")

# the audit passes on the genuine curve
violations = fekete_audit(p.curve)
print(f"audit on the real curve: {len(violations)} violations")

# now corrupt one entry the way a transcription error would
bad_values = p.curve.values.copy()
bad_values[200] *= 1.5
bad = CesaroCurve("sliding", bad_values, p.curve.horizon, p.curve.norm, p.curve.bound)
violations = fekete_audit(bad)
print(f"audit after inflating c_201: {len(violations)} violations")
worst = violations[0]
print(f"worst slack at (m, n) = ({worst.m}, {worst.n}): {worst.slack:.3e}")
