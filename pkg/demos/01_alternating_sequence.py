"""
The alternating sequence 1, 0, 1, 0, ...
========================================

Classic first example: the sequence never converges, but every window of
even length averages to exactly 1/2, no matter where it starts.  That makes
it the cleanest possible illustration of convergence in the averaged,
start-uniform sense.
"""

import numpy as np

from almostconv import (
    GeneratorSpec,
    candidate_limit,
    check_quasi,
    check_strong,
    estimate_p,
    estimate_q,
    generate,
)

x = generate(GeneratorSpec("alternating", 10_000)).sample
print(f"horizon {x.length}, first terms {x.samples[:6, 0]}")

# plain convergence fails: consecutive terms stay 1 apart forever
gaps = np.abs(np.diff(x.samples[:, 0]))
print(f"max |x_(k+1) - x_k| over the whole horizon: {gaps.max():.0f}")

# the averaged picture: window means at even lengths are exactly 1/2
v = candidate_limit(x)
print(f"estimated limit: {v[0]}")

strong = check_strong(x, v, window=2048, tolerance=1e-3)
print(f"strong check: {strong.status}, residual {strong.residual:.2e}")

quasi = check_quasi(x, v, window=2048, tolerance=1e-3)
print(f"quasi check:  {quasi.status}, residual {quasi.residual:.2e}")

# the residual curves make the even/odd structure visible
p = estimate_p(x, 16)
q = estimate_q(x, 16)
print("\n n   sliding   block")
for n in range(1, 17):
    print(f"{n:2d}   {p.curve.value_at(n):.4f}    {q.curve.value_at(n):.4f}")

# odd windows are off by exactly 1/(2n); even windows are exact
for n in (5, 6, 15, 16):
    want = 0.0 if n % 2 == 0 else 1.0 / (2 * n)
    got = abs(p.curve.value_at(n) - 0.5)
    print(f"window {n:2d}: |c_n - 1/2| = {got:.6f} (expected {want:.6f})")
