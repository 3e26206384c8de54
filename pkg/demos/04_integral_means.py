"""
The integral analog: windowed means of sampled functions
=========================================================

For functions of a continuous variable the window mean becomes
(1/t) * integral over [a, a + t], and the statistic takes the worst offset
a on the sample grid.  Sine averages to zero at the 2/t rate; a square wave
averages to its duty cycle exactly once the window hits a whole number of
periods.
"""

import math

import numpy as np

from almostconv import (
    GeneratorSpec,
    SampledFunction,
    c_cont,
    check_strong_cont,
    generate,
    integral_mean,
    tail_integral_mean,
)

h = 1e-3
grid = np.arange(0.0, 500.0 + h / 2, h)
f = SampledFunction(np.sin(grid)[:, None], h, 1.0, "l2")
print(f"sin on [0, 500], step {h}, {f.grid_count} panels")

# the closed form for one window: (cos a - cos(a+t)) / t
a, t = 2.0, 30.0
got = integral_mean(f, a, t)[0]
want = (math.cos(a) - math.cos(a + t)) / t
print(f"window [{a}, {a + t}]: mean {got:.6f} (closed form {want:.6f})")

print("\n   t     worst |mean|    2/t bound")
for t in (10.0, 50.0, 200.0):
    worst = c_cont(f, t)
    print(f"{t:6.0f}   {worst:.6f}      {2.0 / t:.6f}")

verdict = check_strong_cont(f, [0.0], 200.0, tolerance=0.02)
print(f"\nstrong check at t = 200: {verdict.status}, residual {verdict.residual:.2e}")
print(f"tail mean estimate: {tail_integral_mean(f)[0]:.4e}")

# square wave: mean over any whole number of periods is the duty cycle
spec = GeneratorSpec(
    "square_wave", 0, params={"period": 2.0, "duration": 400.0, "step": 0.01}
)
made = generate(spec)
sq = made.function
print(f"\nsquare wave, period 2, duty cycle truth {made.truth[0]}")
for t in (2.0, 20.0, 200.0):
    print(f"t = {t:5.1f}: worst |mean - 1/2| = {c_cont(sq, t, center=made.truth):.2e}")

# off-period windows feel the last partial period, decaying like 1/t
for t in (3.0, 31.0, 301.0):
    print(f"t = {t:5.1f}: worst |mean - 1/2| = {c_cont(sq, t, center=made.truth):.2e}")
