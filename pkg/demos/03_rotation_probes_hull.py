"""
Planar rotation: strong checks, dual probes, and the hull audit
===============================================================

Points marching around a circle never settle, but their window means spiral
into the center.  The same conclusion comes from three directions: the
vector-valued strong check, scalar checks of functional images (the weak
notion), and the fact that the limit must lie in the closed convex hull of
the samples.
"""

import math

import numpy as np

from almostconv import (
    GeneratorSpec,
    ProbeSet,
    candidate_limit,
    check_strong,
    check_weak,
    convex_hull_audit,
    generate,
)

spec = GeneratorSpec("rotation", 20_000, params={"angle": 2 * math.pi / 7})
made = generate(spec)
x = made.sample
print(f"rotation by 2*pi/7 on the circle, d = {x.dim}, M = {x.length}")
print(f"stated limit: {made.truth}")

v = candidate_limit(x)
print(f"estimated limit: [{v[0]:.2e}, {v[1]:.2e}]")

strong = check_strong(x, made.truth, window=4096, tolerance=1e-3)
print(f"strong: {strong.status}, residual {strong.residual:.3e}")

# coordinate probes alone already pin the limit componentwise
coords = ProbeSet.coordinates(x.dim, x.norm)
weak_c = check_weak(x, made.truth, coords, window=4096, tolerance=1e-3)
print(f"weak (coordinates): {weak_c.status}, residual {weak_c.residual:.3e}")

# adding random unit-dual-norm functionals cannot push the residual above
# the strong one
probes = ProbeSet.default(x.dim, x.norm, seed=7, extra=16)
weak_r = check_weak(x, made.truth, probes, window=4096, tolerance=1e-3)
print(f"weak ({len(probes)} probes): {weak_r.status}, residual {weak_r.residual:.3e}")
assert weak_r.residual <= strong.residual + 1e-12

# the origin sits well inside the hull of the circle samples
dist = convex_hull_audit(x, made.truth)
print(f"hull distance of the limit: {dist:.2e}")

# a point outside the circle is flagged by its positive distance
outside = np.array([2.0, 0.0])
print(f"hull distance of (2, 0): {convex_hull_audit(x, outside):.4f}")

# against a wrong candidate every view diverges at once
wrong = np.array([0.3, 0.3])
s_bad = check_strong(x, wrong, window=4096, tolerance=1e-3)
w_bad = check_weak(x, wrong, probes, window=4096, tolerance=1e-3)
print(f"wrong candidate: strong {s_bad.status}, weak {w_bad.status}")
