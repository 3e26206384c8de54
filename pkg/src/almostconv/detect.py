"""Convergence verdicts for bounded sequences.

Three equivalent views of the same limit are checked at finite horizon:
strong (worst sliding window mean), quasi (worst stride-aligned block mean
over the top half of window lengths), and weak (the scalar strong check
applied to probe images f(x_k) for dual functionals f).  A verdict is a
finite-horizon statement: residual below the tolerance reads "converges",
residual at or above the divergence floor reads "diverges", and the band
in between stays "inconclusive" because truncated residuals of slowly
mixing sequences can sit above the tolerance transiently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    NormSpec,
    SequenceSample,
    as_vector,
    window_means,
)
from .rng import SplitMix64
from .seminorms import c_block, c_sliding

__all__ = [
    "CONVERGES",
    "DIVERGES",
    "INCONCLUSIVE",
    "DEFAULT_FLOOR_FACTOR",
    "Verdict",
    "ProbeSet",
    "CauchyReport",
    "classify",
    "candidate_limit",
    "check_strong",
    "check_quasi",
    "check_weak",
    "probe_image",
    "sa_cauchy_check",
    "convex_hull_audit",
    "induced_functional",
]

CONVERGES = "converges"
DIVERGES = "diverges"
INCONCLUSIVE = "inconclusive"

# Residuals in [tolerance, floor) are inconclusive; the default floor is one
# order above the tolerance.
DEFAULT_FLOOR_FACTOR = 10.0

PROBE_SEED = 0x5EEDB10C
N_RANDOM_PROBES = 8

_PROBE_GRACE = 1e-9


_STATUSES = (CONVERGES, DIVERGES, INCONCLUSIVE)
_MODES = ("strong", "quasi", "weak")


@dataclass
class Verdict:
    """Outcome of one convergence check at a fixed window and horizon."""

    status: str
    candidate: np.ndarray
    residual: float
    tolerance: float
    divergence_floor: float
    window: int
    horizon: int
    mode: str

    def __post_init__(self):
        if self.status not in _STATUSES:
            raise ValueError(f"status must be one of {_STATUSES}")
        if self.mode not in _MODES:
            raise ValueError(f"mode must be one of {_MODES}")

    def to_json(self, curve_file: str | None = None) -> dict:
        """Export dict with the fixed key set; candidate becomes a list."""
        out = {
            "status": self.status,
            "candidate": [float(c) for c in np.atleast_1d(self.candidate)],
            "residual": self.residual,
            "tolerance": self.tolerance,
            "window": self.window,
            "horizon": self.horizon,
            "mode": self.mode,
        }
        if curve_file is not None:
            out["curve_file"] = str(curve_file)
        return out


def classify(residual: float, tolerance: float, divergence_floor: float) -> str:
    """Map a residual to converges / diverges / inconclusive."""
    if not (tolerance > 0.0 and math.isfinite(tolerance)):
        raise ValueError("tolerance must be positive and finite")
    if divergence_floor < tolerance:
        raise ValueError("divergence floor must be >= tolerance")
    if residual < tolerance:
        return CONVERGES
    if residual >= divergence_floor:
        return DIVERGES
    return INCONCLUSIVE


def _floor(tolerance: float, divergence_floor: float | None) -> float:
    return (
        DEFAULT_FLOOR_FACTOR * tolerance
        if divergence_floor is None
        else float(divergence_floor)
    )


def candidate_limit(x: SequenceSample, discard_head: bool = True) -> np.ndarray:
    """Grand mean over the trailing three quarters of the horizon.

    Discarding the leading quarter suppresses the transient of convergent
    sequences; pass discard_head=False for the plain grand mean over all
    samples.
    """
    if x.length < 4:
        raise ValueError("need at least 4 samples to estimate a limit")
    keep = -(-3 * x.length // 4) if discard_head else x.length
    p = x.prefix
    return (p[x.length] - p[x.length - keep]) / keep


def _window_cap(x: SequenceSample, window: int) -> int:
    window = int(window)
    if not 1 <= window <= x.length // 2:
        raise ValueError(
            f"window {window} outside 1..{x.length // 2} for horizon {x.length}"
        )
    return window


def check_strong(
    x: SequenceSample,
    v,
    window: int,
    tolerance: float,
    divergence_floor: float | None = None,
) -> Verdict:
    """Verdict on sliding window means converging to v uniformly in the start.

    The residual is the worst distance of any length-`window` window mean
    from v, which by linearity of window sums equals the sliding statistic
    of the recentred sequence x - v at the same window length.
    """
    vec = as_vector(v)
    window = _window_cap(x, window)
    residual = c_sliding(x, window, center=vec)
    floor = _floor(tolerance, divergence_floor)
    return Verdict(
        classify(residual, tolerance, floor),
        vec,
        residual,
        float(tolerance),
        floor,
        window,
        x.length,
        "strong",
    )


def check_quasi(
    x: SequenceSample,
    v,
    window: int,
    tolerance: float,
    divergence_floor: float | None = None,
) -> Verdict:
    """Verdict via stride-aligned block means (the limsup-style statistic).

    The residual is the worst distance of a block mean from v over block
    lengths in [ceil(window/2), window], matching the tail-max estimator of
    the block curve for the recentred sequence.
    """
    vec = as_vector(v)
    window = _window_cap(x, window)
    tail_start = (window + 1) // 2
    residual = max(
        c_block(x, n, center=vec) for n in range(tail_start, window + 1)
    )
    floor = _floor(tolerance, divergence_floor)
    return Verdict(
        classify(residual, tolerance, floor),
        vec,
        residual,
        float(tolerance),
        floor,
        window,
        x.length,
        "quasi",
    )


@dataclass
class ProbeSet:
    """Dual functionals (rows) scaled to unit dual norm.

    Probes pair with vectors by inner product; unit dual norm guarantees
    |f(v)| <= ||v|| for every v, so scalar probe residuals never exceed the
    vector residual.
    """

    functionals: np.ndarray
    dual: NormSpec

    def __post_init__(self):
        rows = np.atleast_2d(np.asarray(self.functionals, dtype=float))
        if rows.ndim != 2 or rows.shape[0] < 1 or rows.shape[1] < 1:
            raise ValueError("probe set must be a nonempty (count, d) array")
        if not np.all(np.isfinite(rows)):
            raise ValueError("probes must be finite")
        worst = float(self.dual.of_rows(rows).max())
        if worst > 1.0 + _PROBE_GRACE:
            raise ValueError(f"probe dual norm {worst!r} exceeds 1")
        rows = rows.copy()
        rows.setflags(write=False)
        self.functionals = rows

    @property
    def dim(self) -> int:
        return self.functionals.shape[1]

    def __len__(self) -> int:
        return self.functionals.shape[0]

    def __iter__(self):
        return iter(self.functionals)

    @classmethod
    def coordinates(cls, dim: int, norm: NormSpec | str = "l2") -> "ProbeSet":
        """The d coordinate functionals (unit dual norm under every built-in norm)."""
        if dim < 1:
            raise ValueError("dimension must be >= 1")
        spec = norm if isinstance(norm, NormSpec) else NormSpec(norm)
        return cls(np.eye(int(dim)), spec.dual)

    @classmethod
    def default(
        cls,
        dim: int,
        norm: NormSpec | str = "l2",
        seed: int = PROBE_SEED,
        extra: int = N_RANDOM_PROBES,
    ) -> "ProbeSet":
        """Coordinate functionals plus seeded random unit-dual-norm probes."""
        if dim < 1:
            raise ValueError("dimension must be >= 1")
        spec = norm if isinstance(norm, NormSpec) else NormSpec(norm)
        dual = spec.dual
        rows = [np.eye(int(dim))]
        rng = SplitMix64(seed)
        made = 0
        while made < int(extra):
            raw = np.array([2.0 * rng.uniform() - 1.0 for _ in range(int(dim))])
            scale = dual.of(raw)
            if scale < 1e-3:
                continue  # resample near-zero draws rather than blow up
            rows.append((raw / scale)[np.newaxis, :])
            made += 1
        return cls(np.vstack(rows), dual)


def probe_image(x: SequenceSample, functional) -> SequenceSample:
    """Scalar sequence {f(x_k)} for one functional f, with a tight bound."""
    f = as_vector(functional)
    if f.size != x.dim:
        raise ValueError(f"probe dimension {f.size} != sample dimension {x.dim}")
    vals = x.samples @ f
    return SequenceSample(vals[:, np.newaxis], float(np.abs(vals).max()), "l2")


def check_weak(
    x: SequenceSample,
    v,
    probes: ProbeSet,
    window: int,
    tolerance: float,
    divergence_floor: float | None = None,
) -> Verdict:
    """Verdict via scalar strong checks of every probe image.

    The residual is the worst scalar sliding residual of {f(x_k)} against
    f(v) over the probe set; for unit-dual probes it never exceeds the
    strong residual at the same window.
    """
    vec = as_vector(v)
    if probes.dim != x.dim:
        raise ValueError(f"probe dimension {probes.dim} != sample dimension {x.dim}")
    window = _window_cap(x, window)
    residual = 0.0
    for f in probes:
        image = probe_image(x, f)
        target = induced_functional(f, vec)
        residual = max(residual, c_sliding(image, window, center=[target]))
    floor = _floor(tolerance, divergence_floor)
    return Verdict(
        classify(residual, tolerance, floor),
        vec,
        residual,
        float(tolerance),
        floor,
        window,
        x.length,
        "weak",
    )


@dataclass
class CauchyReport:
    """Worst cross-window gap found by the uniform Cauchy scan."""

    ok: bool
    window_a: int
    window_b: int
    start: int
    gap: float


MAX_CAUCHY_GRID = 32


def sa_cauchy_check(x: SequenceSample, threshold: int, tolerance: float) -> CauchyReport:
    """Test uniform closeness of window means across window lengths.

    Scans a logarithmic grid of at most 32 window lengths in
    (threshold, M // 2] and every start position the compared windows share;
    reports whether all gaps stay below the tolerance, plus the worst
    (length_a, length_b, start) triple found.
    """
    threshold = int(threshold)
    cap = x.length // 2
    if not 1 <= threshold < cap:
        raise ValueError(f"threshold {threshold} outside 1..{cap - 1}")
    grid = np.unique(
        np.round(np.geomspace(threshold + 1, cap, MAX_CAUCHY_GRID)).astype(int)
    )
    grid = grid[(grid > threshold) & (grid <= cap)]
    means = {int(n): window_means(x, int(n)) for n in grid}
    worst_gap = -1.0
    worst = (int(grid[0]), int(grid[0]), 1)
    for ai in range(len(grid)):
        for bi in range(ai + 1, len(grid)):
            na, nb = int(grid[ai]), int(grid[bi])
            count = x.length - nb + 1
            gaps = x.norm.of_rows(means[na][:count] - means[nb][:count])
            j = int(np.argmax(gaps))
            if float(gaps[j]) > worst_gap:
                worst_gap = float(gaps[j])
                worst = (na, nb, j + 1)
    if worst_gap < 0.0:
        worst_gap = 0.0  # degenerate grid with a single length
    return CauchyReport(worst_gap < tolerance, worst[0], worst[1], worst[2], worst_gap)


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _monotone_chain(points: np.ndarray) -> np.ndarray:
    """Convex hull of planar points in counterclockwise order."""
    pts = sorted(map(tuple, points))
    if len(pts) <= 2:
        return np.asarray(pts, dtype=float)
    lower: list[tuple] = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0.0:
            lower.pop()
        lower.append(p)
    upper: list[tuple] = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0.0:
            upper.pop()
        upper.append(p)
    return np.asarray(lower[:-1] + upper[:-1], dtype=float)


def _point_segment_distance(p, a, b) -> float:
    ab = b - a
    denom = float(ab @ ab)
    if denom == 0.0:
        return float(np.hypot(*(p - a)))
    t = float((p - a) @ ab) / denom
    t = min(1.0, max(0.0, t))
    return float(np.hypot(*(p - a - t * ab)))


def convex_hull_audit(x: SequenceSample, candidate) -> float:
    """Euclidean distance from the candidate to the hull of the sample points.

    A limit of window means always lies in the closed convex hull of the
    terms, so a positive distance flags an inconsistent candidate.
    Dimension 1 measures against the [min, max] interval; dimension 2 uses
    the monotone-chain hull.  Returns 0.0 when the candidate is inside or
    on the boundary.
    """
    vec = as_vector(candidate)
    if vec.size != x.dim:
        raise ValueError(f"candidate dimension {vec.size} != sample dimension {x.dim}")
    if x.dim == 1:
        lo = float(x.samples.min())
        hi = float(x.samples.max())
        return max(0.0, lo - float(vec[0]), float(vec[0]) - hi)
    if x.dim != 2:
        raise ValueError("hull audit supports dimensions 1 and 2 only")
    hull = _monotone_chain(np.unique(x.samples, axis=0))
    if hull.shape[0] == 1:
        return float(np.hypot(*(vec - hull[0])))
    if hull.shape[0] == 2:
        return _point_segment_distance(vec, hull[0], hull[1])
    scale = max(1.0, float(np.abs(hull).max()) ** 2)
    edges = list(zip(hull, np.roll(hull, -1, axis=0)))
    if all(_cross(a, b, vec) >= -1e-12 * scale for a, b in edges):
        return 0.0
    return min(_point_segment_distance(vec, a, b) for a, b in edges)


def induced_functional(functional, limit) -> float:
    """Value a probe assigns to the limit of a convergent sequence.

    For sequences converging to v, every unit-dual probe's long-run mean of
    {f(x_k)} is f(v), dominated in magnitude by the sliding statistic of x.
    """
    f = as_vector(functional)
    v = as_vector(limit)
    if f.size != v.size:
        raise ValueError(f"dimension mismatch: probe {f.size} vs limit {v.size}")
    return float(f @ v)
