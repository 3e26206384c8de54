"""Windowed integral means of uniformly sampled bounded functions.

Everything mirrors the discrete machinery with summation replaced by
composite-trapezoid integration: window means (1/t) * integral over
[a, a + t] for grid offsets a, the worst-offset statistic as a function of
the duration t, and the strong-convergence verdict.  Offsets and durations
are restricted to the sample grid, so every reported sup is a
grid-resolution statement, not an estimate of the continuous sup.
"""

from __future__ import annotations

import json
from functools import cached_property

import numpy as np

from .core import (
    BOUND_RTOL,
    NormSpec,
    _parse_header,
    as_vector,
    atomic_write_text,
    kahan_cumsum,
)
from .detect import Verdict, _floor, classify

__all__ = [
    "SampledFunction",
    "integral_mean",
    "c_cont",
    "check_strong_cont",
    "tail_integral_mean",
    "read_function",
    "write_function",
]

# Relative slack when snapping times to the grid; beyond it the time is
# rejected as off-grid rather than silently rounded.
GRID_RTOL = 1e-9


class SampledFunction:
    """Uniform-grid truncation f(t_0)..f(t_K) with t_k = k * h of a bounded function.

    Needs K >= 2 so at least two trapezoid panels exist.  Bound validation
    and immutability follow the sequence model.
    """

    def __init__(self, values, step: float, bound: float, norm: NormSpec | str = "l2"):
        arr = np.asarray(values, dtype=float)
        if arr.ndim == 1:
            arr = arr[:, np.newaxis]
        if arr.ndim != 2 or arr.shape[0] < 3 or arr.shape[1] < 1:
            raise ValueError("values must form a (K + 1, d) array with K >= 2")
        if not np.all(np.isfinite(arr)):
            raise ValueError("values must be finite")
        step = float(step)
        if not np.isfinite(step) or step <= 0.0:
            raise ValueError("step must be positive and finite")
        spec = norm if isinstance(norm, NormSpec) else NormSpec(norm)
        bound = float(bound)
        if not np.isfinite(bound) or bound < 0.0:
            raise ValueError("declared bound must be finite and nonnegative")
        worst = float(spec.of_rows(arr).max())
        if worst > bound * (1.0 + BOUND_RTOL):
            raise ValueError(
                f"declared bound violated: sup norm {worst!r} exceeds {bound!r}"
            )
        arr = arr.copy()
        arr.setflags(write=False)
        self.values = arr
        self.step = step
        self.bound = bound
        self.norm = spec

    @property
    def grid_count(self) -> int:
        """K: the number of trapezoid panels (grid points minus one)."""
        return self.values.shape[0] - 1

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    @property
    def duration(self) -> float:
        return self.grid_count * self.step

    def grid_index(self, time: float, what: str = "time") -> int:
        """Snap a time to its grid index; reject genuinely off-grid values."""
        time = float(time)
        idx = int(round(time / self.step))
        if abs(time - idx * self.step) > GRID_RTOL * max(self.step, abs(time)):
            raise ValueError(
                f"{what} {time!r} is not a multiple of the grid step {self.step!r}"
            )
        return idx

    @cached_property
    def panel_prefix(self) -> np.ndarray:
        """Compensated prefix integrals Q_0..Q_K, Q_i = trapezoid over [0, t_i]."""
        panels = 0.5 * self.step * (self.values[:-1] + self.values[1:])
        q = kahan_cumsum(panels)
        q.setflags(write=False)
        return q

    def __repr__(self):
        return (
            f"SampledFunction(K={self.grid_count}, d={self.dim}, "
            f"step={self.step}, bound={self.bound}, norm={self.norm.kind!r})"
        )


def _duration_index(f: SampledFunction, duration: float) -> int:
    it = f.grid_index(duration, "duration")
    if it < 1:
        raise ValueError("duration must cover at least one grid step")
    if it > f.grid_count:
        raise ValueError(
            f"duration {duration!r} exceeds the sampled range {f.duration!r}"
        )
    return it


def integral_mean(f: SampledFunction, offset: float, duration: float) -> np.ndarray:
    """Trapezoid average (1/t) * integral of f over [a, a + t].

    Both a and t must be nonnegative grid multiples with a + t inside the
    sampled range and t covering at least one panel.
    """
    it = _duration_index(f, duration)
    ia = f.grid_index(offset, "offset")
    if ia < 0 or ia + it > f.grid_count:
        raise ValueError(
            f"window [{offset!r}, {offset + duration!r}] outside the sampled range"
        )
    q = f.panel_prefix
    return (q[ia + it] - q[ia]) / (it * f.step)


def c_cont(f: SampledFunction, duration: float, center=None) -> float:
    """Worst norm of a duration-t integral mean over every grid offset."""
    it = _duration_index(f, duration)
    q = f.panel_prefix
    means = (q[it:] - q[:-it]) / (it * f.step)
    if center is not None:
        vec = as_vector(center)
        if vec.size != f.dim:
            raise ValueError(f"center dimension {vec.size} != function dimension {f.dim}")
        means = means - vec
    return float(f.norm.of_rows(means).max())


def check_strong_cont(
    f: SampledFunction,
    v,
    duration: float,
    tolerance: float,
    divergence_floor: float | None = None,
) -> Verdict:
    """Verdict on integral means over [a, a + t] converging to v uniformly in a.

    The window field of the verdict counts grid steps (t / h); the horizon
    is the panel count K.
    """
    vec = as_vector(v)
    if vec.size != f.dim:
        raise ValueError(f"candidate dimension {vec.size} != function dimension {f.dim}")
    it = _duration_index(f, duration)
    residual = c_cont(f, duration, center=vec)
    floor = _floor(tolerance, divergence_floor)
    return Verdict(
        classify(residual, tolerance, floor),
        vec,
        residual,
        float(tolerance),
        floor,
        it,
        f.grid_count,
        "strong",
    )


def tail_integral_mean(f: SampledFunction) -> np.ndarray:
    """Integral mean over the trailing three quarters of the sampled range."""
    keep = -(-3 * f.grid_count // 4)
    q = f.panel_prefix
    return (q[f.grid_count] - q[f.grid_count - keep]) / (keep * f.step)


def write_function(f: SampledFunction, path) -> None:
    """JSON Lines function format: like the sequence format plus a step header."""
    lines = [
        json.dumps(
            {"dim": f.dim, "bound": f.bound, "norm": f.norm.kind, "step": f.step}
        )
    ]
    lines.extend(json.dumps(row.tolist()) for row in f.values)
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_function(path) -> SampledFunction:
    """Read a JSON Lines sampled-function file written by :func:`write_function`."""
    with open(path, "r") as handle:
        lines = [line for line in (raw.strip() for raw in handle) if line]
    if not lines:
        raise ValueError(f"{path}: empty function file")
    header = _parse_header(path, lines[0])
    if "step" not in header:
        raise ValueError(f"{path}: header lacks a step; this is a sequence file")
    dim = int(header["dim"])
    rows = []
    for i, line in enumerate(lines[1:], start=2):
        try:
            row = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}:{i}: bad value line: {exc}") from exc
        row = np.atleast_1d(np.asarray(row, dtype=float))
        if row.shape != (dim,):
            raise ValueError(
                f"{path}:{i}: value has dimension {row.shape}, expected ({dim},)"
            )
        rows.append(row)
    if len(rows) < 3:
        raise ValueError(f"{path}: need at least 3 grid values")
    return SampledFunction(
        np.vstack(rows), float(header["step"]), float(header["bound"]), str(header["norm"])
    )
