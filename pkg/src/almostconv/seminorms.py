"""Finite-horizon estimators of the sliding and block window-mean seminorms.

For a bounded sequence x and window length n, the sliding statistic c_n is
the worst window-mean norm over every start position; the block statistic
restricts starts to multiples of n.  The weighted sliding curve n * c_n is
subadditive, exactly, because a long window splits into two fitting shorter
ones, so the limit over n exists and equals the infimum; the block curve is
dominated by the sliding curve pointwise since its starts are a subset.

Estimators report honest finite-horizon readings: the curve value at the
window cap together with the running minimum for the sliding limit, and the
max over the top half of window lengths as a limsup proxy for the block
statistic.  No convergence-rate claim is made for the truncation gap.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import (
    NormSpec,
    SequenceSample,
    as_vector,
    atomic_write_text,
    block_means,
    window_means,
)

__all__ = [
    "CesaroCurve",
    "PEstimate",
    "QEstimate",
    "FeketeViolation",
    "c_sliding",
    "c_block",
    "estimate_p",
    "estimate_q",
    "fekete_audit",
    "write_curve_csv",
    "read_curve_csv",
    "CURVE_CSV_COLUMNS",
    "SUBADDITIVITY_RTOL",
]

MODES = ("sliding", "block")

# Default subadditivity slack per unit of declared bound; covers prefix-sum
# rounding which is orders of magnitude smaller in practice.
SUBADDITIVITY_RTOL = 1e-9

CURVE_CSV_COLUMNS = ("n", "c_sliding", "c_block", "residual_sliding", "residual_block")


@dataclass
class CesaroCurve:
    """Window-mean curve: values[n - 1] is the statistic at window length n."""

    mode: str
    values: np.ndarray
    horizon: int | None
    norm: NormSpec
    bound: float

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        vals = np.atleast_1d(np.asarray(self.values, dtype=float))
        if vals.ndim != 1 or vals.size < 1:
            raise ValueError("curve needs at least one value")
        if not np.all(np.isfinite(vals)) or np.any(vals < 0.0):
            raise ValueError("curve values must be finite and nonnegative")
        vals = vals.copy()
        vals.setflags(write=False)
        self.values = vals

    @property
    def max_window(self) -> int:
        return int(self.values.size)

    def value_at(self, n: int) -> float:
        """Curve entry for window length n (1-indexed)."""
        if not 1 <= n <= self.max_window:
            raise ValueError(f"window length {n} outside 1..{self.max_window}")
        return float(self.values[n - 1])


@dataclass
class PEstimate:
    """Finite readings of the limiting sliding seminorm.

    c_at_N is the curve value at the window cap; running_min is the smallest
    value seen at any window length, which can only overestimate the true
    limit (the weighted curve is subadditive, so the limit is the infimum).
    Both are reported: a large gap between them flags an unconverged curve.
    """

    c_at_N: float
    running_min: float
    curve: CesaroCurve


@dataclass
class QEstimate:
    """Tail-max reading of the block statistic (a limsup proxy).

    tail_max is the largest block-curve value over window lengths in
    [ceil(N/2), N]; tail_start records where that range begins.
    """

    tail_max: float
    tail_start: int
    curve: CesaroCurve


class FeketeViolation(NamedTuple):
    m: int
    n: int
    slack: float


def _center(x: SequenceSample, center) -> np.ndarray | None:
    if center is None:
        return None
    vec = as_vector(center)
    if vec.size != x.dim:
        raise ValueError(f"center dimension {vec.size} != sample dimension {x.dim}")
    return vec


def c_sliding(x: SequenceSample, n: int, center=None) -> float:
    """Worst norm of a length-n window mean over every start position.

    With `center` given, measures the worst distance of a window mean from
    that vector instead; by linearity of window sums this equals the plain
    statistic of the recentred sequence.
    """
    means = window_means(x, n)
    vec = _center(x, center)
    if vec is not None:
        means = means - vec
    return float(x.norm.of_rows(means).max())


def c_block(x: SequenceSample, n: int, center=None) -> float:
    """Worst norm of a stride-n block mean (starts at jn, j >= 1).

    Block starts are a subset of sliding starts drawn from the same prefix
    sums, so c_block(x, n) <= c_sliding(x, n) holds exactly, not just up to
    rounding.
    """
    means = block_means(x, n)
    vec = _center(x, center)
    if vec is not None:
        means = means - vec
    return float(x.norm.of_rows(means).max())


def _check_cap(x: SequenceSample, max_window: int) -> None:
    if not 1 <= max_window <= x.length // 2:
        raise ValueError(
            f"window cap {max_window} outside 1..{x.length // 2} "
            f"(horizon {x.length}; every length must keep at least M/2 windows)"
        )


def estimate_p(x: SequenceSample, max_window: int) -> PEstimate:
    """Sliding curve c_1..c_N up to the cap, its final value, and running min."""
    _check_cap(x, max_window)
    values = np.array([c_sliding(x, n) for n in range(1, max_window + 1)])
    curve = CesaroCurve("sliding", values, x.length, x.norm, x.bound)
    return PEstimate(float(values[-1]), float(values.min()), curve)


def estimate_q(x: SequenceSample, max_window: int) -> QEstimate:
    """Block curve c_1..c_N up to the cap and its max over the top half."""
    _check_cap(x, max_window)
    values = np.array([c_block(x, n) for n in range(1, max_window + 1)])
    curve = CesaroCurve("block", values, x.length, x.norm, x.bound)
    tail_start = (max_window + 1) // 2
    return QEstimate(float(values[tail_start - 1 :].max()), tail_start, curve)


def fekete_audit(curve: CesaroCurve, tol: float | None = None) -> list[FeketeViolation]:
    """Check (m+n) c_{m+n} <= m c_m + n c_n for every pair with m + n <= N.

    The inequality is exact for sliding curves (a long window splits into
    two fitting shorter ones), so any slack beyond the rounding allowance
    indicates a corrupted or non-sliding curve.  Returns one (m, n, slack)
    per violation with m <= n, largest slack first; empty means the audit
    passed.
    """
    if curve.mode != "sliding":
        raise ValueError("subadditivity is only guaranteed for sliding curves")
    if tol is None:
        tol = SUBADDITIVITY_RTOL * curve.bound
    cap = curve.max_window
    weighted = np.arange(1, cap + 1) * curve.values
    out: list[FeketeViolation] = []
    for m in range(1, cap // 2 + 1):
        ns = np.arange(m, cap - m + 1)
        slack = weighted[m + ns - 1] - weighted[m - 1] - weighted[ns - 1]
        for i in np.nonzero(slack > tol)[0]:
            out.append(FeketeViolation(m, int(ns[i]), float(slack[i])))
    out.sort(key=lambda v: -v.slack)
    return out


def write_curve_csv(
    path,
    sliding: CesaroCurve | None = None,
    block: CesaroCurve | None = None,
    residual_sliding=None,
    residual_block=None,
) -> None:
    """Write curves as CSV with the fixed column set

    (n, c_sliding, c_block, residual_sliding, residual_block);
    columns without data are left empty.  At least one curve is required,
    and all provided columns must share a length.
    """
    columns = {
        "c_sliding": None if sliding is None else sliding.values,
        "c_block": None if block is None else block.values,
        "residual_sliding": residual_sliding,
        "residual_block": residual_block,
    }
    sizes = {len(v) for v in columns.values() if v is not None}
    if not sizes:
        raise ValueError("nothing to write")
    if len(sizes) != 1:
        raise ValueError(f"column length mismatch: {sorted(sizes)}")
    count = sizes.pop()
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(CURVE_CSV_COLUMNS)
    for i in range(count):
        row = [i + 1]
        for name in CURVE_CSV_COLUMNS[1:]:
            vals = columns[name]
            row.append("" if vals is None else repr(float(vals[i])))
        writer.writerow(row)
    atomic_write_text(path, buf.getvalue())


def read_curve_csv(path) -> dict[str, np.ndarray]:
    """Read a curve CSV back into {column: values}; empty columns are dropped."""
    with open(path, "r", newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty curve file") from None
        if [h.strip() for h in header] != list(CURVE_CSV_COLUMNS):
            raise ValueError(
                f"{path}: expected columns {CURVE_CSV_COLUMNS}, got {header}"
            )
        rows = [row for row in reader if row]
    if not rows:
        raise ValueError(f"{path}: no data rows")
    out: dict[str, list[float]] = {name: [] for name in CURVE_CSV_COLUMNS}
    for i, row in enumerate(rows, start=2):
        if len(row) != len(CURVE_CSV_COLUMNS):
            raise ValueError(f"{path}:{i}: expected {len(CURVE_CSV_COLUMNS)} cells")
        for name, cell in zip(CURVE_CSV_COLUMNS, row):
            if cell != "":
                out[name].append(float(cell))
    result = {}
    for name, vals in out.items():
        if vals:
            if len(vals) != len(rows):
                raise ValueError(f"{path}: column {name!r} is partially filled")
            result[name] = np.asarray(vals)
    expected = np.arange(1, len(rows) + 1)
    if "n" not in result or not np.array_equal(result["n"], expected):
        raise ValueError(f"{path}: window-length column must run 1..{len(rows)}")
    return result
