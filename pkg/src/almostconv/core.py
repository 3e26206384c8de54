"""Vectors, norms, bounded sequences, and exact windowed-sum machinery.

Sequences are 1-indexed throughout: entry k of x lives at ``x.samples[k - 1]``,
window starts j range over j >= 1, and the length-n window at start j covers
x_j .. x_{j+n-1}.  Window sums come from compensated prefix sums, so any
window mean costs O(1) after an O(M) setup; the termwise-summation oracle in
:mod:`almostconv.corpus` cross-checks that fast path.

Complex data is represented by doubling the real dimension with interleaved
real/imaginary parts (:func:`complex_to_real`); the l2 norm of the doubled
vector reproduces the complex modulus, which keeps a single real kernel.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = [
    "NORM_KINDS",
    "NormSpec",
    "SequenceSample",
    "as_vector",
    "complex_to_real",
    "norm",
    "sup_norm",
    "shift",
    "shift_difference",
    "sliding_mean",
    "window_means",
    "block_means",
    "constant_sequence",
    "seq_add",
    "seq_sub",
    "seq_scale",
    "seq_offset",
    "truncate",
    "kahan_cumsum",
    "read_sequence",
    "write_sequence",
    "atomic_write_text",
]

NORM_KINDS = ("l1", "l2", "linf")

_DUAL = {"l1": "linf", "l2": "l2", "linf": "l1"}

# Grace factor for validating declared bounds: absorbs the few-ulp rounding
# of norm evaluation on derived sequences (sums, differences, probe images).
# Three orders below the smallest tolerance reported anywhere.
BOUND_RTOL = 1e-12

# Rows per block of the two-level compensated cumulative sum.
_CHUNK = 1024


def as_vector(v) -> np.ndarray:
    """Coerce to a finite 1-D float vector with at least one component."""
    arr = np.atleast_1d(np.asarray(v, dtype=float))
    if arr.ndim != 1 or arr.size < 1:
        raise ValueError("vector must be 1-D with at least one component")
    if not np.all(np.isfinite(arr)):
        raise ValueError("vector components must be finite")
    return arr


def complex_to_real(values) -> np.ndarray:
    """Interleave real/imaginary parts, doubling the dimension.

    Works on a single complex vector or an (M, d) array of them.  The l2
    norm of the doubled real vector equals the complex l2 modulus, so
    complex sequences reduce to real ones without a separate kernel.
    """
    arr = np.atleast_1d(np.asarray(values, dtype=complex))
    out = np.empty(arr.shape + (2,), dtype=float)
    out[..., 0] = arr.real
    out[..., 1] = arr.imag
    return out.reshape(arr.shape[:-1] + (2 * arr.shape[-1],))


@dataclass(frozen=True)
class NormSpec:
    """One of the built-in norms on the ambient space: l1, l2, or linf."""

    kind: str = "l2"

    def __post_init__(self):
        if self.kind not in NORM_KINDS:
            raise ValueError(
                f"unknown norm kind {self.kind!r}; expected one of {NORM_KINDS}"
            )

    @property
    def dual(self) -> "NormSpec":
        """Dual norm, so |f . v| <= dual.of(f) * self.of(v) for all f, v."""
        return NormSpec(_DUAL[self.kind])

    def of(self, v) -> float:
        """Norm of a single vector."""
        arr = as_vector(v)
        if self.kind == "l1":
            return float(np.abs(arr).sum())
        if self.kind == "l2":
            return float(np.sqrt((arr * arr).sum()))
        return float(np.abs(arr).max())

    def of_rows(self, rows: np.ndarray) -> np.ndarray:
        """Row-wise norms of an (m, d) array."""
        if self.kind == "l1":
            return np.abs(rows).sum(axis=1)
        if self.kind == "l2":
            return np.sqrt((rows * rows).sum(axis=1))
        return np.abs(rows).max(axis=1)


def _norm_spec(norm) -> NormSpec:
    return norm if isinstance(norm, NormSpec) else NormSpec(norm)


def norm(v, spec: NormSpec | str = "l2") -> float:
    """Norm of a vector under the given spec."""
    return _norm_spec(spec).of(v)


def kahan_cumsum(rows: np.ndarray) -> np.ndarray:
    """Prefix sums P_0..P_M (P_0 = 0) with compensated accumulation.

    Two-level Kahan-style scheme: plain cumulative sums inside fixed-size
    blocks, with the running total carried across blocks as a
    (sum, compensation) pair updated by a Neumaier step.  Keeps the drift
    of every stored P_k at the few-ulp level even for million-row horizons
    while staying vectorized.
    """
    rows = np.asarray(rows, dtype=float)
    m, d = rows.shape
    out = np.empty((m + 1, d))
    out[0] = 0.0
    total = np.zeros(d)
    comp = np.zeros(d)
    for lo in range(0, m, _CHUNK):
        block = rows[lo : lo + _CHUNK]
        out[lo + 1 : lo + 1 + block.shape[0]] = (total + comp) + np.cumsum(
            block, axis=0
        )
        t = block.sum(axis=0)
        fresh = total + t
        swap = np.abs(total) >= np.abs(t)
        comp = comp + np.where(swap, (total - fresh) + t, (t - fresh) + total)
        total = fresh
    return out


class SequenceSample:
    """Finite truncation x_1..x_M of a bounded V-valued sequence.

    The declared sup-norm bound is validated eagerly: construction fails if
    any sample exceeds it (a tiny relative grace absorbs norm-evaluation
    rounding on derived data).  The sample array is locked read-only, so
    instances are immutable and safe to share across threads.
    """

    def __init__(self, samples, bound: float, norm: NormSpec | str = "l2"):
        arr = np.asarray(samples, dtype=float)
        if arr.ndim == 1:
            arr = arr[:, np.newaxis]
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("samples must form a nonempty (M, d) array")
        if not np.all(np.isfinite(arr)):
            raise ValueError("samples must be finite")
        spec = _norm_spec(norm)
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
        self.samples = arr
        self.bound = bound
        self.norm = spec

    @property
    def length(self) -> int:
        return self.samples.shape[0]

    @property
    def dim(self) -> int:
        return self.samples.shape[1]

    def at(self, k: int) -> np.ndarray:
        """Entry x_k, 1-indexed."""
        if not 1 <= k <= self.length:
            raise ValueError(f"index {k} outside 1..{self.length}")
        return self.samples[k - 1]

    @cached_property
    def prefix(self) -> np.ndarray:
        """Compensated prefix sums P_0..P_M with P_k = x_1 + ... + x_k."""
        p = kahan_cumsum(self.samples)
        p.setflags(write=False)
        return p

    def __repr__(self):
        return (
            f"SequenceSample(M={self.length}, d={self.dim}, "
            f"bound={self.bound}, norm={self.norm.kind!r})"
        )


def sup_norm(x: SequenceSample) -> float:
    """max_k ||x_k||; never exceeds the declared bound."""
    return float(x.norm.of_rows(x.samples).max())


def shift(x: SequenceSample, k: int) -> SequenceSample:
    """Drop the first k entries: result is x_{k+1}..x_M with the same bound."""
    if not 0 <= k < x.length:
        raise ValueError(f"shift amount {k} outside 0..{x.length - 1}")
    return SequenceSample(x.samples[k:], x.bound, x.norm)


def shift_difference(x: SequenceSample) -> SequenceSample:
    """Termwise shift difference: entry k is x_{k+1} - x_k, length M - 1."""
    if x.length < 2:
        raise ValueError("need at least 2 samples for a shift difference")
    return SequenceSample(x.samples[1:] - x.samples[:-1], 2.0 * x.bound, x.norm)


def sliding_mean(x: SequenceSample, n: int, j: int) -> np.ndarray:
    """Mean of the length-n window at start j: (x_j + ... + x_{j+n-1}) / n."""
    if n < 1:
        raise ValueError("window length must be >= 1")
    if j < 1 or j + n - 1 > x.length:
        raise ValueError(
            f"window [{j}, {j + n - 1}] outside the horizon 1..{x.length}"
        )
    p = x.prefix
    return (p[j + n - 1] - p[j - 1]) / n


def window_means(x: SequenceSample, n: int) -> np.ndarray:
    """Means of every fitting length-n window; row i is the start j = i + 1."""
    if not 1 <= n <= x.length:
        raise ValueError(f"window length {n} outside 1..{x.length}")
    p = x.prefix
    return (p[n:] - p[:-n]) / n


def block_means(x: SequenceSample, n: int) -> np.ndarray:
    """Means of the disjoint stride-n blocks starting at j*n, j = 1, 2, ...

    Block j covers x_{jn} .. x_{jn+n-1}; at least the j = 1 block must fit
    inside the horizon (2n - 1 <= M).
    """
    if n < 1:
        raise ValueError("block length must be >= 1")
    if 2 * n - 1 > x.length:
        raise ValueError(
            f"no stride-{n} block fits in a horizon of {x.length} samples"
        )
    count = (x.length + 1) // n - 1
    starts = n * np.arange(1, count + 1)
    p = x.prefix
    return (p[starts + n - 1] - p[starts - 1]) / n


def constant_sequence(v, count: int, norm: NormSpec | str = "l2") -> SequenceSample:
    """The constant sequence v, v, ..., v of the given length."""
    if count < 1:
        raise ValueError("length must be >= 1")
    vec = as_vector(v)
    spec = _norm_spec(norm)
    return SequenceSample(np.tile(vec, (count, 1)), spec.of(vec), spec)


def _common_norm(x: SequenceSample, y: SequenceSample) -> NormSpec:
    if x.norm.kind != y.norm.kind:
        raise ValueError(f"norm mismatch: {x.norm.kind} vs {y.norm.kind}")
    if x.length != y.length or x.dim != y.dim:
        raise ValueError("sequences must share length and dimension")
    return x.norm


def seq_add(x: SequenceSample, y: SequenceSample, bound: float | None = None):
    """Termwise sum; default declared bound is the sum of the bounds."""
    spec = _common_norm(x, y)
    b = x.bound + y.bound if bound is None else bound
    return SequenceSample(x.samples + y.samples, b, spec)


def seq_sub(x: SequenceSample, y: SequenceSample, bound: float | None = None):
    """Termwise difference; default declared bound is the sum of the bounds."""
    spec = _common_norm(x, y)
    b = x.bound + y.bound if bound is None else bound
    return SequenceSample(x.samples - y.samples, b, spec)


def seq_scale(x: SequenceSample, c: float, bound: float | None = None):
    """Termwise scaling by a scalar."""
    c = float(c)
    b = abs(c) * x.bound if bound is None else bound
    return SequenceSample(c * x.samples, b, x.norm)


def seq_offset(x: SequenceSample, v, bound: float | None = None):
    """Recentred sequence x_k - v (v constant), e.g. around a candidate limit."""
    vec = as_vector(v)
    if vec.size != x.dim:
        raise ValueError(f"offset dimension {vec.size} != sample dimension {x.dim}")
    b = x.bound + x.norm.of(vec) if bound is None else bound
    return SequenceSample(x.samples - vec, b, x.norm)


def truncate(x: SequenceSample, count: int) -> SequenceSample:
    """First `count` samples with bound and norm unchanged."""
    if not 1 <= count <= x.length:
        raise ValueError(f"truncation length {count} outside 1..{x.length}")
    return SequenceSample(x.samples[:count], x.bound, x.norm)


def atomic_write_text(path, text: str) -> None:
    """Write text to path atomically (temp file in the same directory + rename)."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".partial-")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def write_sequence(x: SequenceSample, path) -> None:
    """Write the JSON Lines sequence format: header object, then one vector per line.

    The header carries {"dim", "bound", "norm"}; floats round-trip exactly
    through the shortest-repr encoding, so rereading reproduces the sample
    bit for bit.
    """
    lines = [json.dumps({"dim": x.dim, "bound": x.bound, "norm": x.norm.kind})]
    lines.extend(json.dumps(row.tolist()) for row in x.samples)
    atomic_write_text(path, "\n".join(lines) + "\n")


def _parse_header(path, line: str) -> dict:
    try:
        header = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: header is not valid JSON: {exc}") from exc
    if not isinstance(header, dict):
        raise ValueError(f"{path}: first line must be a JSON header object")
    for key in ("dim", "bound", "norm"):
        if key not in header:
            raise ValueError(f"{path}: header missing {key!r}")
    return header


def read_sequence(path) -> SequenceSample:
    """Read a JSON Lines sequence file written by :func:`write_sequence`."""
    with open(path, "r") as handle:
        lines = [line for line in (raw.strip() for raw in handle) if line]
    if not lines:
        raise ValueError(f"{path}: empty sequence file")
    header = _parse_header(path, lines[0])
    if "step" in header:
        raise ValueError(
            f"{path}: header declares a step; this is a sampled-function file"
        )
    dim = int(header["dim"])
    rows = []
    for i, line in enumerate(lines[1:], start=2):
        try:
            row = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}:{i}: bad sample line: {exc}") from exc
        row = np.atleast_1d(np.asarray(row, dtype=float))
        if row.shape != (dim,):
            raise ValueError(
                f"{path}:{i}: sample has dimension {row.shape}, expected ({dim},)"
            )
        rows.append(row)
    if not rows:
        raise ValueError(f"{path}: no samples after the header")
    return SequenceSample(np.vstack(rows), float(header["bound"]), str(header["norm"]))
