"""Finite-horizon almost-convergence analysis for bounded sequences.

The central objects are window-mean statistics: the sliding statistic takes
the worst Cesaro mean over every start position, the block statistic only
over stride-aligned starts.  Their decay (or failure to decay) separates
sequences that converge in the averaged, shift-uniform sense from ones that
merely look settled on a single window.  The package estimates both curves
at a finite horizon, turns them into verdicts against candidate limits
(strong / quasi / weak via dual probes), audits the exact inequalities the
curves must satisfy, and carries an integral analog for sampled functions.
"""

from .continuous import (
    SampledFunction,
    c_cont,
    check_strong_cont,
    integral_mean,
    read_function,
    tail_integral_mean,
    write_function,
)
from .core import (
    NORM_KINDS,
    NormSpec,
    SequenceSample,
    as_vector,
    block_means,
    complex_to_real,
    constant_sequence,
    kahan_cumsum,
    norm,
    read_sequence,
    seq_add,
    seq_offset,
    seq_scale,
    seq_sub,
    shift,
    shift_difference,
    sliding_mean,
    sup_norm,
    truncate,
    window_means,
    write_sequence,
)
from .corpus import (
    FUNCTION_KINDS,
    SEQUENCE_KINDS,
    GeneratedFunction,
    GeneratedSequence,
    GeneratorSpec,
    generate,
    oracle_block_residual,
    oracle_residual,
    random_instances,
    standard_corpus,
)
from .detect import (
    CauchyReport,
    ProbeSet,
    Verdict,
    candidate_limit,
    check_quasi,
    check_strong,
    check_weak,
    classify,
    convex_hull_audit,
    induced_functional,
    probe_image,
    sa_cauchy_check,
)
from .rng import SplitMix64
from .seminorms import (
    CesaroCurve,
    FeketeViolation,
    PEstimate,
    QEstimate,
    c_block,
    c_sliding,
    estimate_p,
    estimate_q,
    fekete_audit,
    read_curve_csv,
    write_curve_csv,
)

__version__ = "0.1.0"

__all__ = [
    "CauchyReport",
    "CesaroCurve",
    "FeketeViolation",
    "FUNCTION_KINDS",
    "GeneratedFunction",
    "GeneratedSequence",
    "GeneratorSpec",
    "NORM_KINDS",
    "NormSpec",
    "PEstimate",
    "ProbeSet",
    "QEstimate",
    "SampledFunction",
    "SEQUENCE_KINDS",
    "SequenceSample",
    "SplitMix64",
    "Verdict",
    "as_vector",
    "block_means",
    "c_block",
    "c_cont",
    "c_sliding",
    "candidate_limit",
    "check_quasi",
    "check_strong",
    "check_strong_cont",
    "check_weak",
    "classify",
    "complex_to_real",
    "constant_sequence",
    "convex_hull_audit",
    "estimate_p",
    "estimate_q",
    "fekete_audit",
    "generate",
    "induced_functional",
    "integral_mean",
    "kahan_cumsum",
    "norm",
    "oracle_block_residual",
    "oracle_residual",
    "probe_image",
    "random_instances",
    "read_curve_csv",
    "read_function",
    "read_sequence",
    "sa_cauchy_check",
    "seq_add",
    "seq_offset",
    "seq_scale",
    "seq_sub",
    "shift",
    "shift_difference",
    "sliding_mean",
    "standard_corpus",
    "sup_norm",
    "tail_integral_mean",
    "truncate",
    "window_means",
    "write_curve_csv",
    "write_function",
    "write_sequence",
    "__version__",
]
