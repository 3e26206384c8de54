"""Command line interface: analyze sequences, check explicit limits, generate
corpus files, audit curve subadditivity, and run the integral analog.

Exit codes are the machine contract: 0 converges, 1 diverges,
2 inconclusive, 3 runtime error (unreadable or malformed input),
4 usage error.  Human-readable stdout is informational only.  Reports echo
every effective parameter so a run is reproducible from its report alone,
and all output files are written atomically.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from .continuous import (
    check_strong_cont,
    read_function,
    tail_integral_mean,
    write_function,
)
from .core import (
    NORM_KINDS,
    NormSpec,
    SequenceSample,
    as_vector,
    atomic_write_text,
    read_sequence,
    write_sequence,
)
from .corpus import GeneratedFunction, GeneratedSequence, GeneratorSpec, generate
from .detect import (
    PROBE_SEED,
    ProbeSet,
    candidate_limit,
    check_quasi,
    check_strong,
    check_weak,
    convex_hull_audit,
)
from .seminorms import (
    CesaroCurve,
    c_block,
    c_sliding,
    estimate_p,
    estimate_q,
    fekete_audit,
    read_curve_csv,
    write_curve_csv,
)

__all__ = ["main", "run", "build_parser", "RunConfig"]

EXIT_CONVERGES = 0
EXIT_DIVERGES = 1
EXIT_INCONCLUSIVE = 2
EXIT_ERROR = 3
EXIT_USAGE = 4

_STATUS_EXIT = {
    "converges": EXIT_CONVERGES,
    "diverges": EXIT_DIVERGES,
    "inconclusive": EXIT_INCONCLUSIVE,
}

DEFAULT_TOL = 1e-3
WINDOW_CAP = 4096

THREADS_ENV = "ALMOSTCONV_THREADS"

_CONFIG_KEYS = (
    "input",
    "spec",
    "window",
    "tol",
    "norm",
    "check_limit",
    "out_report",
    "out_curve",
    "out_data",
    "seed",
    "continuous_step",
)


class CLIError(Exception):
    """Anticipated runtime failure; rendered as a message and exit code 3."""


@dataclass
class RunConfig:
    """Effective options for one command after merging flags and config file."""

    command: str
    input: str | None = None
    spec: str | None = None
    window: float | None = None
    tol: float | None = None
    norm: str | None = None
    check_limit: str | None = None
    out_report: str | None = None
    out_curve: str | None = None
    out_data: str | None = None
    seed: int | None = None
    continuous_step: float | None = None
    threads: int = 1


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors, which would collide with the
    # "inconclusive" exit code; route usage failures to 4 instead.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--input", help="input file (JSON Lines data, or curve CSV for fekete)")
    parser.add_argument("--spec", help="generator spec JSON file")
    parser.add_argument("--window", type=float,
                        help="window cap N (sequences) or duration t (continuous)")
    parser.add_argument("--tol", type=float, help="convergence tolerance (default 1e-3)")
    parser.add_argument("--norm", choices=list(NORM_KINDS), help="norm override")
    parser.add_argument("--check-limit", dest="check_limit",
                        help="candidate limit, comma-separated components")
    parser.add_argument("--out-report", dest="out_report", help="write the JSON report here")
    parser.add_argument("--out-curve", dest="out_curve", help="write the curve CSV here")
    parser.add_argument("--out-data", dest="out_data",
                        help="write generated data here (generate command)")
    parser.add_argument("--seed", type=int, help="seed override for generation and probes")
    parser.add_argument("--continuous-step", dest="continuous_step", type=float,
                        help="grid step for generated functions")
    parser.add_argument("--config", help="JSON config file; explicit flags win")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="almostconv",
                     description="Finite-horizon almost-convergence analysis")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, blurb in (
        ("analyze", "estimate a candidate limit and run every check against it"),
        ("check", "test an explicit candidate limit (requires --check-limit)"),
        ("generate", "materialize a generator spec into a data file"),
        ("fekete", "audit window-curve subadditivity"),
        ("continuous", "strong check for a sampled function"),
    ):
        _add_common(sub.add_parser(name, help=blurb, description=blurb))
    return parser


def _read_threads() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None:
        return 1
    try:
        value = int(raw)
    except ValueError:
        raise CLIError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if value < 1:
        raise CLIError(f"{THREADS_ENV} must be >= 1, got {value}")
    return value


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    merged: dict = {}
    if args.config is not None:
        try:
            with open(args.config) as handle:
                data = json.load(handle)
        except OSError as exc:
            raise CLIError(f"cannot read config file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise CLIError(f"config file is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise CLIError("config file must hold a JSON object")
        unknown = set(data) - set(_CONFIG_KEYS)
        if unknown:
            raise CLIError(f"unknown config keys: {sorted(unknown)}")
        merged.update(data)
    for key in _CONFIG_KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            merged[key] = flag  # flags win over the config file
    cfg = RunConfig(command=args.command, threads=_read_threads())
    for key, value in merged.items():
        setattr(cfg, key, value)
    if cfg.norm is not None and cfg.norm not in NORM_KINDS:
        raise CLIError(f"unknown norm {cfg.norm!r}")
    return cfg


def _parse_limit(text: str) -> np.ndarray:
    try:
        return as_vector([float(part) for part in text.split(",")])
    except ValueError as exc:
        raise CLIError(f"bad --check-limit {text!r}: {exc}") from exc


def _load_spec(cfg: RunConfig) -> GeneratorSpec:
    try:
        with open(cfg.spec) as handle:
            data = json.load(handle)
    except OSError as exc:
        raise CLIError(f"cannot read spec file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CLIError(f"spec file is not valid JSON: {exc}") from exc
    try:
        spec = GeneratorSpec.from_json(data)
    except ValueError as exc:
        raise CLIError(str(exc)) from exc
    if cfg.seed is not None:
        spec.seed = int(cfg.seed)
    if cfg.norm is not None:
        spec.norm = cfg.norm
    if cfg.continuous_step is not None:
        spec.params["step"] = float(cfg.continuous_step)
    return spec


def _load_sequence(cfg: RunConfig) -> tuple[SequenceSample, np.ndarray | None, str]:
    """Sequence from --input or --spec, with optional norm override."""
    if cfg.input is not None:
        try:
            sample = read_sequence(cfg.input)
        except OSError as exc:
            raise CLIError(f"cannot read input: {exc}") from exc
        except ValueError as exc:
            raise CLIError(str(exc)) from exc
        truth = None
        source = cfg.input
    elif cfg.spec is not None:
        made = generate(_load_spec(cfg))
        if isinstance(made, GeneratedFunction):
            raise CLIError("spec generates a sampled function; use the continuous command")
        sample, truth, source = made.sample, made.truth, cfg.spec
    else:
        raise CLIError("need --input or --spec")
    if cfg.norm is not None and cfg.norm != sample.norm.kind:
        # Rebind under the requested norm; the declared bound no longer
        # applies, so re-declare the achieved sup as the bound.
        achieved = float(NormSpec(cfg.norm).of_rows(sample.samples).max())
        sample = SequenceSample(sample.samples, achieved, cfg.norm)
    return sample, truth, source


def _sequence_window(cfg: RunConfig, sample: SequenceSample) -> int:
    if cfg.window is None:
        return max(1, min(sample.length // 2, WINDOW_CAP))
    window = cfg.window
    if window != int(window):
        raise CLIError(f"--window must be an integer window cap, got {window!r}")
    window = int(window)
    if not 1 <= window <= sample.length // 2:
        raise CLIError(
            f"--window {window} outside 1..{sample.length // 2} "
            f"for horizon {sample.length}"
        )
    return window


def _effective(cfg: RunConfig, **extra) -> dict:
    base = {
        "tolerance": cfg.tol if cfg.tol is not None else DEFAULT_TOL,
        "norm": cfg.norm,
        "seed": cfg.seed,
        "threads": cfg.threads,
    }
    base.update(extra)
    return base


def _emit(cfg: RunConfig, report: dict) -> None:
    if cfg.out_report is not None:
        atomic_write_text(cfg.out_report, json.dumps(report, indent=2) + "\n")
        print(f"report -> {cfg.out_report}")


def _print_verdict(label: str, verdict) -> None:
    print(f"{label}: {verdict.status} (residual {verdict.residual:.6g}, "
          f"tolerance {verdict.tolerance:g})")


def cmd_analyze(cfg: RunConfig) -> int:
    sample, truth, source = _load_sequence(cfg)
    window = _sequence_window(cfg, sample)
    tol = cfg.tol if cfg.tol is not None else DEFAULT_TOL
    candidate = candidate_limit(sample)
    strong = check_strong(sample, candidate, window, tol)
    quasi = check_quasi(sample, candidate, window, tol)
    probes = ProbeSet.default(sample.dim, sample.norm,
                              seed=cfg.seed if cfg.seed is not None else PROBE_SEED)
    weak = check_weak(sample, candidate, probes, window, tol)
    hull = convex_hull_audit(sample, candidate) if sample.dim <= 2 else None
    p_est = estimate_p(sample, window)
    q_est = estimate_q(sample, window)
    curve_file = None
    if cfg.out_curve is not None:
        residual_sliding = np.array(
            [c_sliding(sample, n, center=candidate) for n in range(1, window + 1)]
        )
        residual_block = np.array(
            [c_block(sample, n, center=candidate) for n in range(1, window + 1)]
        )
        write_curve_csv(cfg.out_curve, p_est.curve, q_est.curve,
                        residual_sliding, residual_block)
        curve_file = cfg.out_curve
        print(f"curves -> {curve_file}")
    report = {
        "command": "analyze",
        "source": source,
        "effective": _effective(
            cfg,
            window=window,
            horizon=sample.length,
            dim=sample.dim,
            bound=sample.bound,
            norm=sample.norm.kind,
            divergence_floor=strong.divergence_floor,
        ),
        "candidate": [float(c) for c in candidate],
        "candidate_source": "estimated",
        "known_truth": None if truth is None else [float(c) for c in truth],
        "estimates": {
            "c_at_window": p_est.c_at_N,
            "running_min": p_est.running_min,
            "tail_max": q_est.tail_max,
        },
        "verdicts": {
            "strong": strong.to_json(curve_file=curve_file),
            "quasi": quasi.to_json(),
            "weak": weak.to_json(),
        },
        "hull_distance": hull,
    }
    print(f"analyze: M={sample.length} d={sample.dim} norm={sample.norm.kind} "
          f"N={window} tol={tol:g}")
    print(f"candidate: {[float(c) for c in candidate]}")
    _print_verdict("strong", strong)
    _print_verdict("quasi", quasi)
    _print_verdict("weak", weak)
    if hull is not None:
        print(f"hull distance: {hull:.6g}")
    _emit(cfg, report)
    return _STATUS_EXIT[strong.status]


def cmd_check(cfg: RunConfig) -> int:
    if cfg.check_limit is None:
        raise CLIError("check needs --check-limit")
    sample, _, source = _load_sequence(cfg)
    target = _parse_limit(cfg.check_limit)
    if target.size != sample.dim:
        raise CLIError(
            f"--check-limit dimension {target.size} != sample dimension {sample.dim}"
        )
    window = _sequence_window(cfg, sample)
    tol = cfg.tol if cfg.tol is not None else DEFAULT_TOL
    strong = check_strong(sample, target, window, tol)
    quasi = check_quasi(sample, target, window, tol)
    report = {
        "command": "check",
        "source": source,
        "effective": _effective(
            cfg,
            window=window,
            horizon=sample.length,
            dim=sample.dim,
            bound=sample.bound,
            norm=sample.norm.kind,
            divergence_floor=strong.divergence_floor,
        ),
        "candidate": [float(c) for c in target],
        "candidate_source": "user",
        "verdicts": {"strong": strong.to_json(), "quasi": quasi.to_json()},
    }
    print(f"check: M={sample.length} d={sample.dim} N={window} tol={tol:g} "
          f"target={[float(c) for c in target]}")
    _print_verdict("strong", strong)
    _print_verdict("quasi", quasi)
    _emit(cfg, report)
    return _STATUS_EXIT[strong.status]


def cmd_generate(cfg: RunConfig) -> int:
    if cfg.spec is None:
        raise CLIError("generate needs --spec")
    if cfg.out_data is None:
        raise CLIError("generate needs --out-data")
    made = generate(_load_spec(cfg))
    if isinstance(made, GeneratedSequence):
        write_sequence(made.sample, cfg.out_data)
        horizon = made.sample.length
        dim = made.sample.dim
        bound = made.sample.bound
        norm_kind = made.sample.norm.kind
        step = None
    else:
        write_function(made.function, cfg.out_data)
        horizon = made.function.grid_count
        dim = made.function.dim
        bound = made.function.bound
        norm_kind = made.function.norm.kind
        step = made.function.step
    report = {
        "command": "generate",
        "spec": made.spec.to_json(),
        "effective": _effective(
            cfg, window=None, horizon=horizon, dim=dim, bound=bound,
            norm=norm_kind, step=step, seed=made.spec.seed,
        ),
        "truth": None if made.truth is None else [float(c) for c in made.truth],
        "data_file": cfg.out_data,
    }
    print(f"generate: {made.spec.kind} -> {cfg.out_data} "
          f"(horizon {horizon}, dim {dim}, bound {bound:g})")
    _emit(cfg, report)
    return EXIT_CONVERGES


def _curve_from_csv(cfg: RunConfig) -> CesaroCurve:
    columns = read_curve_csv(cfg.input)
    if "c_sliding" not in columns:
        raise CLIError(f"{cfg.input}: curve file lacks a c_sliding column")
    values = columns["c_sliding"]
    # Standalone curve files carry no declared bound; c_1 is the sup-norm of
    # the underlying sample, a tight (stricter) stand-in for the audit slack.
    return CesaroCurve("sliding", values, None, NormSpec(cfg.norm or "l2"),
                       float(values[0]))


def cmd_fekete(cfg: RunConfig) -> int:
    if cfg.input is None and cfg.spec is None:
        raise CLIError("fekete needs --input (sequence or curve CSV) or --spec")
    if cfg.input is not None and cfg.input.endswith(".csv"):
        curve = _curve_from_csv(cfg)
        source = cfg.input
        horizon = None
    else:
        sample, _, source = _load_sequence(cfg)
        window = _sequence_window(cfg, sample)
        curve = estimate_p(sample, window).curve
        horizon = sample.length
    violations = fekete_audit(curve)
    report = {
        "command": "fekete",
        "source": source,
        "effective": _effective(
            cfg, window=curve.max_window, horizon=horizon,
            norm=curve.norm.kind, bound=curve.bound,
        ),
        "violations": [
            {"m": v.m, "n": v.n, "slack": v.slack} for v in violations
        ],
        "violation_count": len(violations),
    }
    print(f"fekete: {curve.max_window} window lengths audited, "
          f"{len(violations)} violation(s)")
    for v in violations[:10]:
        print(f"  m={v.m} n={v.n} slack={v.slack:.3e}")
    _emit(cfg, report)
    return EXIT_CONVERGES if not violations else EXIT_DIVERGES


def cmd_continuous(cfg: RunConfig) -> int:
    if cfg.input is not None:
        try:
            func = read_function(cfg.input)
        except OSError as exc:
            raise CLIError(f"cannot read input: {exc}") from exc
        except ValueError as exc:
            raise CLIError(str(exc)) from exc
        source = cfg.input
        truth = None
    elif cfg.spec is not None:
        made = generate(_load_spec(cfg))
        if isinstance(made, GeneratedSequence):
            raise CLIError("spec generates a sequence; use analyze or check")
        func, truth, source = made.function, made.truth, cfg.spec
    else:
        raise CLIError("need --input or --spec")
    tol = cfg.tol if cfg.tol is not None else DEFAULT_TOL
    if cfg.window is not None:
        duration = cfg.window
    else:
        duration = (func.grid_count // 2) * func.step  # exact grid multiple
    if cfg.check_limit is not None:
        target = _parse_limit(cfg.check_limit)
        candidate_source = "user"
    else:
        target = tail_integral_mean(func)
        candidate_source = "estimated"
    if target.size != func.dim:
        raise CLIError(
            f"candidate dimension {target.size} != function dimension {func.dim}"
        )
    try:
        verdict = check_strong_cont(func, target, duration, tol)
    except ValueError as exc:
        raise CLIError(str(exc)) from exc
    report = {
        "command": "continuous",
        "source": source,
        "effective": _effective(
            cfg,
            window=verdict.window,
            duration=verdict.window * func.step,
            horizon=func.grid_count,
            dim=func.dim,
            bound=func.bound,
            norm=func.norm.kind,
            step=func.step,
            divergence_floor=verdict.divergence_floor,
        ),
        "candidate": [float(c) for c in target],
        "candidate_source": candidate_source,
        "known_truth": None if truth is None else [float(c) for c in truth],
        "verdicts": {"strong": verdict.to_json()},
        "notes": [
            "offsets are restricted to the sample grid; the sup over "
            "continuous offsets is not estimated beyond grid resolution"
        ],
    }
    print(f"continuous: K={func.grid_count} h={func.step:g} "
          f"t={verdict.window * func.step:g} tol={tol:g}")
    _print_verdict("strong", verdict)
    _emit(cfg, report)
    return _STATUS_EXIT[verdict.status]


_COMMANDS = {
    "analyze": cmd_analyze,
    "check": cmd_check,
    "generate": cmd_generate,
    "fekete": cmd_fekete,
    "continuous": cmd_continuous,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _resolve_config(args)
        return _COMMANDS[args.command](cfg)
    except CLIError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
