"""Acceptance checks: one test per criterion, one pass/fail line each.

Run with `pytest -v tests/test_acceptance.py`; the verbose listing is the
criterion-by-criterion scoreboard.  Tolerances are pinned in the asserts.
"""

import math
from contextlib import contextmanager

import numpy as np
import pytest

from almostconv.continuous import SampledFunction, check_strong_cont
from almostconv.core import (
    SequenceSample,
    seq_add,
    seq_scale,
    shift_difference,
    sup_norm,
)
from almostconv.corpus import (
    GeneratorSpec,
    generate,
    oracle_block_residual,
    oracle_residual,
    random_instances,
    standard_corpus,
)
from almostconv.detect import (
    ProbeSet,
    candidate_limit,
    check_quasi,
    check_strong,
    check_weak,
    convex_hull_audit,
)
from almostconv.seminorms import c_block, c_sliding, estimate_p, fekete_audit

M = 10_000
TOL = 5e-3
FLOOR = 5e-2


@contextmanager
def criterion(num: int, label: str):
    """Explicit scoreboard line per criterion (shown with -s and on failures)."""
    try:
        yield
    except BaseException:
        print(f"criterion {num:02d} [{label}]: FAIL")
        raise
    print(f"criterion {num:02d} [{label}]: PASS")


@pytest.fixture(scope="module")
def corpus():
    return standard_corpus(M)


def _target(inst):
    return (
        inst.truth
        if inst.truth is not None
        else candidate_limit(inst.sample)
    )


def test_c01_alternating_limit():
    with criterion(1, "alternating limit 1/2"):
        x = generate(GeneratorSpec("alternating", M)).sample
        verdict = check_strong(x, [0.5], 2048, 1e-3)
        assert verdict.status == "converges"
        assert verdict.residual <= 1e-3
        assert abs(candidate_limit(x)[0] - 0.5) <= 1e-6


def test_c02_shift_null_identity():
    with criterion(2, "shifted-difference means vanish at the 2/N rate"):
        for inst in random_instances(50, 4096, seed=20_260_817):
            x = inst.sample
            diff = shift_difference(x)
            cap = 2.0 * sup_norm(x)
            for window in (64, 256, 1024):
                c = estimate_p(diff, window).c_at_N
                assert c <= cap / window + 1e-9 * x.bound, (
                    f"{inst.spec.kind} seed={inst.spec.seed} N={window}: "
                    f"{c} > {cap / window}"
                )


def test_c03_fekete_audit(corpus):
    with criterion(3, "weighted curve subadditivity holds"):
        for inst in corpus:
            curve = estimate_p(inst.sample, 256).curve
            violations = fekete_audit(curve, tol=1e-9 * inst.sample.bound)
            assert violations == [], (
                f"{inst.spec.kind}: {len(violations)} violations, "
                f"worst {violations[0] if violations else None}"
            )


def test_c04_block_le_sliding(corpus):
    with criterion(4, "block statistic never exceeds sliding"):
        for inst in corpus:
            x = inst.sample
            for n in range(1, 1025):
                assert c_block(x, n) <= c_sliding(x, n), (
                    f"{inst.spec.kind} n={n}"
                )


def test_c05_strong_quasi_equivalence(corpus):
    with criterion(5, "strong and quasi verdicts coincide"):
        for inst in corpus:
            v = _target(inst)
            s = check_strong(inst.sample, v, 1024, TOL, FLOOR)
            q = check_quasi(inst.sample, v, 1024, TOL, FLOOR)
            assert s.status == q.status, (
                f"{inst.spec.kind}: strong={s.status} ({s.residual:.3e}) "
                f"quasi={q.status} ({q.residual:.3e})"
            )
            assert s.status in ("converges", "diverges"), (
                f"{inst.spec.kind}: inconclusive at desk scale"
            )


def test_c06_negative_instance():
    with criterion(6, "oscillating blocks diverge for every candidate"):
        x = generate(GeneratorSpec("doubling_blocks", 2**14)).sample
        for v in np.arange(-1.0, 2.0 + 0.025, 0.05):
            verdict = check_strong(x, [float(v)], 2048, 1e-3)
            assert verdict.status == "diverges", f"v={v}: {verdict.status}"
            assert verdict.residual >= 0.45, f"v={v}: {verdict.residual}"


def test_c07_oracle_equivalence():
    with criterion(7, "fast residuals match termwise oracles"):
        for inst in random_instances(200, 256, seed=424_242):
            x = inst.sample
            grace = 1e-9 * max(x.bound, 1.0)
            for v in (np.zeros(x.dim), candidate_limit(x)):
                for n in (1, 5, 21):
                    assert abs(
                        c_sliding(x, n, center=v) - oracle_residual(x, v, n)
                    ) <= grace
                    assert abs(
                        c_block(x, n, center=v) - oracle_block_residual(x, v, n)
                    ) <= grace


def test_c08_seminorm_axioms():
    with criterion(8, "homogeneity and triangle inequality"):
        rng = np.random.default_rng(2026)
        n = 13
        for _ in range(500):
            d = int(rng.integers(1, 4))
            a = rng.uniform(-1.0, 1.0, size=(128, d))
            b = rng.uniform(-1.0, 1.0, size=(128, d))
            x = SequenceSample(a, float(np.abs(a).max()) * d + 1e-9, "l1")
            y = SequenceSample(b, float(np.abs(b).max()) * d + 1e-9, "l1")
            alpha = float(rng.uniform(-5.0, 5.0))
            lhs = c_sliding(seq_scale(x, alpha), n)
            rhs = abs(alpha) * c_sliding(x, n)
            assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-15)
            total = x.bound + y.bound
            assert c_sliding(seq_add(x, y), n) <= (
                c_sliding(x, n) + c_sliding(y, n) + 1e-9 * total
            )


def test_c09_convergent_sequences():
    with criterion(9, "v + u/n converges at the harmonic rate"):
        u = np.array([0.06, -0.08])
        spec = GeneratorSpec(
            "convergent", M, dim=2,
            params={"limit": [0.3, -0.7], "decay": u.tolist()},
        )
        inst = generate(spec)
        verdict = check_strong(inst.sample, inst.truth, 1024, 1e-3)
        assert verdict.status == "converges"
        cap = float(np.linalg.norm(u)) * math.log(M) / 1024 + 1e-6
        assert verdict.residual <= cap, f"{verdict.residual} > {cap}"


def test_c10_weak_strong_agreement(corpus):
    with criterion(10, "coordinate-probe weak checks track strong"):
        for inst in corpus:
            x = inst.sample
            v = _target(inst)
            probes = ProbeSet.coordinates(x.dim, x.norm)
            s = check_strong(x, v, 1024, TOL, FLOOR)
            w = check_weak(x, v, probes, 1024, TOL, FLOOR)
            assert w.residual <= s.residual + 1e-9 * x.bound, (
                f"{inst.spec.kind}: weak {w.residual} > strong {s.residual}"
            )
            assert w.status == s.status, (
                f"{inst.spec.kind}: weak={w.status} strong={s.status}"
            )


def test_c11_convex_hull(corpus):
    with criterion(11, "limits of converging instances lie in the hull"):
        checked = 0
        for inst in corpus:
            x = inst.sample
            if x.dim > 2:
                continue
            v = _target(inst)
            if check_strong(x, v, 1024, TOL, FLOOR).status != "converges":
                continue
            assert convex_hull_audit(x, v) <= 1e-6, inst.spec.kind
            checked += 1
        assert checked >= 3  # alternating, periodic, rotation at least


def test_c12_continuous_analog():
    with criterion(12, "integral means of sin vanish at the 2/t rate"):
        h = 1e-3
        grid = np.arange(0.0, 2000.0 + h / 2, h)
        f = SampledFunction(np.sin(grid)[:, None], h, 1.0, "l2")
        verdict = check_strong_cont(f, [0.0], 1000.0, 0.01)
        assert verdict.status == "converges"
        for t in (100.0, 300.0, 1000.0):
            v = check_strong_cont(f, [0.0], t, 0.01)
            assert v.residual <= 2.0 / t + 1e-5, f"t={t}: {v.residual}"


def test_c13_subsequence_caveat():
    with criterion(13, "subsequence limits disagree with the full limit"):
        x = generate(GeneratorSpec("alternating", M)).sample
        odd = SequenceSample(x.samples[0::2], 1.0, "l2")
        even = SequenceSample(x.samples[1::2], 1.0, "l2")
        assert candidate_limit(odd)[0] == pytest.approx(1.0, abs=1e-9)
        assert candidate_limit(even)[0] == pytest.approx(0.0, abs=1e-9)
        assert candidate_limit(x)[0] == pytest.approx(0.5, abs=1e-6)
