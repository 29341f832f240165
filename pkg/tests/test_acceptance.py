"""The ten acceptance criteria, each at its stated tolerance.

Every test records (passed, detail) so the run ends with one PASS/FAIL line
per criterion, printed by the terminal-summary hook in conftest.py.
"""
import itertools
import math
import random
import time
import warnings

import pytest

from beta_turan import identities, optimizer, proofcheck, series, turan
from beta_turan.specfun import ParameterPoint

from conftest import ACCEPTANCE

AB = (0.25, 0.5, 1.1, 2.0, 5.0)
ALPHAS = (1, 2, 3)
XS = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6)


def betas(alpha):
    return (0.5, 1.0, 2.7, alpha - 1 + 0.1)


def coeff_grid(ab=AB):
    return [(a, b, al, be) for a, b, al in itertools.product(ab, ab, ALPHAS) for be in betas(al)]


def record(n, ok, detail):
    ACCEPTANCE[n] = (bool(ok), detail)
    assert ok, detail


def test_criterion_01_closed_form_vs_oracle():
    t0 = time.perf_counter()
    worst = 0.0
    for a, b, al, be in coeff_grid():
        p = ParameterPoint(a, b, al, be)
        for oracle, closed in ((series.phi_oracle, turan.phi_k_closed), (series.psi_oracle, turan.psi_k_closed)):
            ora = oracle(p, 50, dps=30).coeffs
            for k in range(51):
                c, o = closed(a, b, al, be, k), float(ora[k])
                worst = max(worst, abs(c - o) / abs(o) if o else abs(c))
    elapsed = time.perf_counter() - t0
    record(1, worst <= 1e-9 and elapsed < 60,
           f"worst relative error {worst:.2e} (tol 1e-9), {elapsed:.1f} s single-threaded (limit 60 s)")


def test_criterion_02_linearizations():
    worst = 0.0
    for a, b, al, be in coeff_grid():
        p = ParameterPoint(a, b, al, be)
        for x in XS:
            checks = [
                turan.psi_linearization_eval(p, x),
                turan.phi_linearization_eval(p, x),
                turan.psi_linearization_n0(a + b, a + 1, be, x),
                turan.phi_linearization_n0(a + b, a + b + be, a + 1, x),
            ]
            for c in checks:
                worst = max(worst, abs(c.lhs - c.rhs) / (1 + abs(c.lhs)))
    record(2, worst <= 1e-9, f"worst |lhs-rhs|/(1+|lhs|) = {worst:.2e} (tol 1e-9)")


def test_criterion_03_exact_identities():
    rep = identities.run_sweep(seed=identities.DEFAULT_SEED, max_mn=12, n_random=100)
    record(3, rep.ok and len(rep.checked) == 4,
           f"{sum(rep.checked.values())} exact checks, {len(rep.failures)} failures, seed {rep.seed}")


def test_criterion_04_sign_theorems():
    ab = (0.25, 0.5, 1.0, 1.1, 2.0, 5.0)
    violations, checked = [], 0
    for a, b, al, be in coeff_grid(ab):
        p = ParameterPoint(a, b, al, be)
        psi = turan.scan_point(p, "psi", 50)
        phi = turan.scan_point(p, "phi", 50)
        wanted = []
        if b < 1:
            wanted.append((psi, "all_negative"))
        elif b == 1:
            wanted.append((psi, "zero"))
        elif be >= al - 1:
            wanted.append((psi, "all_positive"))
        if be >= al - 1:
            wanted.append((phi, "all_positive"))
        for rep, want in wanted:
            checked += 1
            if rep.verdict != want:
                violations.append((p, rep.kind, rep.verdict))
    record(4, not violations, f"{checked} proved sign statements checked, {len(violations)} violations")


BOUND_A = [(a, b, nu) for a, b, nu in itertools.product((1.5, 2, 2.5, 3.3, 5, 8), (1.1, 1.5, 2, 3, 6), (1, 2, 3)) if a > nu]
BOUND_B = [(a, b, nu) for a, b, nu in itertools.product((0.25, 0.5, 1, 2, 5), (1.5, 2, 2.5, 3.5, 6), (1, 2, 3)) if b > nu]


def test_criterion_05_turan_bounds():
    xs = [round(0.05 * i, 2) for i in range(1, 20)]
    bad = 0
    total = 0
    for a, b, nu in BOUND_A:
        for c in turan.check_turan_bounds_a(a, b, nu, xs):
            total += 1
            bad += not c.ok
    for a, b, nu in BOUND_B:
        for c in turan.check_turan_bounds_b(a, b, nu, xs):
            total += 1
            bad += not c.ok
    m_a, _ = turan.turan_bounds_a(2, 2, 1)
    m_b, M_b = turan.turan_bounds_b(1, 2, 1)
    hand = abs(m_a - 1) <= 1e-9 and abs(m_b - 1) <= 1e-9 and abs(M_b - 0.25) <= 1e-9
    record(5, bad == 0 and hand,
           f"{total} chain checks, {bad} broken; hand instances m={m_a:.12g}, (m,M)=({m_b:.12g},{M_b:.12g})")


def test_criterion_06_finite_differences():
    wrong, neutral_max = [], 0.0
    weak = math.inf
    grid = itertools.product((0.25, 0.5, 1, 2, 5), (0.3, 0.7, 1, 1.5, 4), (0.1, 0.3, 0.5, 0.7, 0.9))
    for a, b, x in grid:
        for direction in proofcheck.THEOREMS:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", proofcheck.StepTooSmallWarning)
                v = proofcheck.logconc_fd(a, b, x, direction=direction)
            if direction == "in_a" and b == 1:
                neutral_max = max(neutral_max, abs(v))
                continue
            want = -1 if (direction == "in_b" or b > 1) else 1
            if v * want <= 0:
                wrong.append((a, b, x, direction, v))
            weak = min(weak, abs(v))
    ok = not wrong and weak > 1e-8 and neutral_max <= 1e-6
    record(6, ok, f"{len(wrong)} wrong signs, min |FD| off the neutral line {weak:.2e} (>1e-8), "
                  f"max on it {neutral_max:.2e} (<=1e-6)")


def test_criterion_07_proof_chains():
    mismatches, worst = [], 0.0
    for theorem in proofcheck.THEOREMS:
        for p, other in itertools.product((0.5, 1, 1.5, 2, 3), (1.0, 2.5, 5.0)):
            a, b = (p, other) if theorem == "in_b" else (other, p)
            got = proofcheck.q_sign_pattern(theorem, a, b).pattern
            if got != proofcheck.expected_q_pattern(theorem, a, b):
                mismatches.append((theorem, a, b, got))
        for p, other in itertools.product((0.5, 1, 1.5, 2, 3), (0.7, 1.0, 3.0)):
            a, b = (p, other) if theorem == "in_b" else (other, p)
            for r in proofcheck.chain_consistency(theorem, a, b, (0.1, 0.3, 0.5, 0.7, 0.9)):
                worst = max(worst, r.residual)
    record(7, not mismatches and worst <= 1e-6,
           f"{len(mismatches)} Q pattern mismatches over 30 cases, worst chain residual {worst:.2e} (<=1e-6)")


def test_criterion_08_lemma():
    bad, worst_res, one_max = [], 0.0, 0.0
    for alpha, x in itertools.product((0.2, 0.5, 0.9, 1, 1.5, 3), (0.3, 1, 2, 10)):
        r = proofcheck.lemma_psi_check(alpha, x)
        worst_res = max(worst_res, abs(r.recurrence_residual))
        if alpha == 1:
            one_max = max(one_max, abs(r.f))
        elif (r.f < 0) != (alpha < 1):
            bad.append((alpha, x, r.f))
    record(8, not bad and worst_res <= 1e-11 and one_max <= 1e-12,
           f"{len(bad)} wrong signs, recurrence residual {worst_res:.2e} (<=1e-11), |f| at alpha=1 {one_max:.2e}")


def test_criterion_09_optimizer():
    sol = optimizer.solve(optimizer.LotteryInstance([1], [1], [0.5], 0.5))
    err1 = abs(sol.alpha[0] - 1.0)
    rng = random.Random(7)
    spreads = []
    for i in range(3):
        inst = optimizer.random_instance(rng, 3)
        spreads.append(optimizer.objective_spread(optimizer.multistart(inst, seed=100 + i, starts=10)))
    record(9, err1 <= 1e-8 and max(spreads) <= 1e-6,
           f"|alpha*-1| = {err1:.1e} (<=1e-8), multistart spreads {', '.join(f'{s:.1e}' for s in spreads)} (<=1e-6)")


@pytest.mark.slow
def test_criterion_10_conjecture_scan():
    reports = turan.conjecture_scan(turan.default_scan_grid(), 50)
    mixed = [r for r in reports if r.verdict == "mixed"]
    unconfirmed = [r for r in mixed if not r.counterexample]
    errors = [r for r in reports if r.verdict == "error"]
    confirmed = [r for r in mixed if r.counterexample]
    record(10, not confirmed and not unconfirmed and not errors,
           f"{len(reports)} reports, {len(mixed)} mixed verdicts, {len(confirmed)} confirmed counterexamples, "
           f"{len(errors)} numerical failures")
