import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from beta_turan import series, turan as T
from beta_turan.errors import DomainError, HypothesisError
from beta_turan.specfun import ParameterPoint, inc_beta

XS = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6)


def rel(a, b):
    return abs(a - b) / abs(b) if b else abs(a)


# closed forms

def test_closed_values():
    assert T.psi_k_closed(1, 2, 1, 1, 0) == pytest.approx(1.0, rel=1e-14)
    assert T.phi_k_closed(1, 1, 1, 1, 0) == pytest.approx(1.0, rel=1e-14)


@pytest.mark.parametrize("a, alpha, beta", [(0.5, 1, 0.5), (2.0, 3, 2.7), (5.0, 2, 1.1)])
def test_psi_closed_b_one_is_zero(a, alpha, beta):
    assert all(T.psi_k_closed(a, 1.0, alpha, beta, k) == 0.0 for k in range(20))


@pytest.mark.parametrize("a, b, beta", [(0.5, 0.25, 1.0), (2.0, 5.0, 2.7), (1.1, 1.1, 0.1)])
def test_phi_alpha_one_single_term(a, b, beta):
    lg = math.lgamma
    for k in range(0, 30, 7):
        pre = a * math.exp(lg(a + b) + lg(a + b + beta) - lg(b + 1) - lg(b + beta + 1) - 2 * lg(a + 1)
                           - (lg(a + 1 + k) - lg(a + 1)))
        brace = math.exp(lg(a + b + beta + k + 1) - lg(a + b + beta)) - math.exp(lg(a + b + k + 1) - lg(a + b))
        assert T.phi_k_closed(a, b, 1, beta, k) == pytest.approx(pre * brace, rel=1e-11)


@pytest.mark.parametrize("kind", ["phi", "psi"])
@pytest.mark.parametrize("a, b, alpha, beta", [
    (0.25, 0.5, 1, 0.5), (1.1, 2.0, 2, 1.1), (5.0, 0.25, 3, 2.7), (2.0, 5.0, 3, 2.1),
])
def test_closed_matches_mp_oracle(kind, a, b, alpha, beta):
    p = ParameterPoint(a, b, alpha, beta)
    ora = (series.phi_oracle if kind == "phi" else series.psi_oracle)(p, 50, dps=30).coeffs
    closed = (T.phi_closed_series if kind == "phi" else T.psi_closed_series)(a, b, alpha, beta, 50).coeffs
    assert max(rel(c, o) for c, o in zip(closed, ora)) <= 1e-9


def test_closed_needs_integer_alpha():
    with pytest.raises(DomainError):
        T.psi_k_closed(1, 1, 1.5, 1, 0)
    with pytest.raises(DomainError):
        T.phi_k_closed(1, 1, 0, 1, 0)


@given(st.floats(0.1, 6), st.floats(1.01, 6), st.integers(1, 3), st.integers(0, 40))
def test_psi_closed_sign_b_above_one(a, b, alpha, k):
    beta = alpha - 1 + 0.25
    assert T.psi_k_closed(a, b, alpha, beta, k) > 0


@given(st.floats(0.1, 6), st.floats(0.05, 0.99), st.integers(1, 3), st.floats(0.05, 4), st.integers(0, 40))
def test_psi_closed_sign_b_below_one(a, b, alpha, beta, k):
    assert T.psi_k_closed(a, b, alpha, beta, k) < 0


@given(st.floats(0.1, 6), st.floats(0.1, 6), st.integers(1, 3), st.integers(0, 40))
def test_phi_closed_sign(a, b, alpha, k):
    beta = alpha - 1 + 0.3
    assert T.phi_k_closed(a, b, alpha, beta, k) > 0


# linearizations

def test_linearization_examples():
    assert T.psi_linearization_eval(ParameterPoint(1, 2, 1, 1), 0.3).holds()
    assert T.phi_linearization_eval(ParameterPoint(1, 1, 1, 1), 0.4).holds()
    c = T.psi_linearization_eval(ParameterPoint(0.7, 1.0, 2, 1.5), 0.3)
    assert c.lhs == pytest.approx(0.0, abs=1e-14) and c.rhs == pytest.approx(0.0, abs=1e-14)
    c = T.psi_linearization_eval(ParameterPoint(0.7, 2.0, 2, 1.5), 0.3)
    assert c.lhs > 0 and c.rhs > 0
    c = T.phi_linearization_eval(ParameterPoint(1.3, 2.0, 1, 1e-8), 0.3)
    assert abs(c.lhs) < 1e-6 and abs(c.rhs) < 1e-6


@pytest.mark.parametrize("a, b, alpha, beta", [(0.5, 2.0, 2, 0.5), (5.0, 0.25, 3, 2.1), (1.1, 1.1, 1, 2.7)])
def test_linearizations_on_small_grid(a, b, alpha, beta):
    p = ParameterPoint(a, b, alpha, beta)
    for x in XS:
        assert T.psi_linearization_eval(p, x).holds()
        assert T.phi_linearization_eval(p, x).holds()


@pytest.mark.parametrize("a, b, beta, n", [(0.5, 2.0, 0.5, 0), (2.0, 0.25, 2.7, 2), (5.0, 1.1, 1.0, 1)])
def test_general_linearizations(a, b, beta, n):
    for x in XS:
        assert T.hyp_linearization_psi(a + b, a + 1, beta, n, x).holds()
        assert T.hyp_linearization_phi(a, b, beta, n, x).holds()
        assert T.psi_linearization_n0(a + b, a + 1, beta, x).holds()
        assert T.phi_linearization_n0(a + b, a + b + beta, a + 1, x).holds()


# bounds

def test_bounds_hand_instances():
    m, M = T.turan_bounds_a(2, 2, 1)
    assert m == pytest.approx(1.0, abs=1e-9)
    m, M = T.turan_bounds_b(1, 2, 1)
    assert (m, M) == (pytest.approx(1.0, abs=1e-9), pytest.approx(0.25, abs=1e-9))


@pytest.mark.parametrize("fn, args", [
    (T.turan_bounds_a, (2, 1.0, 1)), (T.turan_bounds_a, (0.5, 2, 2)), (T.turan_bounds_a, (2, 2, 0)),
    (T.turan_bounds_b, (1, 2, 2)), (T.turan_bounds_b, (0, 3, 1)), (T.turan_bounds_b, (1, 3, 1.5)),
])
def test_bound_hypotheses(fn, args):
    with pytest.raises(HypothesisError):
        fn(*args)


def test_lower_bound_exponent_form():
    # with the single powers x^a (1-x)^b the lower bound exceeds the determinant
    a, b, nu, x = 2.0, 2.0, 1, 0.5
    m, _ = T.turan_bounds_a(a, b, nu)
    det = inc_beta(a, b, x) ** 2 - inc_beta(a - nu, b, x) * inc_beta(a + nu, b, x)
    assert m * x ** a * (1 - x) ** b > det
    assert m * x ** (2 * a) * (1 - x) ** (2 * b) <= det
    (chk,) = T.check_turan_bounds_a(a, b, nu, [x])
    assert chk.ok


@pytest.mark.parametrize("a, b, nu", [(2.0, 2.0, 1), (3.3, 1.5, 2), (8.0, 6.0, 3)])
def test_bound_chain_a(a, b, nu):
    xs = [0.05 * i for i in range(1, 20)]
    assert all(c.ok for c in T.check_turan_bounds_a(a, b, nu, xs))


@pytest.mark.parametrize("a, b, nu", [(1.0, 2.0, 1), (0.25, 3.5, 3), (5.0, 6.0, 2)])
def test_bound_chain_b(a, b, nu):
    xs = [0.05 * i for i in range(1, 20)]
    checks = T.check_turan_bounds_b(a, b, nu, xs)
    assert all(c.ok for c in checks)
    m, M = T.turan_bounds_b(a, b, nu)
    for c in checks:
        assert m <= M * inc_beta(a, b, c.x) ** 2 / (c.x ** (2 * a) * (1 - c.x) ** (2 * b)) * (1 + 1e-12)


# sign scan

def test_expected_sign():
    assert T.expected_sign("phi", 0.5) == "+"
    assert [T.expected_sign("psi", b) for b in (0.5, 1.0, 2.0)] == ["-", "0", "+"]


def test_classify_signs():
    assert T.classify_signs(np.array([1.0, 2.0]), 1e-13)[0] == "all_positive"
    assert T.classify_signs(np.array([-1.0, -2.0]), 1e-13)[0] == "all_negative"
    assert T.classify_signs(np.zeros(3), 1e-13)[0] == "zero"
    verdict, first = T.classify_signs(np.array([1.0, -2.0, 3.0]), 1e-13)
    assert verdict == "mixed" and first == 1


def test_sign_report_validation():
    p = ParameterPoint(1, 1, 1, 1)
    with pytest.raises(ValueError):
        T.SignReport(p, "phi", (0, 5), 0.0, "bogus")
    with pytest.raises(ValueError):
        T.SignReport(p, "phi", (0, 5), 0.0, "mixed")


def test_scan_examples():
    grid = [ParameterPoint(a, b, al, be) for a, b, al, be in itertools.product((0.5, 2.0), (0.5, 1.0, 2.0), (1, 2), (1.5, 2.0))]
    reports = T.conjecture_scan(grid, 30, workers=2)
    assert [(r.point, r.kind) for r in reports] == [(p, k) for p in grid for k in ("phi", "psi")]
    for r in reports:
        if r.kind == "phi":
            assert r.verdict == "all_positive"
        elif r.point.b == 0.5:
            assert r.verdict == "all_negative"
        elif r.point.b == 1.0:
            assert r.verdict == "zero"
        else:
            assert r.verdict == "all_positive"
        assert not r.counterexample


def test_scan_records_errors(monkeypatch):
    def boom(*a, **k):
        raise ArithmeticError("simulated")

    monkeypatch.setattr(T, "scan_point", boom)
    (r,) = T.conjecture_scan([ParameterPoint(1, 2, 1, 1)], 5, kinds=("phi",), workers=1)
    assert r.verdict == "error" and "simulated" in r.error


def test_worker_count_env(monkeypatch):
    monkeypatch.setenv("BETA_TURAN_THREADS", "1")
    assert T.worker_count(8) == 1
    monkeypatch.setenv("BETA_TURAN_THREADS", "3")
    assert T.worker_count(8) == 3
