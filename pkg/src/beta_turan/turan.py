"""Closed-form Turán determinant coefficients, linearization identities,
two-sided Turán bounds and the coefficient sign scanner.

Notation: for shifts in the second parameter

    phi(x) = I_x(a,b+alpha) I_x(a,b+beta) - I_x(a,b) I_x(a,b+alpha+beta)
           = x^{2a} (1-x)^{2b+alpha+beta} sum_k phi_k x^k,

and for shifts in the first parameter

    psi(x) = I_x(a+alpha,b) I_x(a+beta,b) - I_x(a,b) I_x(a+alpha+beta,b)
           = x^{2a+alpha+beta} (1-x)^{2b} sum_k psi_k x^k.

The closed forms require integer ``alpha``; non-integer shifts are handled by
the brute-force oracles in ``series``.
"""
from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from . import series
from .errors import ConvergenceError, DomainError, HypothesisError
from .specfun import ParameterPoint, gauss_2f1_unit, inc_beta, log_inc_beta

lgamma = math.lgamma

NOISE_FLOOR = 1e-13
REVERIFY_DPS = 40
VERDICTS = ("all_positive", "all_negative", "mixed", "indeterminate", "zero", "error")

DEFAULT_SCAN_AB = (0.1, 0.25, 0.5, 0.9, 1.1, 2.0, 5.0)
DEFAULT_SCAN_SHIFTS = (0.3, 0.7, 1.0, 1.6, 2.0, 3.5)


# --- helpers -----------------------------------------------------------------

def _check_int_alpha(alpha):
    if isinstance(alpha, bool) or int(alpha) != alpha or alpha < 1:
        raise DomainError(f"alpha must be a positive integer, got {alpha!r}")
    return int(alpha)


def _check_closed_args(a, b, alpha, beta, k):
    if not (a > 0 and b > 0 and beta > 0):
        raise DomainError(f"need a, b, beta > 0, got a={a!r}, b={b!r}, beta={beta!r}")
    if int(k) != k or k < 0:
        raise DomainError(f"k must be a nonnegative integer, got {k!r}")
    return _check_int_alpha(alpha), int(k)


def _log_poch_ratio(z, c, n):
    """log[(z+c)_n / (z)_n] as a sum of log1p terms (exactly 0 when c == 0)."""
    return math.fsum(math.log1p(c / (z + i)) for i in range(n))


def _log_poch(z, n):
    return lgamma(z + n) - lgamma(z)


def _exp_diff(l1, l2):
    """(sign, log|e^l1 - e^l2|); log is -inf when the two are equal."""
    if l1 == l2:
        return 0.0, -math.inf
    hi, lo, sign = (l1, l2, 1.0) if l1 > l2 else (l2, l1, -1.0)
    return sign, hi + math.log(-math.expm1(lo - hi))


def _signed_exp(sign, log_mag):
    return 0.0 if sign == 0.0 else sign * math.exp(log_mag)


# --- closed-form coefficients ------------------------------------------------

def _psi_log_prefactor(a, b, alpha, beta, j):
    return (lgamma(a + b + j) + lgamma(a + b + beta + alpha - j - 1)
            - 2.0 * lgamma(b) - lgamma(a + j + 1) - lgamma(a + beta + alpha - j))


def _phi_log_prefactor(a, b, alpha, beta, j):
    return (math.log(a) + lgamma(a + b + j) + lgamma(a + b + beta + alpha - j - 1)
            - 2.0 * lgamma(a + 1) - lgamma(b + j + 1) - lgamma(b + beta + alpha - j))


def psi_k_closed(a: float, b: float, alpha: int, beta: float, k: int) -> float:
    """psi_k from the finite j-sum over 0..alpha-1 (integer alpha only).

    Each brace {(a+b+j)_{k+1}/(a+j+1)_{k+1} - (a+b+beta+alpha-1-j)_{k+1}/(a+beta+alpha-j)_{k+1}}
    is formed from log-Pochhammer ratios as sign * exp(max) * (1 - exp(min - max)).
    """
    alpha, k = _check_closed_args(a, b, alpha, beta, k)
    total = []
    for j in range(alpha):
        l1 = _log_poch_ratio(a + j + 1, b - 1.0, k + 1)
        l2 = _log_poch_ratio(a + beta + alpha - j, b - 1.0, k + 1)
        sign, lmag = _exp_diff(l1, l2)
        total.append(_signed_exp(sign, _psi_log_prefactor(a, b, alpha, beta, j) + lmag))
    return math.fsum(total)


def phi_k_closed(a: float, b: float, alpha: int, beta: float, k: int) -> float:
    """phi_k from the finite j-sum over 0..alpha-1 (integer alpha only).

    The brace (a+b+beta+alpha-j-1)_{k+1} - (a+b+j)_{k+1} is taken relative to
    (a+b+j)_{k+1}, with the ratio built from log1p terms of the exact shift
    beta + alpha - 1 - 2j.
    """
    alpha, k = _check_closed_args(a, b, alpha, beta, k)
    lp_k = _log_poch(a + 1, k)
    total = []
    for j in range(alpha):
        base = a + b + j
        l_lo = _log_poch(base, k + 1)
        l_hi = l_lo + _log_poch_ratio(base, beta + alpha - 1.0 - 2.0 * j, k + 1)
        sign, lmag = _exp_diff(l_hi, l_lo)
        total.append(_signed_exp(sign, _phi_log_prefactor(a, b, alpha, beta, j) - lp_k + lmag))
    return math.fsum(total)


def psi_closed_series(a, b, alpha, beta, N=series.DEFAULT_ORDER) -> series.TruncatedSeries:
    return series.TruncatedSeries([psi_k_closed(a, b, alpha, beta, k) for k in range(N + 1)])


def phi_closed_series(a, b, alpha, beta, N=series.DEFAULT_ORDER) -> series.TruncatedSeries:
    return series.TruncatedSeries([phi_k_closed(a, b, alpha, beta, k) for k in range(N + 1)])


# --- linearization identities -------------------------------------------------

class IdentityCheck(NamedTuple):
    lhs: float
    rhs: float

    @property
    def residual(self) -> float:
        return abs(self.lhs - self.rhs)

    def holds(self, tol: float = 1e-9) -> bool:
        return self.residual <= tol * (1.0 + abs(self.lhs))


def _x_of(point, x_eval):
    x = point.x if x_eval is None else x_eval
    if not 0 < x < 1:
        raise DomainError(f"x must lie in (0, 1), got {x!r}")
    return x


def _reduced_in_a(s, b, x):
    # I_x(s, b) / (x^s (1-x)^b)
    return math.exp(log_inc_beta(s, b, x) - s * math.log(x) - b * math.log1p(-x))


def _reduced_in_b(a, s, x):
    # I_x(a, s) / (x^a (1-x)^s)
    return math.exp(log_inc_beta(a, s, x) - a * math.log(x) - s * math.log1p(-x))


def psi_linearization_eval(point: ParameterPoint, x_eval: Optional[float] = None) -> IdentityCheck:
    """Both sides of the a-shift linearization identity at one x.

    lhs is psi(x) / (x^{2a+alpha+beta} (1-x)^{2b}) from incomplete beta values;
    rhs is the j-sum of differences of 2F1(1, .; .; x) values.
    """
    a, b, beta = point.a, point.b, point.beta
    alpha = _check_int_alpha(point.alpha)
    x = _x_of(point, x_eval)
    lo, hi = sorted((alpha, beta))
    lhs = (_reduced_in_a(a + lo, b, x) * _reduced_in_a(a + hi, b, x)
           - _reduced_in_a(a, b, x) * _reduced_in_a(a + alpha + beta, b, x))
    terms = []
    for j in range(alpha):
        z1 = a + j + 1
        z2 = a + beta + alpha - j
        brace = ((a + b + j) / z1 * gauss_2f1_unit(a + b + j + 1, z1 + 1, x)
                 - (z2 + b - 1) / z2 * gauss_2f1_unit(z2 + b, z2 + 1, x))
        terms.append(math.exp(_psi_log_prefactor(a, b, alpha, beta, j)) * brace)
    return IdentityCheck(lhs, math.fsum(terms))


def phi_linearization_eval(point: ParameterPoint, x_eval: Optional[float] = None) -> IdentityCheck:
    """Both sides of the b-shift linearization identity at one x.

    lhs is phi(x) / (x^{2a} (1-x)^{2b+alpha+beta}); rhs is the j-sum of
    (a+b+beta+alpha-j-1) 2F1(1, a+b+beta+alpha-j; a+1; x) - (a+b+j) 2F1(1, a+b+j+1; a+1; x)
    weighted by gamma ratios.
    """
    a, b, beta = point.a, point.b, point.beta
    alpha = _check_int_alpha(point.alpha)
    x = _x_of(point, x_eval)
    lo, hi = sorted((alpha, beta))
    lhs = (_reduced_in_b(a, b + lo, x) * _reduced_in_b(a, b + hi, x)
           - _reduced_in_b(a, b, x) * _reduced_in_b(a, b + alpha + beta, x))
    terms = []
    for j in range(alpha):
        top = a + b + beta + alpha - j - 1
        brace = (top * gauss_2f1_unit(top + 1, a + 1, x)
                 - (a + b + j) * gauss_2f1_unit(a + b + j + 1, a + 1, x))
        terms.append(math.exp(_phi_log_prefactor(a, b, alpha, beta, j)) * brace)
    return IdentityCheck(lhs, math.fsum(terms))


def _poch_float(z, n):
    out = 1.0
    for i in range(n):
        out *= z + i
    return out


def hyp_linearization_psi(a: float, c: float, beta: float, n: int, x: float) -> IdentityCheck:
    """Quadratic form in 2F1(1, .; .; x) with first-parameter shifts, linearized.

    (a)_{n+1}/(c)_{n+1} F(a+n+1; c+n+1) F(a+beta; c+beta)
      - (a+beta)_{n+1}/(c+beta)_{n+1} F(a; c) F(a+beta+n+1; c+beta+n+1)
    against the j-sum over 0..n.  ``F(p; q)`` is 2F1(1, p; q; x).
    """
    F = lambda p, q: gauss_2f1_unit(p, q, x)  # noqa: E731
    lhs = (_poch_float(a, n + 1) / _poch_float(c, n + 1) * F(a + n + 1, c + n + 1) * F(a + beta, c + beta)
           - _poch_float(a + beta, n + 1) / _poch_float(c + beta, n + 1) * F(a, c) * F(a + beta + n + 1, c + beta + n + 1))
    terms = []
    for j in range(n + 1):
        w = (_poch_float(a, j) * _poch_float(a + beta, n - j)
             / (_poch_float(c, j) * _poch_float(c + beta, n - j)))
        brace = ((a + j) / (c + j) * F(a + j + 1, c + j + 1)
                 - (a + beta + n - j) / (c + beta + n - j) * F(a + beta + n + 1 - j, c + beta + n + 1 - j))
        terms.append(w * brace)
    return IdentityCheck(lhs, math.fsum(terms))


def hyp_linearization_phi(a: float, b: float, beta: float, n: int, x: float) -> IdentityCheck:
    """Quadratic form in 2F1(1, .; a+1; x) with shifts in the numerator parameter, linearized."""
    F = lambda p: gauss_2f1_unit(p, a + 1, x)  # noqa: E731
    lhs = (_poch_float(a + b, n + 1) / _poch_float(b, n + 1) * F(a + b + n + 1) * F(a + b + beta)
           - _poch_float(a + b + beta, n + 1) / _poch_float(b + beta, n + 1) * F(a + b) * F(a + b + beta + n + 1))
    terms = []
    for j in range(n + 1):
        w = (_poch_float(a + b, j) * _poch_float(a + b + beta, n - j)
             / (_poch_float(b + 1, j) * _poch_float(b + beta + 1, n - j)))
        brace = ((a + b + beta + n - j) * F(a + b + beta + n + 1 - j)
                 - (a + b + j) * F(a + b + j + 1))
        terms.append(w * brace)
    return IdentityCheck(lhs, a / (b * (b + beta)) * math.fsum(terms))


def psi_linearization_n0(a: float, c: float, beta: float, x: float) -> IdentityCheck:
    """(a/c) F(a+1; c+1)[F(a+beta; c+beta) - 1] = ((a+beta)/(c+beta)) F(a+beta+1; c+beta+1)[F(a; c) - 1]."""
    F = lambda p, q: gauss_2f1_unit(p, q, x)  # noqa: E731
    lhs = a / c * F(a + 1, c + 1) * (F(a + beta, c + beta) - 1.0)
    rhs = (a + beta) / (c + beta) * F(a + beta + 1, c + beta + 1) * (F(a, c) - 1.0)
    return IdentityCheck(lhs, rhs)


def phi_linearization_n0(a: float, b: float, c: float, x: float) -> IdentityCheck:
    """a/(a-c+1) F(a+1; c)[F(b; c) + (c-1)/(b-c+1)] = b/(b-c+1) F(b+1; c)[F(a; c) + (c-1)/(a-c+1)]."""
    F = lambda p: gauss_2f1_unit(p, c, x)  # noqa: E731
    lhs = a / (a - c + 1) * F(a + 1) * (F(b) + (c - 1) / (b - c + 1))
    rhs = b / (b - c + 1) * F(b + 1) * (F(a) + (c - 1) / (a - c + 1))
    return IdentityCheck(lhs, rhs)


# --- two-sided Turán bounds ---------------------------------------------------

class BoundPair(NamedTuple):
    lower_m: float
    upper_M: float


class BoundCheck(NamedTuple):
    x: float
    lower: float
    det: float
    upper: float
    ok: bool


def _check_nu(nu):
    if isinstance(nu, bool) or int(nu) != nu or nu < 1:
        raise HypothesisError(f"nu must be a positive integer, got {nu!r}")
    return int(nu)


def turan_bounds_a(a: float, b: float, nu: int) -> BoundPair:
    """(m, M) bracketing I_x(a,b)^2 - I_x(a-nu,b) I_x(a+nu,b); needs b > 1, a > nu - 1."""
    nu = _check_nu(nu)
    if not (b > 1 and a > nu - 1):
        raise HypothesisError(f"need b > 1 and a > nu - 1, got a={a!r}, b={b!r}, nu={nu}")
    l1 = 2.0 * (lgamma(a + b) - lgamma(b) - lgamma(a + 1))
    l2 = (lgamma(a + b - nu) + lgamma(a + b + nu) - 2.0 * lgamma(b)
          - lgamma(a - nu + 1) - lgamma(a + nu + 1))
    m = _signed_exp(*_exp_diff(l1, l2))
    log_k = math.fsum(
        math.log(a + b + i) + math.log(a + 1 - nu + i) - math.log(a + b - nu + i) - math.log(a + 1 + i)
        for i in range(nu)
    )
    return BoundPair(m, -math.expm1(log_k))


def turan_bounds_b(a: float, b: float, nu: int) -> BoundPair:
    """(m, M) bracketing I_x(a,b)^2 - I_x(a,b+nu) I_x(a,b-nu); needs b > nu, a > 0."""
    nu = _check_nu(nu)
    if not (b > nu and a > 0):
        raise HypothesisError(f"need b > nu and a > 0, got a={a!r}, b={b!r}, nu={nu}")
    l1 = 2.0 * (lgamma(a + b) - lgamma(a + 1) - lgamma(b))
    l2 = (lgamma(a + b - nu) + lgamma(a + b + nu) - 2.0 * lgamma(a + 1)
          - lgamma(b - nu) - lgamma(b + nu))
    m = _signed_exp(*_exp_diff(l1, l2))
    log_k = math.fsum(
        math.log(a + b + i) + math.log(b - nu + i) - math.log(b + i) - math.log(a + b - nu + i)
        for i in range(nu)
    )
    return BoundPair(m, -math.expm1(log_k))


def _chain(lower, det, upper, scale, slack):
    ok = lower <= det + slack * scale and det <= upper + slack * scale
    return ok


def check_turan_bounds_a(a, b, nu, xs, slack=1e-12):
    """Evaluate m x^{2a}(1-x)^{2b} <= I(a)^2 - I(a-nu) I(a+nu) <= M I(a)^2 on xs.

    The determinant needs a - nu > 0 for I_x(a-nu, b) to exist.
    """
    m, M = turan_bounds_a(a, b, nu)
    if not a > nu:
        raise HypothesisError(f"evaluating I_x(a-nu, b) needs a > nu, got a={a!r}, nu={nu}")
    out = []
    for x in xs:
        i0 = inc_beta(a, b, x)
        det = i0 * i0 - inc_beta(a - nu, b, x) * inc_beta(a + nu, b, x)
        lower = m * x ** (2 * a) * (1 - x) ** (2 * b)
        upper = M * i0 * i0
        out.append(BoundCheck(x, lower, det, upper, _chain(lower, det, upper, i0 * i0, slack)))
    return out


def check_turan_bounds_b(a, b, nu, xs, slack=1e-12):
    """Evaluate m x^{2a}(1-x)^{2b} <= I(a,b)^2 - I(a,b+nu) I(a,b-nu) <= M I(a,b)^2 on xs."""
    m, M = turan_bounds_b(a, b, nu)
    out = []
    for x in xs:
        i0 = inc_beta(a, b, x)
        det = i0 * i0 - inc_beta(a, b + nu, x) * inc_beta(a, b - nu, x)
        lower = m * x ** (2 * a) * (1 - x) ** (2 * b)
        upper = M * i0 * i0
        out.append(BoundCheck(x, lower, det, upper, _chain(lower, det, upper, i0 * i0, slack)))
    return out


# --- conjecture scan ----------------------------------------------------------

@dataclass
class SignReport:
    """Sign classification of one coefficient sequence at one grid point."""

    point: ParameterPoint
    kind: str
    k_range: tuple
    min_abs: float
    verdict: str
    first_violation_k: Optional[int] = None
    expected: str = "+"
    violations: list = field(default_factory=list)
    reverified: Optional[bool] = None
    counterexample: bool = False
    error: Optional[str] = None

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ValueError(f"unknown verdict {self.verdict!r}")
        if self.verdict == "mixed" and self.first_violation_k is None:
            raise ValueError("a mixed verdict must carry first_violation_k")


def expected_sign(kind: str, b: float) -> str:
    """Sign the conjectures predict for every coefficient: '+', '-' or '0'."""
    if kind == "phi":
        return "+"
    if b == 1:
        return "0"
    return "-" if b < 1 else "+"


def _mp_coefficient(kind, a, b, alpha, beta, k):
    """One determinant coefficient recomputed in extended precision."""
    return series.determinant_coeffs_mp(kind, a, b, alpha, beta, k, REVERIFY_DPS)[k]


def classify_signs(d, noise):
    """Verdict and first sign change for one coefficient vector."""
    d = np.asarray(d, dtype=float)
    if np.all(d == 0.0):
        return "zero", None
    signs = np.where(np.abs(d) <= noise, 0, np.sign(d)).astype(int)
    det = signs[signs != 0]
    if det.size and np.any(det != det[0]):
        first = int(np.flatnonzero((signs != 0) & (signs != det[0]))[0])
        return "mixed", first
    if np.any(signs == 0):
        return "indeterminate", None
    return ("all_positive" if det[0] > 0 else "all_negative"), None


def scan_point(point: ParameterPoint, kind: str, N: int = series.DEFAULT_ORDER,
               noise_floor: float = NOISE_FLOOR) -> SignReport:
    """Classify phi_0..phi_N or psi_0..psi_N at one point, re-verifying anomalies."""
    diff_fn = series.phi_difference if kind == "phi" else series.psi_difference
    diff = diff_fn(point.a, point.b, point.alpha, point.beta, N)
    d = np.array(diff.coeffs, dtype=float)
    noise = noise_floor * diff.scale_l1
    verdict, first = classify_signs(d, noise)
    expected = expected_sign(kind, point.b)
    want = {"+": 1, "-": -1, "0": 0}[expected]

    def wrong(values):
        if want == 0:
            return [k for k, v in enumerate(values) if abs(v) > noise[k]]
        return [k for k, v in enumerate(values) if abs(v) > noise[k] and np.sign(v) != want]

    violations = wrong(d)
    reverified = None
    counterexample = False
    if violations or verdict == "mixed":
        suspects = sorted(set(violations) | ({first} if first is not None else set()))
        for k in suspects:
            d[k] = float(_mp_coefficient(kind, point.a, point.b, point.alpha, point.beta, k))
        verdict, first = classify_signs(d, noise)
        violations = wrong(d)
        counterexample = bool(violations) or verdict == "mixed"
        reverified = counterexample
    return SignReport(
        point=point, kind=kind, k_range=(0, N), min_abs=float(np.min(np.abs(d))),
        verdict=verdict, first_violation_k=first, expected=expected,
        violations=violations, reverified=reverified, counterexample=counterexample,
    )


def worker_count(requested: Optional[int] = None) -> int:
    """Pool size: ``requested`` or the CPU count, capped by BETA_TURAN_THREADS."""
    n = requested or os.cpu_count() or 1
    cap = os.environ.get("BETA_TURAN_THREADS")
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            pass
    return max(1, n)


def _safe_scan(point, kind, N, noise_floor):
    try:
        return scan_point(point, kind, N, noise_floor)
    except (ConvergenceError, DomainError, ArithmeticError) as exc:
        return SignReport(point, kind, (0, N), math.nan, "error",
                          expected=expected_sign(kind, point.b), error=str(exc))


def conjecture_scan(grid, N: int = series.DEFAULT_ORDER, kinds=("phi", "psi"),
                    workers: Optional[int] = None, noise_floor: float = NOISE_FLOOR) -> list:
    """SignReports for every grid point and kind, in grid order.

    A numerical failure at one point yields an "error" report for that point
    instead of aborting the scan.
    """
    jobs = [(p, kind) for p in grid for kind in kinds]
    n = worker_count(workers)
    if n == 1:
        return [_safe_scan(p, kind, N, noise_floor) for p, kind in jobs]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(lambda job: _safe_scan(job[0], job[1], N, noise_floor), jobs))


def default_scan_grid(ab=DEFAULT_SCAN_AB, shifts=DEFAULT_SCAN_SHIFTS):
    return [
        ParameterPoint(a, b, alpha, beta)
        for a, b, alpha, beta in itertools.product(ab, ab, shifts, shifts)
    ]
