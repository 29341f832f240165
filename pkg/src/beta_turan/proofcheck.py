"""Numerical support for the log-concavity/log-convexity proofs in a and b.

Both proofs differentiate a function U of x four times, each step keeping a
positive weight, until a quadratic Q remains whose sign pattern on (0, 1) is
read off from its end values.  This module evaluates every link of both
chains, compares each link with a finite-difference derivative of the one
before it, and collapses Q into a sign pattern.

Shorthand: B = B_x(a,b), M_j = int_0^x t^{a-1}(1-t)^{b-1} L(t)^j dt where
L(t) = log(1-t) for the chain in b and log t for the chain in a.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy import integrate

from .errors import ConvergenceError, DomainError
from .specfun import digamma, log_inc_beta, trigamma

QUAD_TOL = 1e-11
QUAD_LIMIT = 200
ZERO_TOL_REL = 1e-9
FD_REL_STEP = 1e-3
KINDS = ("log_one_minus_t", "log_t")
THEOREMS = ("in_b", "in_a")


class StepTooSmallWarning(RuntimeWarning):
    """Finite-difference roundoff is comparable to the value returned."""


# --- moment integrals ---------------------------------------------------------

def _check_kind(kind):
    if kind not in KINDS:
        raise DomainError(f"kind must be one of {KINDS}, got {kind!r}")


def _quad(f, lo, hi):
    if hi <= lo:
        return 0.0, 0.0
    val, err = integrate.quad(f, lo, hi, epsabs=1e-300, epsrel=QUAD_TOL, limit=QUAD_LIMIT)
    return val, err


def _log_power(kind, t, j):
    if j == 0:
        return 1.0
    ell = math.log1p(-t) if kind == "log_one_minus_t" else math.log(t)
    return ell ** j


def moment_integral(a: float, b: float, x: float, j: int, kind: str = "log_one_minus_t") -> float:
    """int_0^x t^{a-1} (1-t)^{b-1} L(t)^j dt for j in {0, 1, 2}.

    ``x = 1`` gives the complete integral.  Near 0 the substitution t = u^{1/a}
    (a < 1) and near 1 the substitution 1 - t = v^{1/b} (b < 1) remove the
    algebraic endpoint singularities before adaptive quadrature.
    """
    if not (a > 0 and b > 0):
        raise DomainError(f"need a > 0 and b > 0, got a={a!r}, b={b!r}")
    if not 0 < x <= 1:
        raise DomainError(f"x must lie in (0, 1], got {x!r}")
    if j not in (0, 1, 2):
        raise DomainError(f"j must be 0, 1 or 2, got {j!r}")
    _check_kind(kind)

    def plain(t):
        return t ** (a - 1.0) * (1.0 - t) ** (b - 1.0) * _log_power(kind, t, j)

    split = min(x, 0.5)
    if a < 1:
        def left(u):
            t = u ** (1.0 / a)
            return (1.0 - t) ** (b - 1.0) * _log_power(kind, t, j) / a
        v1, e1 = _quad(left, 0.0, split ** a)
    else:
        v1, e1 = _quad(plain, 0.0, split)

    v2 = e2 = 0.0
    if x > split and b < 1:
        def right(v):
            s = v ** (1.0 / b)  # s = 1 - t
            if j == 0:
                return (1.0 - s) ** (a - 1.0) / b
            ell = math.log(s) if kind == "log_one_minus_t" else math.log1p(-s)
            return (1.0 - s) ** (a - 1.0) * ell ** j / b
        v2, e2 = _quad(right, (1.0 - x) ** b, (1.0 - split) ** b)
    elif x > split:
        v2, e2 = _quad(plain, split, x)
    val, err = v1 + v2, e1 + e2
    if not err <= QUAD_TOL * abs(val) + 1e-300:
        raise ConvergenceError(
            f"quadrature tolerance not met for a={a}, b={b}, x={x}, j={j}, kind={kind}",
            estimate=err, detail={"value": val},
        )
    return val


def _increment(a, b, lo, hi, j, kind):
    # Plain quadrature on an interior subinterval.
    f = lambda t: t ** (a - 1.0) * (1.0 - t) ** (b - 1.0) * _log_power(kind, t, j)  # noqa: E731
    if hi < lo:
        return -_quad(f, hi, lo)[0]
    return _quad(f, lo, hi)[0]


# --- proof chains -------------------------------------------------------------

@dataclass(frozen=True)
class ChainValues:
    x: float
    U: float
    V: float
    W: float
    Z: float
    Q: float


def _trigamma_gap(theorem, a, b):
    first = b if theorem == "in_b" else a
    return trigamma(first) - trigamma(a + b)


def q_closed(theorem: str, a: float, b: float, x: float) -> float:
    """The final quadratic of the chain (no integrals)."""
    D = _trigamma_gap(theorem, a, b)
    if theorem == "in_b":
        return x * x - D * ((a + b - 1) ** 2 * x * x - (a - 1) * (2 * a + 2 * b - 3) * x + (a - 1) * (a - 2))
    return (1 - x) ** 2 - D * ((a + b - 1) ** 2 * x * x - ((2 * a + 1) * (b - 1) + 2 * a * a) * x + a * a)


def q_scale(theorem: str, a: float, b: float, x: float) -> float:
    """Magnitude of the terms that cancel inside Q; the natural zero scale."""
    D = _trigamma_gap(theorem, a, b)
    if theorem == "in_b":
        lead = x * x
        quad = (a + b - 1) ** 2 * x * x + abs((a - 1) * (2 * a + 2 * b - 3)) * x + abs((a - 1) * (a - 2))
    else:
        lead = (1 - x) ** 2
        quad = (a + b - 1) ** 2 * x * x + abs((2 * a + 1) * (b - 1) + 2 * a * a) * x + a * a
    return lead + abs(D) * quad


def _chain_terms(theorem, a, b, x, B, M1, M2, D):
    """The summands of U, V, W and Z, one tuple per function."""
    if theorem == "in_b":
        L = math.log1p(-x)
        return (
            (B * M2, -M1 * M1, -B * B * D),
            (M2, B * L * L, -2.0 * L * M1, -2.0 * B * D),
            (-B * L, M1, -x ** (a - 1) * (1 - x) ** b * D),
            (B, -D * x ** (a - 2) * (1 - x) ** b * ((a - 1) * (1 - x) - b * x)),
        )
    L = math.log(x)
    return (
        (B * M2, -M1 * M1, -B * B * D),
        (M2, B * L * L, -2.0 * L * M1, -2.0 * B * D),
        (B * L, -M1, -x ** a * (1 - x) ** (b - 1) * D),
        (B, D * x ** a * (1 - x) ** (b - 2) * ((b - 1) * x - a * (1 - x))),
    )


def _chain_from_moments(theorem, a, b, x, B, M1, M2, D):
    U, V, W, Z = (math.fsum(t) for t in _chain_terms(theorem, a, b, x, B, M1, M2, D))
    return ChainValues(x, U, V, W, Z, q_closed(theorem, a, b, x))


def _check_theorem(theorem):
    if theorem not in THEOREMS:
        raise DomainError(f"theorem must be one of {THEOREMS}, got {theorem!r}")


def chain_eval(theorem: str, a: float, b: float, x: float) -> ChainValues:
    _check_theorem(theorem)
    if not 0 < x < 1:
        raise DomainError(f"x must lie in (0, 1), got {x!r}")
    kind = "log_one_minus_t" if theorem == "in_b" else "log_t"
    B, M1, M2 = (moment_integral(a, b, x, j, kind) for j in (0, 1, 2))
    return _chain_from_moments(theorem, a, b, x, B, M1, M2, _trigamma_gap(theorem, a, b))


def chain_eval_b(a: float, b: float, x: float) -> ChainValues:
    """U..Q for the second log-derivative in b (log(1-t) moments).

    U = B M2 - M1^2 - B^2 (psi'(b) - psi'(a+b)) equals B^2 d^2/db^2 log I_x(a,b).
    """
    return chain_eval("in_b", a, b, x)


def chain_eval_a(a: float, b: float, x: float) -> ChainValues:
    """U..Q for the second log-derivative in a (log t moments)."""
    return chain_eval("in_a", a, b, x)


def _weights(theorem, a, b, x):
    """Multipliers with U' = w1 V, V' = w2 W, W' = w3 Z, Z' = w4 Q."""
    if theorem == "in_b":
        return (x ** (a - 1) * (1 - x) ** (b - 1), 2.0 / (1 - x), 1.0 / (1 - x),
                x ** (a - 3) * (1 - x) ** (b - 1))
    return (x ** (a - 1) * (1 - x) ** (b - 1), 2.0 / x, 1.0 / x,
            x ** (a - 1) * (1 - x) ** (b - 3))


class ChainResidual(NamedTuple):
    link: str
    residual: float


LINKS = ("U->V", "V->W", "W->Z", "Z->Q")


def chain_consistency(theorem: str, a: float, b: float, xs: Sequence[float],
                      h: float = 1e-3) -> list:
    """Worst relative mismatch of each chain link over interior points ``xs``.

    Each derivative is a 5-point finite difference.  The moments at the
    stencil points are the base moments plus short increment integrals, so
    the base quadrature error is shared by all five points.  A residual is
    max_x |fd - target| / max_x max(|target|, sum of |summands of f|); the
    summand scale keeps identically-zero chains (b = 1 for the chain in a)
    from dividing noise by noise.
    """
    _check_theorem(theorem)
    kind = "log_one_minus_t" if theorem == "in_b" else "log_t"
    D = _trigamma_gap(theorem, a, b)
    num = np.zeros(4)
    den = np.zeros(4)
    for x in xs:
        if not (2 * h < x < 1 - 2 * h):
            raise DomainError(f"x={x!r} too close to an endpoint for step {h!r}")
        base = [moment_integral(a, b, x, j, kind) for j in (0, 1, 2)]
        pts = {}
        for k in (-2, -1, 1, 2):
            xk = x + k * h
            mom = [base[j] + _increment(a, b, x, xk, j, kind) for j in (0, 1, 2)]
            pts[k] = _chain_from_moments(theorem, a, b, xk, *mom, D)
        here = _chain_from_moments(theorem, a, b, x, *base, D)
        scales = [math.fsum(abs(v) for v in t) for t in _chain_terms(theorem, a, b, x, *base, D)]
        w = _weights(theorem, a, b, x)
        for i, (f_name, g_name) in enumerate((("U", "V"), ("V", "W"), ("W", "Z"), ("Z", "Q"))):
            f = {k: getattr(c, f_name) for k, c in pts.items()}
            fd = (f[-2] - 8.0 * f[-1] + 8.0 * f[1] - f[2]) / (12.0 * h)
            target = w[i] * getattr(here, g_name)
            num[i] = max(num[i], abs(fd - target))
            den[i] = max(den[i], abs(target), scales[i])
    return [ChainResidual(link, float(n / d) if d > 0 else float(n)) for link, n, d in zip(LINKS, num, den)]


# --- sign patterns ------------------------------------------------------------

@dataclass(frozen=True)
class SignPattern:
    pattern: tuple
    change_count: int
    change_locations: tuple

    def __post_init__(self):
        if any(p == q for p, q in zip(self.pattern, self.pattern[1:])):
            raise ValueError("consecutive pattern entries must differ")
        if self.change_count != len(self.pattern) - 1:
            raise ValueError("change_count must equal len(pattern) - 1")

    def __str__(self):
        return "(" + ",".join(self.pattern) + ")"


def _sign_char(v, tol):
    if abs(v) <= tol:
        return "0"
    return "+" if v > 0 else "-"


def sign_pattern_of(values, zero_tol=None) -> SignPattern:
    """Collapse (x, value) pairs into runs of equal sign.

    Values with |v| <= zero_tol count as 0; the default zero_tol is
    1e-9 * max |v|.  A change location is the midpoint between the last x of
    one run and the first x of the next.
    """
    values = [(float(x), float(v)) for x, v in values]
    if not values:
        raise ValueError("values must be non-empty")
    xs = [x for x, _ in values]
    if any(q <= p for p, q in zip(xs, xs[1:])):
        raise ValueError("x values must be strictly increasing")
    if zero_tol is None:
        zero_tol = ZERO_TOL_REL * max(abs(v) for _, v in values)
    pattern, locs = [], []
    prev_x = None
    for x, v in values:
        s = _sign_char(v, zero_tol)
        if not pattern:
            pattern.append(s)
        elif s != pattern[-1]:
            pattern.append(s)
            locs.append(0.5 * (prev_x + x))
        prev_x = x
    return SignPattern(tuple(pattern), len(pattern) - 1, tuple(locs))


def q_sign_pattern(theorem: str, a: float, b: float, xs=None) -> SignPattern:
    """Sign pattern of Q on ``xs`` (default 400 points in [0.01, 0.99]).

    Zero is judged against the size of the cancelling terms, so the
    degenerate a = 1 (resp. b = 1) chains collapse to (0) rather than to
    rounding noise.
    """
    _check_theorem(theorem)
    xs = np.linspace(0.01, 0.99, 400) if xs is None else np.asarray(xs, dtype=float)
    vals = [(x, q_closed(theorem, a, b, x)) for x in xs]
    tol = ZERO_TOL_REL * max(q_scale(theorem, a, b, x) for x in xs)
    return sign_pattern_of(vals, tol)


def expected_q_pattern(theorem: str, a: float, b: float) -> tuple:
    """Pattern of Q predicted by the five-case analysis."""
    p = a if theorem == "in_b" else b
    if theorem == "in_b":
        cases = (("-", "+"), ("0",), ("+", "-"), ("+", "-"), ("-", "+", "-"))
    else:
        cases = (("+", "-"), ("0",), ("-", "+"), ("-", "+"), ("-", "+", "-"))
    if p < 1:
        return cases[0]
    if p == 1:
        return cases[1]
    if p < 2:
        return cases[2]
    if p == 2:
        return cases[3]
    return cases[4]


# --- Lemma on f_alpha ---------------------------------------------------------

class LemmaPsiValues(NamedTuple):
    f: float
    g: float
    recurrence_residual: float


def _f_alpha(alpha, x):
    d = digamma(x + alpha) - digamma(x)
    return d * d + trigamma(x + alpha) - trigamma(x)


def lemma_psi_check(alpha: float, x: float) -> LemmaPsiValues:
    """f = (psi(x+alpha) - psi(x))^2 + psi'(x+alpha) - psi'(x), g = psi(x) - psi(x+alpha) + 1/x,
    and the residual of f(x+1) - f(x) = 2 alpha g / (x (x+alpha))."""
    if not (alpha > 0 and x > 0):
        raise DomainError(f"need alpha > 0 and x > 0, got alpha={alpha!r}, x={x!r}")
    f = _f_alpha(alpha, x)
    g = digamma(x) - digamma(x + alpha) + 1.0 / x
    res = _f_alpha(alpha, x + 1) - f - 2.0 * alpha / (x * (x + alpha)) * g
    return LemmaPsiValues(f, g, res)


# --- finite-difference log-concavity ------------------------------------------

def logconc_fd(a: float, b: float, x: float, h=None, direction: str = "in_b") -> float:
    """Second difference of log I_x(a, b) along a or b, Richardson-refined.

    ``h`` defaults to 1e-3 times the parameter.  Negative along b always;
    along a positive for b < 1, zero for b = 1 and negative for b > 1.
    """
    if direction not in THEOREMS:
        raise DomainError(f"direction must be one of {THEOREMS}, got {direction!r}")
    p = b if direction == "in_b" else a
    if h is None:
        h = FD_REL_STEP * p
    if not (h > 0 and p - 2 * h > 0):
        raise DomainError(f"need h > 0 and parameter - 2h > 0, got h={h!r}")

    def L(q):
        return log_inc_beta(q, b, x) if direction == "in_a" else log_inc_beta(a, q, x)

    l0 = L(p)

    def second(step):
        return (L(p + step) - 2.0 * l0 + L(p - step)) / (step * step)

    d1, d2 = second(h), second(h / 2)
    value = (4.0 * d2 - d1) / 3.0
    roundoff = 16.0 * abs(l0) * np.finfo(float).eps / (h * h)
    if roundoff > 0.1 * abs(value) and roundoff > 1e-12:
        warnings.warn(
            f"finite-difference roundoff ~{roundoff:.1e} is comparable to the value {value:.1e}",
            StepTooSmallWarning, stacklevel=2,
        )
    return value
