"""Scalar special functions: log-gamma, digamma, trigamma, the normalized
incomplete beta function and the unit-parameter Gauss series 2F1(1, p; q; x).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from . import kernels
from .errors import ConvergenceError, DomainError

INC_BETA_TOL = 1e-16
HYP_TOL = 1e-15
MAX_TERMS = 10_000
# Below this x the complement series in 1-x converges too slowly to be worth it.
COMPLEMENT_FROM = 0.25


@dataclass(frozen=True)
class ParameterPoint:
    """A point ``(a, b, alpha, beta, x)`` in the parameter space."""

    a: float
    b: float
    alpha: float = 0.0
    beta: float = 0.0
    x: float = 0.5

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise DomainError(f"need a > 0 and b > 0, got a={self.a!r}, b={self.b!r}")
        if not (self.alpha >= 0 and self.beta >= 0):
            raise DomainError(
                f"need alpha >= 0 and beta >= 0, got alpha={self.alpha!r}, beta={self.beta!r}"
            )
        if not 0 < self.x < 1:
            raise DomainError(f"need 0 < x < 1, got x={self.x!r}")

    def as_dict(self):
        return {"a": self.a, "b": self.b, "alpha": self.alpha, "beta": self.beta, "x": self.x}


def _positive(name, z):
    if not z > 0:
        raise DomainError(f"{name} must be positive, got {z!r}")


def _unit_interval(x):
    if not 0 < x < 1:
        raise DomainError(f"x must lie in (0, 1), got {x!r}")


def log_gamma(z: float) -> float:
    """log Gamma(z) for z > 0."""
    _positive("z", z)
    return math.lgamma(z)


def digamma(z: float) -> float:
    """psi(z) = Gamma'(z)/Gamma(z) for z > 0.

    Shifts z upward with psi(z) = psi(z+1) - 1/z until z >= 12, then uses
    the asymptotic Bernoulli expansion.
    """
    _positive("z", z)
    return float(kernels.digamma(float(z)))


def trigamma(z: float) -> float:
    """psi'(z) for z > 0, same shift-then-asymptotic scheme as ``digamma``."""
    _positive("z", z)
    return float(kernels.trigamma(float(z)))


def log_beta(a: float, b: float) -> float:
    _positive("a", a)
    _positive("b", b)
    return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)


def beta(a: float, b: float) -> float:
    """Euler's beta function B(a, b)."""
    return math.exp(log_beta(a, b))


def _log_prefactor(a, b, x):
    # log of x^a (1-x)^b Gamma(a+b) / (Gamma(b) Gamma(a+1))
    return (a * math.log(x) + b * math.log1p(-x)
            + math.lgamma(a + b) - math.lgamma(b) - math.lgamma(a + 1.0))


def _direct_series(a, b, x):
    s, n, capped = kernels.unit_hyp_sum(a + b, a + 1.0, x, INC_BETA_TOL, MAX_TERMS)
    if capped:
        raise ConvergenceError(
            f"incomplete beta series hit the {MAX_TERMS}-term cap at a={a}, b={b}, x={x}",
            detail={"a": a, "b": b, "x": x, "terms": n},
        )
    return _log_prefactor(a, b, x), s


def _reflected(a, b, x):
    """I_{1-x}(b, a) as (log prefactor, series sum) when it is the better route.

    Always taken for x > 0.75 when the complement is at most 1/2.  For
    0.25 <= x <= 0.75 it is also taken when the complement is at most 1/2:
    I_x(a, b) is then close to 1 and only the complement resolves log I and
    the parameter derivatives.
    """
    if x < COMPLEMENT_FROM:
        return None
    lp, s = _direct_series(b, a, 1.0 - x)
    if math.exp(lp) * s > 0.5:
        return None
    return lp, s


def inc_beta(a: float, b: float, x: float) -> float:
    """Normalized incomplete beta function I_x(a, b).

    Sums x^a (1-x)^b sum_n Gamma(a+b+n)/(Gamma(b)Gamma(a+1+n)) x^n with the
    gamma-ratio prefactor taken in log space.  The complement
    1 - I_{1-x}(b, a) is used whenever x >= 0.25 and that complement is at most 1/2.
    """
    _positive("a", a)
    _positive("b", b)
    _unit_interval(x)
    ref = _reflected(a, b, x)
    if ref is not None:
        return 1.0 - math.exp(ref[0]) * ref[1]
    lp, s = _direct_series(a, b, x)
    return math.exp(lp) * s


def inc_beta_point(point: ParameterPoint) -> float:
    return inc_beta(point.a, point.b, point.x)


def log_inc_beta(a: float, b: float, x: float) -> float:
    """log I_x(a, b), without underflow for tiny values."""
    _positive("a", a)
    _positive("b", b)
    _unit_interval(x)
    ref = _reflected(a, b, x)
    if ref is not None:
        return math.log1p(-math.exp(ref[0]) * ref[1])
    lp, s = _direct_series(a, b, x)
    return lp + math.log(s)


class IncBetaDerivs(NamedTuple):
    value: float
    d_a: float
    d_b: float
    d_aa: float
    d_bb: float


def _series_derivs(a, b, x):
    out = kernels.inc_beta_series_derivs(
        a, b, x, INC_BETA_TOL, MAX_TERMS,
        kernels.digamma(a + b), kernels.digamma(a + 1.0), kernels.digamma(b),
        kernels.trigamma(a + b), kernels.trigamma(a + 1.0), kernels.trigamma(b),
    )
    if out[-1]:
        raise ConvergenceError(
            f"derivative series hit the {MAX_TERMS}-term cap at a={a}, b={b}, x={x}"
        )
    pref = math.exp(_log_prefactor(a, b, x))
    return tuple(pref * float(v) for v in out[:5])


def inc_beta_derivs(a: float, b: float, x: float) -> IncBetaDerivs:
    """I_x(a, b) with its first and second partial derivatives in a and b.

    Each series term is differentiated through its log:
    d/db log T_n = log(1-x) + psi(a+b+n) - psi(b), and similarly in a.
    """
    _positive("a", a)
    _positive("b", b)
    _unit_interval(x)
    if _reflected(a, b, x) is not None:
        j, j1, j2, j11, j22 = _series_derivs(b, a, 1.0 - x)
        # I_x(a, b) = 1 - J with J = I_{1-x}(b, a): J's first parameter is b.
        return IncBetaDerivs(1.0 - j, -j2, -j1, -j22, -j11)
    return IncBetaDerivs(*_series_derivs(a, b, x))


def gauss_2f1_unit(p: float, q: float, x: float, tol: float = HYP_TOL) -> float:
    """2F1(1, p; q; x) = sum_n (p)_n/(q)_n x^n for p, q > 0 and 0 <= x < 1."""
    _positive("p", p)
    _positive("q", q)
    if not 0 <= x < 1:
        raise DomainError(f"2F1(1, p; q; x) needs 0 <= x < 1, got x={x!r}")
    if x == 0:
        return 1.0
    s, n, capped = kernels.unit_hyp_sum(float(p), float(q), float(x), tol, MAX_TERMS)
    if capped:
        raise ConvergenceError(
            f"2F1(1, {p}; {q}; {x}) hit the {MAX_TERMS}-term cap",
            detail={"p": p, "q": q, "x": x, "terms": n},
        )
    return s
