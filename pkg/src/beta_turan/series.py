"""Truncated power series and brute-force oracles for the Wright determinant
coefficients.

For fixed ``a`` the normalized function ``x^{-a} (1-x)^{-b} I_x(a, b)`` has
the power series ``sum_n c_n(a, b) x^n``.  The oracles below multiply such
series directly, so they work for any real shifts ``alpha, beta >= 0``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import mpmath
import numpy as np

from . import kernels
from .errors import DomainError
from .specfun import ParameterPoint

DEFAULT_ORDER = 50
# Recompute with compensated products when |d_k| is this small relative to
# the largest product entering it.
COMPENSATE_BELOW = 1e-10


@dataclass(frozen=True)
class TruncatedSeries:
    """Coefficients c_0..c_N of a power series truncated after x^N."""

    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float)
        if c.ndim != 1 or c.size == 0:
            raise ValueError("coeffs must be a non-empty 1-d sequence")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def order(self) -> int:
        return self.coeffs.size - 1

    def __len__(self):
        return self.coeffs.size

    def __getitem__(self, k):
        return self.coeffs[k]

    def __iter__(self):
        return iter(self.coeffs.tolist())

    def __repr__(self):
        return f"TruncatedSeries(order={self.order}, coeffs={self.coeffs.tolist()!r})"

    def _check(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        if other.order != self.order:
            raise ValueError(f"order mismatch: {self.order} vs {other.order}")
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return TruncatedSeries(self.coeffs + other.coeffs)

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return TruncatedSeries(self.coeffs - other.coeffs)

    def __neg__(self):
        return TruncatedSeries(-self.coeffs)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return TruncatedSeries(self.coeffs * other)
        return cauchy_product(self, other)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.order == other.order and bool(np.array_equal(self.coeffs, other.coeffs))

    def __hash__(self):
        return hash(self.coeffs.tobytes())

    def evaluate(self, x: float) -> float:
        """Value of the truncated polynomial at x (Horner)."""
        acc = 0.0
        for c in self.coeffs[::-1]:
            acc = acc * x + c
        return acc


def cauchy_product(s: TruncatedSeries, t: TruncatedSeries) -> TruncatedSeries:
    """Product of two series of equal order, truncated to that order."""
    if not isinstance(s, TruncatedSeries) or not isinstance(t, TruncatedSeries):
        raise TypeError("cauchy_product expects two TruncatedSeries")
    if s.order != t.order:
        raise ValueError(f"order mismatch: {s.order} vs {t.order}")
    return TruncatedSeries(kernels.convolve_trunc(s.coeffs, t.coeffs))


def _check_ab(a, b):
    if not (a > 0 and b > 0):
        raise DomainError(f"need a > 0 and b > 0, got a={a!r}, b={b!r}")


def normalized_coeff(a: float, b: float, n: int) -> float:
    """c_n(a, b) = Gamma(a+b+n) / (Gamma(b) Gamma(a+1+n))."""
    _check_ab(a, b)
    if n < 0:
        raise DomainError(f"n must be nonnegative, got {n!r}")
    return math.exp(math.lgamma(a + b + n) - math.lgamma(b) - math.lgamma(a + 1 + n))


def series_of_normalized_I(a: float, b: float, N: int) -> TruncatedSeries:
    """Coefficients c_0..c_N of x^{-a} (1-x)^{-b} I_x(a, b)."""
    _check_ab(a, b)
    if N < 0:
        raise DomainError(f"order must be nonnegative, got {N!r}")
    lb = math.lgamma(b)
    return TruncatedSeries([
        math.exp(math.lgamma(a + b + n) - lb - math.lgamma(a + 1 + n)) for n in range(N + 1)
    ])


class WrightDifference(NamedTuple):
    """Coefficients of f1*f2 - f3*f4 with the magnitudes that produced them."""

    coeffs: np.ndarray
    scale_max: np.ndarray
    scale_l1: np.ndarray
    compensated: bool


def wright_difference(s, t, u, v, compensated=None) -> WrightDifference:
    """Fused difference of two Cauchy products, s*t - u*v.

    With ``compensated=None`` the doubled-precision accumulation is switched
    on automatically when any |d_k| falls below ``COMPENSATE_BELOW`` times the
    largest product feeding it.
    """
    arrs = [np.ascontiguousarray(getattr(z, "coeffs", z), dtype=float) for z in (s, t, u, v)]
    if len({a.size for a in arrs}) != 1:
        raise ValueError("all four series must have the same order")
    d, smax, sl1 = kernels.wright_diff(*arrs)
    if compensated is None:
        compensated = bool(np.any(np.abs(d) < COMPENSATE_BELOW * smax))
    if compensated:
        d = kernels.wright_diff_compensated(*arrs)
    return WrightDifference(np.asarray(d), np.asarray(smax), np.asarray(sl1), compensated)


def _ordered_shifts(alpha, beta):
    # Fixes the floating-point evaluation order so alpha <-> beta is exact.
    return (alpha, beta) if alpha <= beta else (beta, alpha)


def phi_difference(a, b, alpha, beta, N=DEFAULT_ORDER, compensated=None) -> WrightDifference:
    """Coefficients of the b-shift determinant with their magnitude scales."""
    _check_ab(a, b)
    lo, hi = _ordered_shifts(alpha, beta)
    return wright_difference(
        series_of_normalized_I(a, b + lo, N), series_of_normalized_I(a, b + hi, N),
        series_of_normalized_I(a, b, N), series_of_normalized_I(a, b + lo + hi, N),
        compensated,
    )


def psi_difference(a, b, alpha, beta, N=DEFAULT_ORDER, compensated=None) -> WrightDifference:
    """Coefficients of the a-shift determinant with their magnitude scales."""
    _check_ab(a, b)
    lo, hi = _ordered_shifts(alpha, beta)
    return wright_difference(
        series_of_normalized_I(a + lo, b, N), series_of_normalized_I(a + hi, b, N),
        series_of_normalized_I(a, b, N), series_of_normalized_I(a + lo + hi, b, N),
        compensated,
    )


def _mp_normalized_series(a, b, N):
    # c_0 from gamma values, then c_{n+1} = c_n (a+b+n)/(a+1+n); caller sets precision
    c = mpmath.gamma(a + b) * mpmath.rgamma(b) * mpmath.rgamma(a + 1)
    out = [c]
    for n in range(N):
        c = c * (a + b + n) / (a + 1 + n)
        out.append(c)
    return out


def _mp_wright(pairs, N):
    s, t, u, v = (_mp_normalized_series(p, q, N) for p, q in pairs)
    return [
        mpmath.fsum(s[j] * t[k - j] - u[j] * v[k - j] for j in range(k + 1))
        for k in range(N + 1)
    ]


def determinant_coeffs_mp(kind: str, a, b, alpha, beta, N=DEFAULT_ORDER, dps=30):
    """phi_k or psi_k (``kind`` = "phi" / "psi") for k <= N as mpmath numbers.

    Same Cauchy products as the double-precision oracle, carried out with
    ``dps`` significant digits.  The float inputs are taken as exact.
    """
    _check_ab(a, b)
    if kind not in ("phi", "psi"):
        raise ValueError(f"kind must be 'phi' or 'psi', got {kind!r}")
    with mpmath.workdps(dps):
        a, b, alpha, beta = (mpmath.mpf(v) for v in (a, b, alpha, beta))
        if kind == "phi":
            pairs = ((a, b + alpha), (a, b + beta), (a, b), (a, b + alpha + beta))
        else:
            pairs = ((a + alpha, b), (a + beta, b), (a, b), (a + alpha + beta, b))
        return _mp_wright(pairs, N)


def phi_oracle(point: ParameterPoint, N: int = DEFAULT_ORDER, dps=None) -> TruncatedSeries:
    """phi_0..phi_N where
    I_x(a,b+alpha) I_x(a,b+beta) - I_x(a,b) I_x(a,b+alpha+beta)
    = x^{2a} (1-x)^{2b+alpha+beta} sum_k phi_k x^k.

    With ``dps`` set, the products are formed in that many digits and rounded
    at the end; strong cancellation makes the double-precision result lose up
    to ~1e-8 relative on moderate grids.
    """
    if dps is not None:
        vals = determinant_coeffs_mp("phi", point.a, point.b, point.alpha, point.beta, N, dps)
        return TruncatedSeries([float(v) for v in vals])
    return TruncatedSeries(phi_difference(point.a, point.b, point.alpha, point.beta, N).coeffs)


def psi_oracle(point: ParameterPoint, N: int = DEFAULT_ORDER, dps=None) -> TruncatedSeries:
    """psi_0..psi_N where
    I_x(a+alpha,b) I_x(a+beta,b) - I_x(a,b) I_x(a+alpha+beta,b)
    = x^{2a+alpha+beta} (1-x)^{2b} sum_k psi_k x^k.
    """
    if dps is not None:
        vals = determinant_coeffs_mp("psi", point.a, point.b, point.alpha, point.beta, N, dps)
        return TruncatedSeries([float(v) for v in vals])
    return TruncatedSeries(psi_difference(point.a, point.b, point.alpha, point.beta, N).coeffs)
