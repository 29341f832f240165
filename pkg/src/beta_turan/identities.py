"""Exact rational verification of the finite combinatorial identities and the
telescoping sums behind the linearization formulas.

Everything here runs on ``fractions.Fraction``; no floating point is involved.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

from .errors import DomainError

BigRational = Fraction

DEFAULT_SEED = 20240611
DEFAULT_MAX_MN = 12
DEFAULT_RANDOM = 100
RANDOM_RANGE = (1, 50)


def as_rational(value) -> Fraction:
    """Coerce int, Fraction or a string such as ``"3/7"`` to a Fraction.

    Floats are accepted and converted exactly (their binary value).
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    return Fraction(value)


class IdentityResult(NamedTuple):
    holds: bool
    lhs: Fraction
    rhs: Fraction

    def __bool__(self):
        return self.holds


def _result(lhs, rhs):
    return IdentityResult(lhs == rhs, lhs, rhs)


def _nonneg(name, n):
    if isinstance(n, bool) or int(n) != n or n < 0:
        raise DomainError(f"{name} must be a nonnegative integer, got {n!r}")
    return int(n)


def pochhammer_rat(base, n: int) -> Fraction:
    """Rising factorial base (base+1) ... (base+n-1), exactly; (base)_0 = 1."""
    base = as_rational(base)
    n = _nonneg("n", n)
    out = Fraction(1)
    for i in range(n):
        out *= base + i
    return out


P = pochhammer_rat


def combin1_check(a, b, beta, m: int, n: int) -> IdentityResult:
    """m-sum / n-sum symmetry of brace differences of Pochhammer ratios.

    sum_{k<=m} (a)_k (a+beta)_{m-k} / ((b)_k (b+beta)_{m-k})
        * {(a+k)_{n+1}/(b+k)_{n+1} - (a+beta+m-k)_{n+1}/(b+beta+m-k)_{n+1}}
    equals the same expression with m and n exchanged.
    """
    a, b, beta = (as_rational(v) for v in (a, b, beta))
    m, n = _nonneg("m", m), _nonneg("n", n)

    def side(outer, inner):
        total = Fraction(0)
        for k in range(outer + 1):
            w = P(a, k) * P(a + beta, outer - k) / (P(b, k) * P(b + beta, outer - k))
            brace = (P(a + k, inner + 1) / P(b + k, inner + 1)
                     - P(a + beta + outer - k, inner + 1) / P(b + beta + outer - k, inner + 1))
            total += w * brace
        return total

    return _result(side(m, n), side(n, m))


def combin2_check(a, b, beta, m: int, n: int) -> IdentityResult:
    """Identity with prefactor a/(b(b+beta)) coming from the b-shift linearization.

    lhs = a/(b(b+beta)) sum_{j<=n} (a+b)_j (a+b+beta)_{n-j} / ((b+1)_j (b+1+beta)_{n-j})
              * {(a+b+beta+n-j)_{m+1} - (a+b+j)_{m+1}}
    rhs = (a+1)_m sum_{k<=m} (a+b)_k (a+b+beta)_{m-k} / ((a+1)_k (a+1)_{m-k})
              * {(a+b+k)_{n+1}/(b)_{n+1} - (a+b+beta+m-k)_{n+1}/(b+beta)_{n+1}}
    """
    a, b, beta = (as_rational(v) for v in (a, b, beta))
    m, n = _nonneg("m", m), _nonneg("n", n)
    if b == 0 or b + beta == 0:
        raise ZeroDivisionError("the prefactor a/(b(b+beta)) needs b != 0 and b != -beta")
    s = Fraction(0)
    for j in range(n + 1):
        w = P(a + b, j) * P(a + b + beta, n - j) / (P(b + 1, j) * P(b + 1 + beta, n - j))
        s += w * (P(a + b + beta + n - j, m + 1) - P(a + b + j, m + 1))
    lhs = a / (b * (b + beta)) * s
    s = Fraction(0)
    for k in range(m + 1):
        w = P(a + b, k) * P(a + b + beta, m - k) / (P(a + 1, k) * P(a + 1, m - k))
        s += w * (P(a + b + k, n + 1) / P(b, n + 1)
                  - P(a + b + beta + m - k, n + 1) / P(b + beta, n + 1))
    rhs = P(a + 1, m) * s
    return _result(lhs, rhs)


def gosper_terms(a, b, beta, m: int):
    """(u_0..u_m, v_0..v_{m+1}) of the telescoping pair."""
    a, b, beta = (as_rational(v) for v in (a, b, beta))
    m = _nonneg("m", m)
    u = [
        P(a + b, k) * P(a + b + beta, m - k) / (P(a + 1, k) * P(a + 1, m - k))
        * (b * (2 * k - m) + beta * (a + k))
        for k in range(m + 1)
    ]
    v = [
        -a * a * P(a + b, k) * P(a + b + beta, m - k + 1) / (P(a, k) * P(a, m - k + 1))
        for k in range(m + 2)
    ]
    return u, v


@dataclass
class GosperResult:
    holds: bool
    local_failures: list
    total: Fraction
    closed_form: Fraction

    def __bool__(self):
        return self.holds


def gosper_check(a, b, beta, m: int) -> GosperResult:
    """Check u_k = v_{k+1} - v_k for each k, then the summed closed form.

    Every k is checked on its own, so two compensating errors cannot pass.
    """
    a, b, beta = (as_rational(v) for v in (a, b, beta))
    u, v = gosper_terms(a, b, beta, m)
    local = [k for k in range(m + 1) if u[k] != v[k + 1] - v[k]]
    total = sum(u, Fraction(0))
    closed = a * (P(a + b + beta, m + 1) - P(a + b, m + 1)) / P(a + 1, m)
    ok = not local and total == v[m + 1] - v[0] == closed
    return GosperResult(ok, local, total, closed)


def kkizv_sum_check(a, b, mu, m: int) -> IdentityResult:
    """sum_{k<=m} (a+b)_k (a+b+mu)_{m-k} / ((a+2)_k (a+mu+2)_{m-k}) (m - 2k + mu)
    = (a+1)(a+mu+1)/(b-1) [(a+b)_{m+1}/(a+1)_{m+1} - (a+b+mu)_{m+1}/(a+mu+1)_{m+1}].

    b = 1 is rejected: the right side is then 0/0 and no limit form is used.
    """
    a, b, mu = (as_rational(v) for v in (a, b, mu))
    m = _nonneg("m", m)
    if b == 1:
        raise DomainError("b = 1 makes the right-hand side singular")
    lhs = sum(
        (P(a + b, k) * P(a + b + mu, m - k) / (P(a + 2, k) * P(a + mu + 2, m - k)) * (m - 2 * k + mu)
         for k in range(m + 1)),
        Fraction(0),
    )
    rhs = (a + 1) * (a + mu + 1) / (b - 1) * (
        P(a + b, m + 1) / P(a + 1, m + 1) - P(a + b + mu, m + 1) / P(a + mu + 1, m + 1)
    )
    return _result(lhs, rhs)


# --- sweeps -----------------------------------------------------------------

def random_rational(rng: random.Random, lo=RANDOM_RANGE[0], hi=RANDOM_RANGE[1]) -> Fraction:
    return Fraction(rng.randint(lo, hi), rng.randint(lo, hi))


@dataclass
class SweepReport:
    """Counts and failing cases from an identity sweep; ``seed`` reproduces it."""

    seed: int
    checked: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def record(self, name, params, passed):
        self.checked[name] = self.checked.get(name, 0) + 1
        if not passed:
            self.failures.append({"identity": name, **{k: str(v) for k, v in params.items()}})


IDENTITIES = ("combin1", "combin2", "gosper", "kkizv")


def _random_b_not_one(rng):
    while True:
        b = random_rational(rng)
        if b != 1:
            return b


def run_sweep(seed: int = DEFAULT_SEED, max_mn: int = DEFAULT_MAX_MN,
              n_random: int = DEFAULT_RANDOM, which=IDENTITIES) -> SweepReport:
    """Exhaustive m, n in 0..max_mn at one seeded parameter triple, then
    ``n_random`` seeded random (m, n, parameters) tuples per identity."""
    rng = random.Random(seed)
    report = SweepReport(seed)
    a0, b0, beta0 = random_rational(rng), _random_b_not_one(rng), random_rational(rng)

    def run(name, a, b, beta, m, n):
        params = {"a": a, "b": b, "beta": beta, "m": m}
        if name == "combin1":
            params["n"] = n
            passed = combin1_check(a, b, beta, m, n).holds
        elif name == "combin2":
            params["n"] = n
            passed = combin2_check(a, b, beta, m, n).holds
        elif name == "gosper":
            passed = gosper_check(a, b, beta, m).holds
        else:
            params = {"a": a, "b": b, "mu": beta, "m": m}
            passed = kkizv_sum_check(a, b, beta, m).holds
        report.record(name, params, passed)

    for name in which:
        if name not in IDENTITIES:
            raise ValueError(f"unknown identity {name!r}")
        two_index = name in ("combin1", "combin2")
        for m in range(max_mn + 1):
            for n in (range(max_mn + 1) if two_index else (0,)):
                run(name, a0, b0, beta0, m, n)
        for _ in range(n_random):
            a, b, beta = random_rational(rng), _random_b_not_one(rng), random_rational(rng)
            m, n = rng.randint(0, max_mn), rng.randint(0, max_mn)
            run(name, a, b, beta, m, n)
    return report
