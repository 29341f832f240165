"""Loop kernels compiled with numba.

Each function here has a numpy twin in ``_kernels_np`` with the same
signature and semantics; ``kernels`` picks one of the two at import time.
"""
import math

import numpy as np

from ._accel import njit

# Bernoulli-number coefficients B_2k / (2k) and B_2k for the asymptotic
# expansions of digamma and trigamma.
_PSI_ASYM = np.array([
    1.0 / 12.0, -1.0 / 120.0, 1.0 / 252.0, -1.0 / 240.0,
    1.0 / 132.0, -691.0 / 32760.0, 1.0 / 12.0,
])
_TRI_ASYM = np.array([
    1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0,
    5.0 / 66.0, -691.0 / 2730.0, 7.0 / 6.0,
])
ASYM_CUTOFF = 12.0
_SPLIT = 134217729.0  # 2**27 + 1, Dekker splitting constant


@njit
def digamma(z):
    acc = 0.0
    while z < ASYM_CUTOFF:
        acc += 1.0 / z
        z += 1.0
    w2 = 1.0 / (z * z)
    s = 0.0
    wk = w2
    for c in _PSI_ASYM:
        s += c * wk
        wk *= w2
    return math.log(z) - 0.5 / z - s - acc


@njit
def trigamma(z):
    acc = 0.0
    while z < ASYM_CUTOFF:
        acc += 1.0 / (z * z)
        z += 1.0
    w = 1.0 / z
    w2 = w * w
    s = 0.0
    wk = w2 * w
    for c in _TRI_ASYM:
        s += c * wk
        wk *= w2
    return w + 0.5 * w2 + s + acc


@njit
def unit_hyp_sum(p, q, x, tol, max_terms):
    """Sum of (p)_n/(q)_n x^n; returns (sum, terms used, capped)."""
    t = 1.0
    s = 1.0
    n = 0
    while n < max_terms:
        t *= x * (p + n) / (q + n)
        s += t
        n += 1
        rho = x * max(1.0, (p + n) / (q + n))
        if rho < 1.0 and t * rho / (1.0 - rho) < tol * s:
            return s, n, False
    return s, n, True


@njit
def inc_beta_series_derivs(a, b, x, tol, max_terms,
                           psi_ab, psi_a1, psi_b, tri_ab, tri_a1, tri_b):
    """Termwise parameter derivatives of the normalized incomplete beta series.

    Returns ``(S, Sa, Sb, Saa, Sbb, n, capped)``; every sum is relative to
    the prefactor ``x^a (1-x)^b Gamma(a+b)/(Gamma(b)Gamma(a+1))``.
    """
    lx = math.log(x)
    l1x = math.log1p(-x)
    t = 1.0
    pab = psi_ab
    pa1 = psi_a1
    qab = tri_ab
    qa1 = tri_a1
    da = lx + pab - pa1
    db = l1x + pab - psi_b
    s = 1.0
    sa = da
    sb = db
    saa = da * da + qab - qa1
    sbb = db * db + qab - tri_b
    n = 0
    while n < max_terms:
        zab = a + b + n
        za1 = a + 1.0 + n
        t *= x * zab / za1
        pab += 1.0 / zab
        pa1 += 1.0 / za1
        qab -= 1.0 / (zab * zab)
        qa1 -= 1.0 / (za1 * za1)
        da = lx + pab - pa1
        db = l1x + pab - psi_b
        m_aa = da * da + qab - qa1
        m_bb = db * db + qab - tri_b
        s += t
        sa += t * da
        sb += t * db
        saa += t * m_aa
        sbb += t * m_bb
        n += 1
        rho = x * max(1.0, (a + b + n) / (a + 1.0 + n))
        if rho < 1.0:
            weight = 1.0 + abs(m_aa) + abs(m_bb) + abs(da) + abs(db)
            if t * weight * rho / (1.0 - rho) < tol * s:
                return s, sa, sb, saa, sbb, n, False
    return s, sa, sb, saa, sbb, n, True


@njit
def convolve_trunc(s, t):
    n = s.shape[0]
    out = np.zeros(n)
    for k in range(n):
        acc = 0.0
        for j in range(k + 1):
            acc += s[j] * t[k - j]
        out[k] = acc
    return out


@njit
def wright_diff(s, t, u, v):
    """Coefficients of s*t - u*v with per-coefficient magnitude scales.

    Returns ``(d, scale_max, scale_l1)`` where the scales are the largest
    and the summed absolute values of the individual products entering d_k.
    """
    n = s.shape[0]
    d = np.zeros(n)
    smax = np.zeros(n)
    sl1 = np.zeros(n)
    for k in range(n):
        acc = 0.0
        mx = 0.0
        l1 = 0.0
        for j in range(k + 1):
            p1 = s[j] * t[k - j]
            p2 = u[j] * v[k - j]
            acc += p1 - p2
            a1 = abs(p1)
            a2 = abs(p2)
            l1 += a1 + a2
            if a1 > mx:
                mx = a1
            if a2 > mx:
                mx = a2
        d[k] = acc
        smax[k] = mx
        sl1[k] = l1
    return d, smax, sl1


@njit
def _two_prod(a, b):
    p = a * b
    c = _SPLIT * a
    ah = c - (c - a)
    al = a - ah
    c = _SPLIT * b
    bh = c - (c - b)
    bl = b - bh
    e = al * bl - (((p - ah * bh) - al * bh) - ah * bl)
    return p, e


@njit
def _two_sum(a, b):
    s = a + b
    z = s - a
    e = (a - (s - z)) + (b - z)
    return s, e


@njit
def wright_diff_compensated(s, t, u, v):
    """Same as ``wright_diff`` coefficients, accumulated in doubled precision."""
    n = s.shape[0]
    d = np.zeros(n)
    for k in range(n):
        hi = 0.0
        lo = 0.0
        for j in range(k + 1):
            p, e = _two_prod(s[j], t[k - j])
            hi, q = _two_sum(hi, p)
            lo += q + e
            p, e = _two_prod(-u[j], v[k - j])
            hi, q = _two_sum(hi, p)
            lo += q + e
        d[k] = hi + lo
    return d
