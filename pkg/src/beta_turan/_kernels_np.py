"""Pure-numpy implementations of the kernels in ``_kernels_jit``.

Series are summed block-wise with ``cumprod``/``cumsum`` so the sequence of
floating-point operations matches the sequential loop.
"""
import math

import numpy as np

from ._kernels_jit import ASYM_CUTOFF, _PSI_ASYM, _SPLIT, _TRI_ASYM

_BLOCK = 256


def digamma(z):
    z = np.array(z, dtype=float)
    acc = np.zeros_like(z)
    while True:
        low = z < ASYM_CUTOFF
        if not low.any():
            break
        acc = np.where(low, acc + 1.0 / z, acc)
        z = np.where(low, z + 1.0, z)
    w2 = 1.0 / (z * z)
    s = np.zeros_like(z)
    wk = w2
    for c in _PSI_ASYM:
        s = s + c * wk
        wk = wk * w2
    out = np.log(z) - 0.5 / z - s - acc
    return out[()] if out.ndim == 0 else out


def trigamma(z):
    z = np.array(z, dtype=float)
    acc = np.zeros_like(z)
    while True:
        low = z < ASYM_CUTOFF
        if not low.any():
            break
        acc = np.where(low, acc + 1.0 / (z * z), acc)
        z = np.where(low, z + 1.0, z)
    w = 1.0 / z
    w2 = w * w
    s = np.zeros_like(z)
    wk = w2 * w
    for c in _TRI_ASYM:
        s = s + c * wk
        wk = wk * w2
    out = w + 0.5 * w2 + s + acc
    return out[()] if out.ndim == 0 else out


def unit_hyp_sum(p, q, x, tol, max_terms):
    t = 1.0
    s = 1.0
    n0 = 0
    while n0 < max_terms:
        n = np.arange(n0, min(n0 + _BLOCK, max_terms), dtype=float)
        terms = np.cumprod(np.concatenate(([t], x * (p + n) / (q + n))))[1:]
        sums = np.cumsum(np.concatenate(([s], terms)))[1:]
        m = n + 1.0
        rho = x * np.maximum(1.0, (p + m) / (q + m))
        with np.errstate(divide="ignore", invalid="ignore"):
            done = (rho < 1.0) & (terms * rho / (1.0 - rho) < tol * sums)
        hit = np.flatnonzero(done)
        if hit.size:
            i = hit[0]
            return float(sums[i]), int(n0 + i + 1), False
        t = terms[-1]
        s = sums[-1]
        n0 += n.size
    return float(s), n0, True


def inc_beta_series_derivs(a, b, x, tol, max_terms,
                           psi_ab, psi_a1, psi_b, tri_ab, tri_a1, tri_b):
    lx = math.log(x)
    l1x = math.log1p(-x)
    # Terms are generated in blocks; the digamma/trigamma shifts accumulate
    # reciprocals exactly as the loop kernel does.
    t = 1.0
    pab, pa1, qab, qa1 = psi_ab, psi_a1, tri_ab, tri_a1
    da = lx + pab - pa1
    db = l1x + pab - psi_b
    acc = np.array([1.0, da, db, da * da + qab - qa1, db * db + qab - tri_b])
    n0 = 0
    while n0 < max_terms:
        n = np.arange(n0, min(n0 + _BLOCK, max_terms), dtype=float)
        zab = a + b + n
        za1 = a + 1.0 + n
        terms = np.cumprod(np.concatenate(([t], x * zab / za1)))[1:]
        p_ab = np.cumsum(np.concatenate(([pab], 1.0 / zab)))[1:]
        p_a1 = np.cumsum(np.concatenate(([pa1], 1.0 / za1)))[1:]
        q_ab = np.cumsum(np.concatenate(([qab], -1.0 / (zab * zab))))[1:]
        q_a1 = np.cumsum(np.concatenate(([qa1], -1.0 / (za1 * za1))))[1:]
        das = lx + p_ab - p_a1
        dbs = l1x + p_ab - psi_b
        m_aa = das * das + q_ab - q_a1
        m_bb = dbs * dbs + q_ab - tri_b
        contrib = np.stack([terms, terms * das, terms * dbs,
                            terms * m_aa, terms * m_bb])
        sums = np.cumsum(np.concatenate((acc[:, None], contrib), axis=1), axis=1)[:, 1:]
        m = n + 1.0
        rho = x * np.maximum(1.0, (a + b + m) / (a + 1.0 + m))
        weight = 1.0 + np.abs(m_aa) + np.abs(m_bb) + np.abs(das) + np.abs(dbs)
        with np.errstate(divide="ignore", invalid="ignore"):
            done = (rho < 1.0) & (terms * weight * rho / (1.0 - rho) < tol * sums[0])
        hit = np.flatnonzero(done)
        if hit.size:
            i = hit[0]
            s, sa, sb, saa, sbb = (float(v) for v in sums[:, i])
            return s, sa, sb, saa, sbb, int(n0 + i + 1), False
        t = terms[-1]
        pab, pa1, qab, qa1 = p_ab[-1], p_a1[-1], q_ab[-1], q_a1[-1]
        acc = sums[:, -1]
        n0 += n.size
    s, sa, sb, saa, sbb = (float(v) for v in acc)
    return s, sa, sb, saa, sbb, n0, True


def convolve_trunc(s, t):
    return np.convolve(s, t)[: s.shape[0]]


def _product_matrix(s, t):
    n = s.shape[0]
    k = np.arange(n)[:, None]
    j = np.arange(n)[None, :]
    live = j <= k
    return np.where(live, s[None, :] * t[np.where(live, k - j, 0)], 0.0)


def wright_diff(s, t, u, v):
    p1 = _product_matrix(s, t)
    p2 = _product_matrix(u, v)
    d = np.sum(p1 - p2, axis=1)
    mags = np.concatenate((np.abs(p1), np.abs(p2)), axis=1)
    return d, mags.max(axis=1), mags.sum(axis=1)


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


def _two_sum(a, b):
    s = a + b
    z = s - a
    e = (a - (s - z)) + (b - z)
    return s, e


def wright_diff_compensated(s, t, u, v):
    # Vectorized over k, sequential over j so the accumulation order matches.
    n = s.shape[0]
    hi = np.zeros(n)
    lo = np.zeros(n)
    k = np.arange(n)
    for j in range(n):
        live = k >= j
        idx = np.where(live, k - j, 0)
        p, e = _two_prod(np.where(live, s[j] * np.ones(n), 0.0), t[idx])
        h, q = _two_sum(hi, p)
        hi = np.where(live, h, hi)
        lo = np.where(live, lo + q + e, lo)
        p, e = _two_prod(np.where(live, -u[j] * np.ones(n), 0.0), v[idx])
        h, q = _two_sum(hi, p)
        hi = np.where(live, h, hi)
        lo = np.where(live, lo + q + e, lo)
    return hi + lo
