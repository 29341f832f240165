"""Minimum-cost ticket allocation under a product-of-incomplete-beta constraint.

    minimize   sum_i c_i alpha_i
    subject to prod_i I_{p_i}(w_i, alpha_i - w_i + 1) >= epsilon

Each factor is log-concave in its second parameter, so the constraint set is
convex and a log-barrier Newton method converges to the global minimizer.
The continuous relaxation is solved; integrality of alpha is not imposed.
"""
from __future__ import annotations

import io
import json
import math
import random
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import ConvergenceError, DomainError
from .specfun import inc_beta, inc_beta_derivs, log_inc_beta


class InfeasibleError(DomainError):
    """No feasible point was found for the instance."""


@dataclass(frozen=True)
class LotteryInstance:
    costs: tuple
    wins: tuple
    probs: tuple
    epsilon: float
    require_alpha_ge_w: bool = False

    def __post_init__(self):
        c, w, p = (tuple(float(v) for v in seq) for seq in (self.costs, self.wins, self.probs))
        object.__setattr__(self, "costs", c)
        object.__setattr__(self, "wins", w)
        object.__setattr__(self, "probs", p)
        if not (len(c) == len(w) == len(p) >= 1):
            raise DomainError("costs, wins and probs must be non-empty and of equal length")
        if not all(v > 0 for v in c):
            raise DomainError("costs must be positive")
        if not all(v > 0 for v in w):
            raise DomainError("wins must be positive")
        if not all(0 < v < 1 for v in p):
            raise DomainError("probabilities must lie in (0, 1)")
        if not 0 < self.epsilon < 1:
            raise DomainError(f"epsilon must lie in (0, 1), got {self.epsilon!r}")

    @property
    def m(self) -> int:
        return len(self.costs)

    def lower_bounds(self) -> np.ndarray:
        """Domain edge alpha_i > w_i - 1, or alpha_i >= w_i with the flag."""
        w = np.array(self.wins)
        return w if self.require_alpha_ge_w else w - 1.0


@dataclass
class Solution:
    alpha: list
    objective: float
    constraint_value: float
    kkt_residual: float
    iterations: int
    multiplier: float = float("nan")
    active_bounds: list = field(default_factory=list)

    def to_dict(self):
        d = asdict(self)
        d["relaxation"] = "continuous"
        return d


# --- constraint ---------------------------------------------------------------

def _second_params(instance, alpha):
    alpha = np.asarray(alpha, dtype=float)
    if alpha.shape != (instance.m,):
        raise DomainError(f"alpha must have length {instance.m}")
    b = alpha - np.array(instance.wins) + 1.0
    if not np.all(b > 0):
        raise DomainError("every alpha_i must exceed w_i - 1")
    return b


def constraint_log(instance: LotteryInstance, alpha) -> float:
    """sum_i log I_{p_i}(w_i, alpha_i - w_i + 1); concave in alpha."""
    b = _second_params(instance, alpha)
    return math.fsum(log_inc_beta(w, bi, p) for w, bi, p in zip(instance.wins, b, instance.probs))


def constraint_log_derivs(instance: LotteryInstance, alpha):
    """Value, gradient and (diagonal) Hessian of ``constraint_log``."""
    b = _second_params(instance, alpha)
    val, grad, hess = [], np.empty(instance.m), np.empty(instance.m)
    for i, (w, bi, p) in enumerate(zip(instance.wins, b, instance.probs)):
        d = inc_beta_derivs(w, bi, p)
        r = d.d_b / d.value
        val.append(math.log(d.value))
        grad[i] = r
        hess[i] = d.d_bb / d.value - r * r
    return math.fsum(val), grad, hess


# --- solver -------------------------------------------------------------------

MAX_NEWTON = 100
MAX_OUTER = 80
MAX_DOUBLINGS = 200
# Relative duality gap at which the barrier phase hands over to KKT polishing;
# much smaller gaps leave g - log(eps) at the rounding level of g.
BARRIER_GAP = 1e-7


def _safe_value(instance, alpha):
    try:
        return constraint_log(instance, alpha)
    except DomainError:
        return -math.inf


def feasible_start(instance: LotteryInstance, alpha0=None, margin: float = 0.5) -> np.ndarray:
    """A strictly feasible point: from ``alpha0`` (default w_i + 1) move every
    coordinate away from its lower bound, doubling the distance until the
    constraint exceeds log(epsilon) + margin * |log(epsilon)|."""
    lo = instance.lower_bounds()
    target = math.log(instance.epsilon) * (1.0 - margin)
    alpha = lo + 2.0 if alpha0 is None else np.array(alpha0, dtype=float)
    gap = np.maximum(alpha - lo, 1.0)
    for _ in range(MAX_DOUBLINGS):
        alpha = lo + gap
        if _safe_value(instance, alpha) > target:
            return alpha
        gap *= 2.0
    raise InfeasibleError("no feasible point found by doubling alpha")


def _barrier(instance, alpha, t, log_eps, lo, with_bounds):
    g = _safe_value(instance, alpha)
    s = g - log_eps
    if not s > 0:
        return math.inf
    val = t * float(np.dot(instance.costs, alpha)) - math.log(s)
    if with_bounds:
        gap = alpha - lo
        if np.any(gap <= 0):
            return math.inf
        val -= float(np.sum(np.log(gap)))
    return val


def _centering(instance, alpha, t, log_eps, lo, with_bounds, counter):
    c = np.array(instance.costs)
    for _ in range(MAX_NEWTON):
        counter[0] += 1
        g, dg, hg = constraint_log_derivs(instance, alpha)
        s = g - log_eps
        grad = t * c - dg / s
        hess = np.diag(-hg / s) + np.outer(dg, dg) / (s * s)
        if with_bounds:
            gap = alpha - lo
            grad -= 1.0 / gap
            hess += np.diag(1.0 / (gap * gap))
        step = -np.linalg.solve(hess, grad)
        decrement = -float(grad @ step)
        if decrement / 2.0 <= 1e-10:
            return alpha
        f0 = _barrier(instance, alpha, t, log_eps, lo, with_bounds)
        # In flat regions the Newton step is huge; never more than halve the
        # distance to the domain edge in one step.
        shrink = step < 0
        u = min(1.0, float(np.min(0.5 * (alpha - lo)[shrink] / -step[shrink]))) if shrink.any() else 1.0
        while True:
            trial = alpha + u * step
            f1 = _barrier(instance, trial, t, log_eps, lo, with_bounds) if np.all(trial - lo > 0) else math.inf
            if f1 <= f0 - 0.25 * u * decrement:
                break
            u *= 0.5
            if u < 1e-14:
                return alpha
        alpha = trial
        if f0 - f1 <= 1e-15 * abs(f0):
            # further progress is below the rounding level of the barrier
            return alpha
    raise ConvergenceError("barrier centering did not converge", detail={"alpha": alpha.tolist(), "t": t})


def _kkt_residual(instance, alpha, lam, free):
    c = np.array(instance.costs)
    g, dg, _ = constraint_log_derivs(instance, alpha)
    stat = np.where(free, c - lam * dg, 0.0)
    # A bound-active coordinate needs c_i - lam * dg_i >= 0 (nonnegative bound multiplier).
    stat = np.where(free, stat, np.minimum(c - lam * dg, 0.0))
    return max(float(np.max(np.abs(stat) / c)), abs(g - math.log(instance.epsilon)))


def _kkt_system(instance, alpha, lam, idx):
    c = np.array(instance.costs)
    g, dg, hg = constraint_log_derivs(instance, alpha)
    k = idx.size
    F = np.empty(k + 1)
    F[:k] = (c[idx] - lam * dg[idx]) / c[idx]
    F[k] = g - math.log(instance.epsilon)
    J = np.zeros((k + 1, k + 1))
    J[np.arange(k), np.arange(k)] = -lam * hg[idx] / c[idx]
    J[:k, k] = -dg[idx] / c[idx]
    J[k, :k] = dg[idx]
    return F, J


def _polish(instance, alpha, lam, free, tol, counter):
    """Damped Newton on the KKT system c_i = lam dg_i (free i), g = log eps."""
    lo = instance.lower_bounds()
    idx = np.flatnonzero(free)
    k = idx.size
    F, J = _kkt_system(instance, alpha, lam, idx)
    for _ in range(MAX_NEWTON):
        norm = float(np.max(np.abs(F)))
        if norm <= 0.01 * tol:
            break
        counter[0] += 1
        delta = np.linalg.solve(J, -F)
        u = 1.0
        for _ in range(60):
            trial = alpha.copy()
            trial[idx] += u * delta[:k]
            lam_t = lam + u * delta[k]
            if np.all(trial[idx] - lo[idx] > 0) and lam_t > 0:
                Ft, Jt = _kkt_system(instance, trial, lam_t, idx)
                if float(np.max(np.abs(Ft))) < norm:
                    break
            u *= 0.5
        else:
            break
        alpha, lam, F, J = trial, lam_t, Ft, Jt
    return alpha, lam


def solve(instance: LotteryInstance, tol: float = 1e-10, start=None) -> Solution:
    """Global minimizer of the convex program.

    Barrier Newton steps with t doubling per outer iteration bring the
    iterate to a small duality gap; Newton steps on the KKT system then make
    the constraint active and drive the KKT residual below ``tol``.
    """
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol!r}")
    log_eps = math.log(instance.epsilon)
    lo = instance.lower_bounds()
    with_bounds = instance.require_alpha_ge_w
    alpha = feasible_start(instance, start)
    counter = [0]
    c = np.array(instance.costs)
    n_barrier = 1 + (instance.m if with_bounds else 0)
    t = 1.0 / max(float(np.dot(c, alpha)), 1e-300)
    for _ in range(MAX_OUTER):
        alpha = _centering(instance, alpha, t, log_eps, lo, with_bounds, counter)
        if n_barrier / t <= BARRIER_GAP * max(1.0, float(np.dot(c, alpha))):
            break
        t *= 2.0
    else:
        raise ConvergenceError("barrier method did not reach the requested gap",
                               detail={"alpha": alpha.tolist(), "t": t})

    g = constraint_log(instance, alpha)
    lam = 1.0 / (t * (g - log_eps))
    free = np.ones(instance.m, dtype=bool)
    if with_bounds:
        # Coordinates pinned at alpha_i = w_i are those the barrier pushed to the bound.
        free = (alpha - lo) > 1e-6 * np.maximum(1.0, np.abs(lo))
        alpha = np.where(free, alpha, lo)
        if not free.any():
            value = constraint_log(instance, alpha)
            return Solution(alpha.tolist(), float(np.dot(c, alpha)), math.exp(value),
                            0.0, counter[0], 0.0, list(range(instance.m)))
    alpha, lam = _polish(instance, alpha, lam, free, tol, counter)
    value = constraint_log(instance, alpha)
    res = _kkt_residual(instance, alpha, lam, free)
    if res > tol:
        raise ConvergenceError(f"KKT residual {res:.3e} above tol {tol:.1e}",
                               estimate=res, detail={"alpha": alpha.tolist(), "multiplier": lam})
    return Solution(
        alpha=alpha.tolist(), objective=float(np.dot(c, alpha)), constraint_value=math.exp(value),
        kkt_residual=res, iterations=counter[0], multiplier=float(lam),
        active_bounds=[int(i) for i in np.flatnonzero(~free)],
    )


def random_feasible_start(instance: LotteryInstance, rng: random.Random) -> np.ndarray:
    lo = instance.lower_bounds()
    alpha0 = lo + np.array([rng.uniform(0.5, 20.0) for _ in range(instance.m)])
    return feasible_start(instance, alpha0)


# --- independent oracles -------------------------------------------------------

def _bisect(f, lo, hi, tol=1e-14, maxit=400):
    flo = f(lo)
    for _ in range(maxit):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol * max(1.0, abs(mid)):
            break
        fm = f(mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _bracket_up(f, lo, step=1.0):
    hi = lo + step
    while f(hi) < 0:
        hi = lo + 2.0 * (hi - lo)
        if hi - lo > 1e12:
            raise ConvergenceError("could not bracket the root")
    return hi


def bisection_oracle_m1(c: float, w: float, p: float, epsilon: float,
                        require_alpha_ge_w: bool = False) -> float:
    """alpha* for one coordinate: the root of I_p(w, alpha - w + 1) = epsilon."""
    lo = w - 1.0
    f = lambda a: inc_beta(w, a - w + 1.0, p) - epsilon  # noqa: E731
    start = lo + 1e-12
    if require_alpha_ge_w:
        if f(w) >= 0:
            return w
        start = w
    elif f(start) >= 0:
        return start
    hi = _bracket_up(f, start)
    return _bisect(f, start, hi)


def kkt_bisection_oracle(instance: LotteryInstance) -> np.ndarray:
    """Minimizer from the KKT conditions by nested bisection (no Newton steps).

    For a multiplier lam each alpha_i solves h_i'(alpha_i) = c_i / lam, where
    h_i' is decreasing; the constraint value is then increasing in lam.
    """
    lo = instance.lower_bounds()
    log_eps = math.log(instance.epsilon)

    def dh(i, a):
        d = inc_beta_derivs(instance.wins[i], a - instance.wins[i] + 1.0, instance.probs[i])
        return d.d_b / d.value

    def alpha_of(lam):
        out = np.empty(instance.m)
        for i in range(instance.m):
            target = instance.costs[i] / lam
            start = lo[i] if instance.require_alpha_ge_w else lo[i] + 1e-9
            f = lambda a: target - dh(i, a)  # noqa: E731, B023
            if f(start) >= 0:
                out[i] = start
                continue
            out[i] = _bisect(f, start, _bracket_up(f, start))
        return out

    def excess(log_lam):
        return constraint_log(instance, alpha_of(math.exp(log_lam))) - log_eps

    lo_l, hi_l = -5.0, 5.0
    while excess(lo_l) > 0:
        lo_l -= 5.0
    while excess(hi_l) < 0:
        hi_l += 5.0
    return alpha_of(math.exp(_bisect(excess, lo_l, hi_l, tol=1e-15)))


# --- I/O ----------------------------------------------------------------------

def parse_instance(text: str) -> LotteryInstance:
    """Read an instance from JSON or from comma-separated records.

    Text form::

        # epsilon=0.5
        c,w,p
        1,1,0.5

    An optional ``# require_alpha_ge_w=true`` header sets the bound flag.
    """
    stripped = text.strip()
    if stripped.startswith("{"):
        doc = json.loads(stripped)
        coords = doc["coords"]
        return LotteryInstance(
            [r["c"] for r in coords], [r["w"] for r in coords], [r["p"] for r in coords],
            float(doc["epsilon"]), bool(doc.get("require_alpha_ge_w", False)),
        )
    header, rows, columns = {}, [], None
    for line in io.StringIO(text):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            for part in line[1:].replace(",", " ").split():
                if "=" in part:
                    k, v = part.split("=", 1)
                    header[k.strip()] = v.strip()
            continue
        fields = [f.strip() for f in line.split(",")]
        if columns is None:
            columns = fields
            if sorted(columns) != ["c", "p", "w"]:
                raise DomainError(f"instance header must name columns c, w, p; got {line!r}")
            continue
        rows.append(dict(zip(columns, (float(f) for f in fields))))
    if "epsilon" not in header:
        raise DomainError("instance needs an '# epsilon=...' header line")
    flag = header.get("require_alpha_ge_w", "false").lower() in ("1", "true", "yes")
    return LotteryInstance([r["c"] for r in rows], [r["w"] for r in rows], [r["p"] for r in rows],
                           float(header["epsilon"]), flag)


def format_instance(instance: LotteryInstance) -> str:
    lines = [f"# epsilon={instance.epsilon!r}"]
    if instance.require_alpha_ge_w:
        lines.append("# require_alpha_ge_w=true")
    lines.append("c,w,p")
    lines += [f"{c!r},{w!r},{p!r}" for c, w, p in zip(instance.costs, instance.wins, instance.probs)]
    return "\n".join(lines) + "\n"


def random_instance(rng: random.Random, m: int, epsilon: Optional[float] = None) -> LotteryInstance:
    return LotteryInstance(
        [rng.uniform(0.5, 3.0) for _ in range(m)],
        [float(rng.randint(1, 5)) for _ in range(m)],
        [rng.uniform(0.2, 0.8) for _ in range(m)],
        epsilon if epsilon is not None else rng.uniform(0.2, 0.8),
    )


def multistart(instance: LotteryInstance, seed: int, starts: int = 10, tol: float = 1e-10) -> list:
    rng = random.Random(seed)
    return [solve(instance, tol, random_feasible_start(instance, rng)) for _ in range(starts)]


def objective_spread(solutions: Sequence[Solution]) -> float:
    obj = [s.objective for s in solutions]
    return (max(obj) - min(obj)) / max(abs(min(obj)), 1e-300)
