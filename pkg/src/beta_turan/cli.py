"""Command-line interface: ``beta-turan <command> [options]``.

Every report starts with a comment line carrying the schema version and the
resolved configuration, followed by CSV rows (or one JSON document with the
same columns).  Exit status: 0 when every check passes, 1 on a violation,
2 on a usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import shlex
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import identities, optimizer, proofcheck, series, turan
from .errors import ConvergenceError, DomainError
from .specfun import ParameterPoint, inc_beta, inc_beta_derivs

SCHEMA_VERSION = 1
PROG = "beta-turan"
COMMANDS = ("eval", "coeffs", "scan", "identities", "proofcheck", "bounds", "optimize")

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2

# Grids used when a flag is not given, per command.
DEFAULT_GRIDS = {
    "coeffs": {"a": [0.25, 0.5, 1.1, 2.0, 5.0], "b": [0.25, 0.5, 1.1, 2.0, 5.0],
               "alpha": [1, 2, 3], "beta": None},
    "scan": {"a": list(turan.DEFAULT_SCAN_AB), "b": list(turan.DEFAULT_SCAN_AB),
             "alpha": list(turan.DEFAULT_SCAN_SHIFTS), "beta": list(turan.DEFAULT_SCAN_SHIFTS)},
    "bounds": {"a": [1.5, 2.0, 3.3, 5.0], "b": [1.5, 2.0, 3.5, 6.0], "nu": [1, 2],
               "x": [round(0.05 * i, 2) for i in range(1, 20)]},
    "proofcheck": {"a": [0.25, 0.5, 1.0, 2.0, 5.0], "b": [0.3, 0.7, 1.0, 1.5, 4.0],
                   "x": [0.1, 0.3, 0.5, 0.7, 0.9]},
}
COEFF_BETAS = (0.5, 1.0, 2.7)  # plus alpha - 1 + 0.1 for each alpha


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    """Resolved run configuration; echoed verbatim into every report header."""

    command: str
    grid: dict = field(default_factory=dict)
    order: int = series.DEFAULT_ORDER
    tol: float = 1e-9
    seed: int = identities.DEFAULT_SEED
    output_format: str = "csv"
    output_path: str = "-"
    options: dict = field(default_factory=dict)

    def echo(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, separators=(",", ":"))


# --- parsing ------------------------------------------------------------------

def parse_grid(text: str) -> list:
    """``"0.5,1,2"`` or ``"lo:hi:step"`` (inclusive of hi) to a list of numbers."""
    text = text.strip()
    try:
        if ":" in text:
            parts = [float(p) for p in text.split(":")]
            if len(parts) != 3 or parts[2] <= 0 or parts[1] < parts[0]:
                raise UsageError(f"range must be lo:hi:step with step > 0 and hi >= lo, got {text!r}")
            lo, hi, step = parts
            n = int(math.floor((hi - lo) / step + 1e-9))
            return [_tidy(round(lo + i * step, 12)) for i in range(n + 1)]
        return [_tidy(float(v)) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise UsageError(f"cannot parse grid {text!r}: {exc}") from None


def _tidy(v):
    return int(v) if float(v).is_integer() and abs(v) < 2 ** 53 else v


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (np.floating,)):
        return repr(float(v))
    if isinstance(v, (list, tuple)):
        return ";".join(_fmt(x) for x in v)
    if v is None:
        return ""
    return str(v)


def _grid_flag_text(values):
    return ",".join(_fmt(float(v)) if not isinstance(v, int) else str(v) for v in values)


# --- reports ------------------------------------------------------------------

class Report:
    def __init__(self, config: RunConfig, columns):
        self.config = config
        self.columns = list(columns)
        self.rows = []
        self.summary = {}
        self.violations = []

    def add(self, **row):
        self.rows.append([row.get(c) for c in self.columns])

    def violation(self, message, rerun):
        self.violations.append({"message": message, "rerun": rerun})

    def render(self) -> str:
        header = f"# {PROG} schema={SCHEMA_VERSION} config={self.config.echo()}"
        if self.config.output_format == "json":
            doc = {
                "schema": SCHEMA_VERSION, "header": header, "config": asdict(self.config),
                "columns": self.columns,
                "rows": [[_json_value(v) for v in r] for r in self.rows],
                "summary": self.summary, "violations": self.violations,
            }
            return json.dumps(doc, sort_keys=True, indent=1, allow_nan=True) + "\n"
        buf = io.StringIO()
        buf.write(header + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([_fmt(v) for v in r])
        buf.write("# summary=" + json.dumps(self.summary, sort_keys=True, separators=(",", ":")) + "\n")
        return buf.getvalue()


def _json_value(v):
    if isinstance(v, np.generic):
        return v.item()
    if isinstance(v, tuple):
        return list(v)
    return v


def _rerun(config: RunConfig, **grid) -> str:
    args = [PROG, config.command]
    for name, values in grid.items():
        args += [f"--grid-{name}", _grid_flag_text(values)]
    args += ["--order", str(config.order), "--tol", repr(config.tol), "--seed", str(config.seed)]
    return shlex.join(args)


def _pool_map(fn, items):
    n = turan.worker_count()
    if n == 1 or len(items) < 2:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


# --- commands -----------------------------------------------------------------

def _kv_args(tokens):
    out = {}
    for tok in tokens:
        if "=" not in tok:
            raise UsageError(f"expected name=value, got {tok!r}")
        k, v = tok.split("=", 1)
        try:
            out[k.strip()] = float(v)
        except ValueError:
            raise UsageError(f"not a number: {tok!r}") from None
    return out


def cmd_eval(config: RunConfig) -> tuple:
    kv = _kv_args(config.options["params"])
    missing = {"a", "b", "x"} - kv.keys()
    if missing or set(kv) - {"a", "b", "x"}:
        raise UsageError("eval needs exactly a=..., b=..., x=...")
    a, b, x = kv["a"], kv["b"], kv["x"]
    try:
        if x in (0.0, 1.0) and a > 0 and b > 0:
            value = x
        else:
            value = inc_beta(a, b, x)
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    if not config.options["derivs"]:
        return f"{value:.17g}\n", EXIT_OK
    d = inc_beta_derivs(a, b, x)
    return json.dumps(d._asdict(), sort_keys=True) + "\n", EXIT_OK


def _coeff_grid(config):
    g = config.grid
    pts = []
    for a, b, alpha in itertools.product(g["a"], g["b"], g["alpha"]):
        betas = g["beta"] if g["beta"] is not None else [*COEFF_BETAS, round(alpha - 1 + 0.1, 12)]
        for beta in betas:
            pts.append((a, b, alpha, beta))
    return pts


def cmd_coeffs(config: RunConfig) -> tuple:
    for alpha in config.grid["alpha"]:
        if not float(alpha).is_integer() or alpha < 1:
            raise UsageError("closed forms need integer alpha >= 1 (use `scan` for other shifts)")
    dps = config.options["oracle_dps"]
    cols = ["kind", "a", "b", "alpha", "beta", "N", "oracle_dps", "worst_k", "closed", "oracle",
            "rel_err", "tol", "ok", "error"]
    rep = Report(config, cols)
    N = config.order

    def work(p):
        a, b, alpha, beta = p
        point = ParameterPoint(a, b, alpha, beta)
        out = []
        for kind in ("phi", "psi"):
            oracle_fn = series.phi_oracle if kind == "phi" else series.psi_oracle
            closed_fn = turan.phi_k_closed if kind == "phi" else turan.psi_k_closed
            try:
                ora = oracle_fn(point, N, dps=dps or None).coeffs
            except (ConvergenceError, DomainError) as exc:
                out.append((kind, p, (math.inf, -1, math.nan, math.nan), str(exc)))
                continue
            worst = (-1.0, 0, 0.0, 0.0)
            for k in range(N + 1):
                c = closed_fn(a, b, int(alpha), beta, k)
                o = float(ora[k])
                err = abs(c - o) / abs(o) if o != 0 else abs(c)
                if err > worst[0]:
                    worst = (err, k, c, o)
            out.append((kind, p, worst, None))
        return out

    bad = 0
    for res in _pool_map(work, _coeff_grid(config)):
        for kind, (a, b, alpha, beta), (err, k, c, o), error in res:
            ok = err <= config.tol
            rep.add(kind=kind, a=a, b=b, alpha=alpha, beta=beta, N=N, oracle_dps=dps, worst_k=k,
                    closed=c, oracle=o, rel_err=err, tol=config.tol, ok=ok, error=error)
            if not ok:
                bad += 1
                rep.violation(f"{kind}_k mismatch {err:.3e} at k={k}",
                              _rerun(config, a=[a], b=[b], alpha=[alpha], beta=[beta]))
    rep.summary = {"points": len(rep.rows), "violations": bad}
    return rep, EXIT_VIOLATION if bad else EXIT_OK


def cmd_scan(config: RunConfig) -> tuple:
    g = config.grid
    grid = [ParameterPoint(a, b, al, be) for a, b, al, be in itertools.product(g["a"], g["b"], g["alpha"], g["beta"])]
    cols = ["kind", "a", "b", "alpha", "beta", "N", "noise_floor", "k_lo", "k_hi", "verdict",
            "expected", "min_abs", "first_violation_k", "violations", "reverified", "counterexample",
            "error"]
    rep = Report(config, cols)
    reports = turan.conjecture_scan(grid, config.order, noise_floor=config.tol)
    counts = {v: 0 for v in turan.VERDICTS}
    counter = 0
    for r in reports:
        p = r.point
        counts[r.verdict] += 1
        rep.add(kind=r.kind, a=p.a, b=p.b, alpha=p.alpha, beta=p.beta, N=config.order,
                noise_floor=config.tol, error=r.error, k_lo=r.k_range[0],
                k_hi=r.k_range[1], verdict=r.verdict, expected=r.expected, min_abs=r.min_abs,
                first_violation_k=r.first_violation_k, violations=r.violations,
                reverified=r.reverified, counterexample=r.counterexample)
        if r.counterexample or r.verdict == "error":
            counter += 1
            what = r.error if r.error else f"sign {r.verdict} (expected {r.expected}) survived re-verification"
            rep.violation(f"{r.kind} {what}",
                          _rerun(config, a=[p.a], b=[p.b], alpha=[p.alpha], beta=[p.beta]))
    rep.summary = {"reports": len(reports), "verdicts": counts, "counterexamples": counter,
                   "k_range": [0, config.order]}
    return rep, EXIT_VIOLATION if counter else EXIT_OK


def cmd_identities(config: RunConfig) -> tuple:
    sweep = identities.run_sweep(config.seed, config.options["max_mn"], config.options["random"])
    cols = ["identity", "checked", "failures", "seed", "max_mn", "random"]
    rep = Report(config, cols)
    for name in identities.IDENTITIES:
        fails = [f for f in sweep.failures if f["identity"] == name]
        rep.add(identity=name, checked=sweep.checked.get(name, 0), failures=len(fails), seed=sweep.seed,
                max_mn=config.options["max_mn"], random=config.options["random"])
    for f in sweep.failures:
        rep.violation(f"exact identity failed: {json.dumps(f, sort_keys=True)}",
                      shlex.join([PROG, "identities", "--seed", str(config.seed)]))
    rep.summary = {"checked": sum(sweep.checked.values()), "failures": len(sweep.failures)}
    return rep, EXIT_VIOLATION if sweep.failures else EXIT_OK


Q_REPRESENTATIVES = (0.5, 1.0, 1.5, 2.0, 3.0)
Q_COMPANIONS = (1.0, 2.5, 5.0)
LEMMA_ALPHAS = (0.2, 0.5, 0.9, 1.0, 1.5, 3.0)
LEMMA_XS = (0.3, 1.0, 2.0, 10.0)
CHAIN_XS = (0.1, 0.3, 0.5, 0.7, 0.9)


def cmd_proofcheck(config: RunConfig) -> tuple:
    cols = ["check", "theorem", "a", "b", "x", "alpha", "value", "expected", "ok"]
    rep = Report(config, cols)
    tol = config.options["fd_tol"]
    bad = 0

    def record(ok, **row):
        nonlocal bad
        rep.add(ok=ok, **row)
        if not ok:
            bad += 1
            rep.violation(f"{row['check']} failed: {row}", shlex.join([PROG, "proofcheck"]))

    for theorem in proofcheck.THEOREMS:
        for p, c in itertools.product(Q_REPRESENTATIVES, Q_COMPANIONS):
            a, b = (p, c) if theorem == "in_b" else (c, p)
            pat = proofcheck.q_sign_pattern(theorem, a, b)
            want = proofcheck.expected_q_pattern(theorem, a, b)
            record(pat.pattern == want, check="q_sign_pattern", theorem=theorem, a=a, b=b,
                   value=str(pat), expected="(" + ",".join(want) + ")")
        for p, c in itertools.product((0.5, 1.0, 1.5, 2.5), (0.7, 1.0, 3.0)):
            a, b = (p, c) if theorem == "in_b" else (c, p)
            for res in proofcheck.chain_consistency(theorem, a, b, CHAIN_XS):
                record(res.residual <= 1e-6, check=f"chain {res.link}", theorem=theorem, a=a, b=b,
                       value=res.residual, expected="<=1e-06")

    for alpha, x in itertools.product(LEMMA_ALPHAS, LEMMA_XS):
        r, r1 = proofcheck.lemma_psi_check(alpha, x), proofcheck.lemma_psi_check(alpha, x + 1)
        if alpha < 1:
            ok, exp = r.f < r1.f < 0, "f(x)<f(x+1)<0"
        elif alpha > 1:
            ok, exp = r.f > r1.f > 0, "f(x)>f(x+1)>0"
        else:
            ok, exp = abs(r.f) <= 1e-12, "|f|<=1e-12"
        ok = ok and abs(r.recurrence_residual) <= 1e-11
        record(ok, check="lemma_f", x=x, alpha=alpha, value=r.f, expected=exp)

    g = config.grid
    for a, b, x in itertools.product(g["a"], g["b"], g["x"]):
        for direction in proofcheck.THEOREMS:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", proofcheck.StepTooSmallWarning)
                v = proofcheck.logconc_fd(a, b, x, direction=direction)
            if direction == "in_a" and b == 1:
                ok, exp = abs(v) <= 1e-6, "|fd|<=1e-06"
            else:
                sign = -1 if direction == "in_b" or b > 1 else 1
                ok, exp = v * sign > tol, ("<" if sign < 0 else ">") + f"{'-' if sign < 0 else ''}{tol:g}"
            record(ok, check="logconc_fd", theorem=direction, a=a, b=b, x=x, value=v, expected=exp)
    rep.summary = {"checks": len(rep.rows), "violations": bad}
    return rep, EXIT_VIOLATION if bad else EXIT_OK


def cmd_bounds(config: RunConfig) -> tuple:
    cols = ["family", "a", "b", "nu", "x", "m", "M", "lower", "det", "upper", "slack", "ok", "error"]
    rep = Report(config, cols)
    g = config.grid
    skipped = bad = 0
    families = ("a", "b") if config.options["family"] == "both" else (config.options["family"],)
    for fam in families:
        for a, b, nu in itertools.product(g["a"], g["b"], g["nu"]):
            try:
                if fam == "a":
                    m, M = turan.turan_bounds_a(a, b, nu)
                    checks = turan.check_turan_bounds_a(a, b, nu, g["x"], slack=config.tol)
                else:
                    m, M = turan.turan_bounds_b(a, b, nu)
                    checks = turan.check_turan_bounds_b(a, b, nu, g["x"], slack=config.tol)
            except ConvergenceError as exc:
                bad += 1
                rep.add(family=fam, a=a, b=b, nu=nu, slack=config.tol, ok=False, error=str(exc))
                rep.violation(f"numerical failure ({fam}) at a={a}, b={b}, nu={nu}: {exc}",
                              shlex.join([PROG, "bounds", "--family", fam, "--grid-a", _fmt(a),
                                          "--grid-b", _fmt(b), "--grid-nu", str(nu)]))
                continue
            except DomainError:
                skipped += 1
                continue
            for c in checks:
                rep.add(family=fam, a=a, b=b, nu=nu, x=c.x, m=m, M=M, lower=c.lower, det=c.det,
                        upper=c.upper, slack=config.tol, ok=c.ok)
                if not c.ok:
                    bad += 1
                    rep.violation(f"bound chain broken ({fam}) at x={c.x}",
                                  shlex.join([PROG, "bounds", "--family", fam, "--grid-a", _fmt(a),
                                              "--grid-b", _fmt(b), "--grid-nu", str(nu),
                                              "--grid-x", _fmt(c.x)]))
    rep.summary = {"rows": len(rep.rows), "skipped_parameter_sets": skipped, "violations": bad}
    return rep, EXIT_VIOLATION if bad else EXIT_OK


def cmd_optimize(config: RunConfig) -> tuple:
    path = config.options["instance"]
    if path is None:
        raise UsageError("optimize needs --instance PATH (use - for stdin)")
    try:
        text = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
    except OSError as exc:
        raise UsageError(str(exc)) from None
    try:
        inst = optimizer.parse_instance(text)
        if config.options["alpha_ge_w"]:
            inst = optimizer.LotteryInstance(inst.costs, inst.wins, inst.probs, inst.epsilon, True)
    except (DomainError, KeyError, ValueError) as exc:
        raise UsageError(f"bad instance: {exc}") from None
    cols = ["i", "c", "w", "p", "alpha"]
    rep = Report(config, cols)
    try:
        sol = optimizer.solve(inst, config.tol)
    except (ConvergenceError, DomainError) as exc:
        rep.summary = {"error": str(exc)}
        rep.violation(str(exc), shlex.join([PROG, "optimize", "--instance", path]))
        return rep, EXIT_VIOLATION
    for i, (c, w, p, a) in enumerate(zip(inst.costs, inst.wins, inst.probs, sol.alpha)):
        rep.add(i=i, c=c, w=w, p=p, alpha=a)
    rep.summary = sol.to_dict()
    rep.summary["epsilon"] = inst.epsilon
    ok = sol.constraint_value >= inst.epsilon - 1e-8 and sol.kkt_residual <= config.tol
    if not ok:
        rep.violation("solution outside tolerance", shlex.join([PROG, "optimize", "--instance", path]))
    return rep, EXIT_OK if ok else EXIT_VIOLATION


HANDLERS = {
    "eval": cmd_eval, "coeffs": cmd_coeffs, "scan": cmd_scan, "identities": cmd_identities,
    "proofcheck": cmd_proofcheck, "bounds": cmd_bounds, "optimize": cmd_optimize,
}

DEFAULT_TOLS = {"coeffs": 1e-9, "scan": turan.NOISE_FLOOR, "proofcheck": 1e-8, "bounds": 1e-12,
                "optimize": 1e-10, "identities": 0.0, "eval": 0.0}


# --- argument handling ---------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    for name in ("a", "b", "alpha", "beta", "x", "nu"):
        common.add_argument(f"--grid-{name}", metavar="LIST", help="comma list or lo:hi:step")
    common.add_argument("--order", type=int, default=series.DEFAULT_ORDER, metavar="N",
                        help="truncation order of coefficient series")
    common.add_argument("--tol", type=float, default=None, help="pass/fail tolerance")
    common.add_argument("--seed", type=int, default=identities.DEFAULT_SEED)
    common.add_argument("--format", choices=("csv", "json"), default="csv", dest="output_format")
    common.add_argument("--out", default="-", metavar="PATH", help="report path (- for stdout)")

    parser = _Parser(prog=PROG, description="Incomplete beta Turán-type inequality toolkit.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    p = sub.add_parser("eval", parents=[common], help="evaluate I_x(a, b)")
    p.add_argument("params", nargs="+", help="a=... b=... x=...")
    p.add_argument("--derivs", action="store_true", help="also print parameter derivatives")
    p = sub.add_parser("coeffs", parents=[common], help="closed-form coefficients against the oracle")
    p.add_argument("--oracle-dps", type=int, default=30,
                   help="digits for the oracle products (0 = double precision)")
    sub.add_parser("scan", parents=[common], help="coefficient sign scan over a grid")
    p = sub.add_parser("identities", parents=[common], help="exact rational identity sweep")
    p.add_argument("--max-mn", type=int, default=identities.DEFAULT_MAX_MN)
    p.add_argument("--random", type=int, default=identities.DEFAULT_RANDOM)
    sub.add_parser("proofcheck", parents=[common], help="proof-chain, lemma and finite-difference checks")
    p = sub.add_parser("bounds", parents=[common], help="two-sided Turán determinant bounds")
    p.add_argument("--family", choices=("a", "b", "both"), default="both")
    p = sub.add_parser("optimize", parents=[common], help="solve a ticket-allocation instance")
    p.add_argument("--instance", default=None, metavar="PATH")
    p.add_argument("--alpha-ge-w", action="store_true", help="require alpha_i >= w_i")
    return parser


def resolve_config(args) -> RunConfig:
    cmd = args.command
    grid = {}
    for name, default in DEFAULT_GRIDS.get(cmd, {}).items():
        flag = getattr(args, f"grid_{name}", None)
        grid[name] = parse_grid(flag) if flag is not None else default
    opts = {}
    if cmd == "eval":
        opts.update(params=list(args.params), derivs=args.derivs)
    elif cmd == "coeffs":
        opts["oracle_dps"] = args.oracle_dps
    elif cmd == "identities":
        opts.update(max_mn=args.max_mn, random=args.random)
    elif cmd == "bounds":
        opts["family"] = args.family
    elif cmd == "optimize":
        opts.update(instance=args.instance, alpha_ge_w=args.alpha_ge_w)
    elif cmd == "proofcheck":
        opts["fd_tol"] = args.tol if args.tol is not None else DEFAULT_TOLS[cmd]
    if args.order < 0:
        raise UsageError("--order must be nonnegative")
    return RunConfig(
        command=cmd, grid=grid, order=args.order,
        tol=args.tol if args.tol is not None else DEFAULT_TOLS[cmd],
        seed=args.seed, output_format=args.output_format, output_path=args.out, options=opts,
    )


def run(config: RunConfig) -> int:
    """Execute one command, write its report and return the exit code."""
    out, code = HANDLERS[config.command](config)
    text = out if isinstance(out, str) else out.render()
    if config.output_path == "-":
        sys.stdout.write(text)
    else:
        with open(config.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    if not isinstance(out, str):
        for v in out.violations:
            print(f"violation: {v['message']}\n  rerun: {v['rerun']}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        config = resolve_config(args)
        return run(config)
    except UsageError as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
