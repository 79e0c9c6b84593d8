"""Command-line front end.

    levydiv solve    --model cl-exp --p 2 --lambda 1 --mu-rate 1 --q 0.1
    levydiv value    --model brownian --mu 1 --sigma 1 --q 0.1 --optimal --x-grid 0:5:11
    levydiv table    --model stable --alpha 1.5 --sigma 1 --q 1 --x-grid 0:10:51 --output csv
    levydiv simulate --model cl-exp --p 2 --lambda 1 --mu-rate 1 --q 0.1 --barrier 2 --x 1
    levydiv verify   --suite all --seed 7

Exit status is 0 on success, 2 on usage errors and 1 on numerical failures
or failed verification checks. Parameters can also come from a flat
``key = value`` file given with ``--config``; flags on the command line win.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from .barriers import optimal_bailout_barrier, optimal_classical_barrier, verify_hjb_bailout, verify_hjb_classical
from .exceptions import ConfigError, ConsistencyError, DomainError, NumericalFailure, UnsupportedOperation
from .models import BrownianDrift, CramerLundbergExp, HyperExpJumpDiffusion, StableSpectralNeg
from .policies import bailout_barrier_value, classical_barrier_report
from .scale import scale_eval
from .simulate import MAX_DUMP, SimConfig, dump_paths, sample_paths, simulate_doubly_reflected, simulate_reflected_barrier
from .verification import SUITES, report_json, run_suite

__all__ = ["main", "build_parser", "parse_config", "parse_grid"]

COMMANDS = ("solve", "value", "table", "simulate", "verify")

CSV_HEADERS = {
    "solve": ("problem", "level", "method", "criterion_residual", "cross_check", "reason"),
    "value": ("x", "a", "value", "dividends", "injections_cost", "note"),
    "table": ("x", "q", "w", "w_prime", "z", "wbar", "zbar", "source"),
    "simulate": ("x", "a", "quantity", "mean", "stderr", "n", "truncation_bound", "seed", "dt"),
    "verify": ("check_id", "target", "estimate", "tolerance_kind", "passed", "detail"),
}


class UsageError(Exception):
    pass


def parse_grid(text):
    """``lo:hi:n`` to ``n`` evenly spaced points (endpoints included)."""
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"--x-grid expects lo:hi:n, got {text!r}")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise UsageError(f"--x-grid expects lo:hi:n, got {text!r}") from None
    if n < 1 or (n > 1 and not hi > lo):
        raise UsageError(f"--x-grid needs n >= 1 and hi > lo, got {text!r}")
    return [float(v) for v in np.linspace(lo, hi, n)] if n > 1 else [lo]


def _floats(text):
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None


def parse_config(path):
    """Read ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config {path!r}: {exc.strerror}") from None
    with fh:
        for n, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise UsageError(f"{path}:{n}: expected 'key = value'")
            out[key.strip().replace("-", "_")] = value.strip()
    return out


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    m = common.add_argument_group("model")
    m.add_argument("--model", choices=("brownian", "cl-exp", "stable", "hyperexp"))
    m.add_argument("--mu", type=float, help="drift (brownian, hyperexp); claim rate for cl-exp")
    m.add_argument("--sigma", type=float)
    m.add_argument("--p", type=float, help="premium rate")
    m.add_argument("--lambda", dest="lam", type=float, help="claim intensity")
    m.add_argument("--mu-rate", type=float, help="exponential claim rate")
    m.add_argument("--alpha", type=float)
    m.add_argument("--weights", type=str, help="a,b,... mixture weights")
    m.add_argument("--rates", type=str, help="a,b,... exponential rates")
    c = common.add_argument_group("problem")
    c.add_argument("--q", type=float, help="discount rate")
    c.add_argument("--phi", type=float, help="unit cost of injected capital")
    c.add_argument("--barrier", type=float)
    c.add_argument("--optimal", action="store_true", default=None, help="use the optimal barrier")
    c.add_argument("--bailout", action="store_true", default=None, help="bail-out (double barrier) problem")
    c.add_argument("--x", type=float)
    c.add_argument("--x-grid", type=str, metavar="LO:HI:N")
    s = common.add_argument_group("simulation")
    s.add_argument("--paths", type=int)
    s.add_argument("--dt", type=float)
    s.add_argument("--horizon", type=float)
    s.add_argument("--seed", type=int)
    s.add_argument("--scheme", choices=("event", "euler"))
    s.add_argument("--dump-paths", metavar="PATH", help=f"write up to {MAX_DUMP} path logs as NDJSON")
    s.add_argument("--suite", choices=SUITES)
    o = common.add_argument_group("output")
    o.add_argument("--output", choices=("csv", "json"))
    o.add_argument("--out", metavar="PATH")
    o.add_argument("--config", metavar="PATH")

    parser = argparse.ArgumentParser(prog="levydiv", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "solve": "optimal barrier levels",
        "value": "barrier strategy values over x",
        "table": "scale functions over x",
        "simulate": "Monte Carlo estimates",
        "verify": "run a verification suite",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


_DEFAULTS = {
    "seed": 0,
    "horizon": 150.0,
    "dt": 1e-2,
    "scheme": "event",
    "suite": "all",
    "output": "json",
    "optimal": False,
    "bailout": False,
}

_TYPES = {
    "mu": float, "sigma": float, "p": float, "lam": float, "mu_rate": float, "alpha": float,
    "weights": str, "rates": str, "q": float, "phi": float, "barrier": float, "x": float,
    "x_grid": str, "paths": int, "dt": float, "horizon": float, "seed": int, "scheme": str,
    "suite": str, "output": str, "out": str, "dump_paths": str, "model": str,
    "optimal": "flag", "bailout": "flag",
}


def _merge_config(args):
    if not args.config:
        return
    for key, raw in parse_config(args.config).items():
        key = "lam" if key == "lambda" else key
        kind = _TYPES.get(key)
        if kind is None:
            raise UsageError(f"unknown config key {key!r}")
        if getattr(args, key) is not None:
            continue
        try:
            if kind == "flag":
                val = raw.lower() in ("1", "true", "yes", "on")
            else:
                val = kind(raw)
        except ValueError:
            raise UsageError(f"bad value for {key!r}: {raw!r}") from None
        setattr(args, key, val)


def _need(args, *names):
    for n in names:
        if getattr(args, n) is None:
            flag = "--lambda" if n == "lam" else "--" + n.replace("_", "-")
            raise UsageError(f"missing required parameter {flag} for --model {args.model}")


def build_model(args):
    if args.model is None:
        raise UsageError("missing --model")
    if args.model == "brownian":
        _need(args, "mu", "sigma")
        return BrownianDrift(args.mu, args.sigma)
    if args.model == "cl-exp":
        if args.mu_rate is None:
            args.mu_rate = args.mu
        _need(args, "p", "lam", "mu_rate")
        return CramerLundbergExp(args.p, args.lam, args.mu_rate)
    if args.model == "stable":
        _need(args, "alpha", "sigma")
        return StableSpectralNeg(args.alpha, args.sigma)
    _need(args, "mu", "sigma", "lam", "weights", "rates")
    return HyperExpJumpDiffusion(args.mu, args.sigma, args.lam, _floats(args.weights), _floats(args.rates))


def _xs(args, default=None):
    if args.x is not None and args.x_grid is not None:
        raise UsageError("give either --x or --x-grid, not both")
    if args.x_grid is not None:
        return parse_grid(args.x_grid)
    if args.x is not None:
        return [args.x]
    if default is None:
        raise UsageError("missing --x or --x-grid")
    return default


def _q(args):
    if args.q is None:
        raise UsageError("missing --q")
    return args.q


def _phi(args):
    if args.bailout and args.phi is None:
        raise UsageError("--bailout needs --phi")
    return args.phi


def _barrier(args, model, q):
    if args.optimal and args.barrier is not None:
        raise UsageError("give either --barrier or --optimal, not both")
    if args.optimal:
        if args.bailout:
            return optimal_bailout_barrier(model, q, args.phi).level
        return optimal_classical_barrier(model, q).level
    if args.barrier is None:
        raise UsageError("missing --barrier (or pass --optimal)")
    return args.barrier


def _sim_config(args, n_default):
    return SimConfig(
        n_paths=args.paths if args.paths is not None else n_default,
        dt=args.dt,
        horizon=args.horizon,
        seed=args.seed,
        scheme=args.scheme,
    )


def _clean(obj):
    """JSON-safe copy: non-finite floats become their repr strings."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_cell(r.get(h)) for h in header])
    return buf.getvalue()


# ---------------------------------------------------------------- commands


def cmd_solve(args):
    model, q = build_model(args), _q(args)
    phi = _phi(args)
    sol = optimal_classical_barrier(model, q)
    report = {"model": model.to_dict(), "q": q, "classical": sol.to_dict()}
    rows = [{"problem": "classical", **sol.to_dict()}]
    try:
        report["hjb_classical"] = verify_hjb_classical(model, q).to_dict()
    except UnsupportedOperation as exc:
        report["hjb_classical"] = {"skipped": str(exc)}
    if args.bailout:
        bsol = optimal_bailout_barrier(model, q, phi)
        report["phi"] = phi
        report["bailout"] = bsol.to_dict()
        rows.append({"problem": "bailout", **bsol.to_dict()})
        try:
            report["hjb_bailout"] = verify_hjb_bailout(model, q, phi).to_dict()
        except UnsupportedOperation as exc:
            report["hjb_bailout"] = {"skipped": str(exc)}
    return report, rows, 0


def cmd_value(args):
    model, q = build_model(args), _q(args)
    phi = _phi(args)
    a = _barrier(args, model, q)
    reps = []
    for x in _xs(args):
        if args.bailout:
            reps.append(bailout_barrier_value(model, q, phi, a, x))
        else:
            reps.append(classical_barrier_report(model, q, a, x))
    rows = [{**r.to_dict(), **(r.components or {})} for r in reps]
    report = {"model": model.to_dict(), "q": q, "phi": phi, "a": a, "bailout": bool(args.bailout),
              "values": [r.to_dict() for r in reps]}
    return report, rows, 0


def cmd_table(args):
    model, q = build_model(args), _q(args)
    evals = [scale_eval(model, q, x).to_dict() for x in _xs(args)]
    return {"model": model.to_dict(), "q": q, "rows": evals}, evals, 0


def cmd_simulate(args):
    model, q = build_model(args), _q(args)
    if args.bailout and args.phi is None and args.optimal:
        raise UsageError("--bailout --optimal needs --phi")
    a = _barrier(args, model, q)
    cfg = _sim_config(args, 200_000)
    out, rows = [], []
    for x in _xs(args):
        if args.bailout:
            est = simulate_doubly_reflected(model, a, x, q, cfg)
            parts = {"dividends": est.dividends, "injections": est.injections}
        else:
            est = simulate_reflected_barrier(model, a, x, q, cfg)
            parts = {"dividends": est.dividends, "ruin_transform": est.ruin_transform}
        out.append({"x": x, "a": a, **{k: v.to_dict() for k, v in parts.items()}})
        rows += [{"x": x, "a": a, "quantity": k, **v.to_dict()} for k, v in parts.items()]
    if args.dump_paths:
        paths = sample_paths(model, a, _xs(args)[0], q, cfg, n=min(cfg.n_paths, MAX_DUMP), doubly=bool(args.bailout))
        with open(args.dump_paths, "w", encoding="utf-8") as fh:
            dump_paths(paths, fh)
    report = {"model": model.to_dict(), "q": q, "config": {**cfg.__dict__, "scheme": cfg.scheme.value},
              "estimates": out}
    return report, rows, 0


def cmd_verify(args):
    models = [build_model(args)] if args.model else None
    q_list = [args.q] if args.q is not None else None
    cfg = _sim_config(args, 200_000)
    results = run_suite(args.suite, models=models, q_list=q_list, cfg=cfg, euler_dt=args.dt)
    status = 0 if all(r.passed for r in results) else 1
    return results, [r.to_dict() for r in results], status


_COMMANDS = {"solve": cmd_solve, "value": cmd_value, "table": cmd_table,
             "simulate": cmd_simulate, "verify": cmd_verify}


def _emit(args, report, rows):
    if args.output == "csv":
        text = _csv(CSV_HEADERS[args.command], rows)
    elif args.command == "verify":
        text = report_json(report) + "\n"
    else:
        text = json.dumps(_clean(report), indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _merge_config(args)
        for key, val in _DEFAULTS.items():
            if getattr(args, key) is None:
                setattr(args, key, val)
        report, rows, status = _COMMANDS[args.command](args)
        _emit(args, report, rows)
    except (UsageError, DomainError, ConfigError) as exc:
        parser.exit(2, f"levydiv {args.command}: error: {exc}\n")
    except (NumericalFailure, ConsistencyError, UnsupportedOperation) as exc:
        print(f"levydiv {args.command}: numerical failure: {exc}", file=sys.stderr)
        return 1
    return status


if __name__ == "__main__":
    sys.exit(main())
