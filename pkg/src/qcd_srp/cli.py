"""Command-line front end.

Emits plot-ready CSV or JSON tables for the analytic quantities and the
Monte Carlo estimators, plus a self-test command wiring both together.
Exit codes: 0 success, 1 computation failure, 2 bad arguments.  Output is
byte-identical across reruns of an identical run specification; progress
chatter goes to stderr only.
"""

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from . import _backend, mc, qsd, risk, specfun
from .numerics import Tolerance
from .qsd import Model, QsdEval

FIGURES_COLUMNS = ["mu", "T", "A_T", "lambda", "B", "C", "gap", "gap_bound",
                   "error"]


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if math.isinf(v):
            return "inf"
        return f"{v:.10f}"
    return str(v)


def _jsonable(v):
    if isinstance(v, float):
        if math.isinf(v):
            return "inf"
        return round(v, 10)
    return v


def _write_table(path, fmt, runspec, columns, rows):
    if fmt == "csv":
        lines = [f"# {k}={_fmt(v)}" for k, v in runspec.items()]
        lines.append(",".join(columns))
        for row in rows:
            lines.append(",".join(_fmt(row.get(c)) for c in columns))
        text = "\n".join(lines) + "\n"
    else:
        payload = {
            "runspec": {k: _jsonable(v) for k, v in runspec.items()},
            "rows": [{c: _jsonable(row.get(c)) for c in columns} for row in rows],
        }
        text = json.dumps(payload, indent=2) + "\n"
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="ascii") as fh:
            fh.write(text)


def _progress(msg):
    print(msg, file=sys.stderr, flush=True)


def _thread_budget():
    raw = os.environ.get("QCD_SRP_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise SystemExit(f"QCD_SRP_THREADS must be an integer, got {raw!r}")
    if n < 0:
        raise SystemExit("QCD_SRP_THREADS must be >= 0")
    if n == 0:
        n = min(os.cpu_count() or 1, 8)
    return n


def _risk_row(args):
    """One (mu, T) row of a risk table; failures land in the error column."""
    mu, t, tol_rel = args
    row = {"mu": mu, "T": t, "error": ""}
    try:
        report = risk.optimality_gap(Model(mu), t,
                                     Tolerance(rel=tol_rel, abs=1e-13))
        row.update({"A_T": report.A_T, "lambda": report.lam, "B": report.B,
                    "C": report.C, "gap": report.gap,
                    "gap_bound": report.gap_bound})
    except Exception as exc:  # recorded, run continues
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def _risk_rows(tasks):
    """Compute rows for (mu, T, tol) tasks, concurrently when allowed."""
    workers = _thread_budget()
    if workers > 1 and len(tasks) >= 4:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = []
            for i, row in enumerate(pool.map(_risk_row, tasks)):
                rows.append(row)
                if len(tasks) > 20 and (i + 1) % 10 == 0:
                    _progress(f"computed {i + 1}/{len(tasks)} rows")
            return rows
    rows = []
    for i, task in enumerate(tasks):
        rows.append(_risk_row(task))
        if len(tasks) > 20 and (i + 1) % 10 == 0:
            _progress(f"computed {i + 1}/{len(tasks)} rows")
    return rows


def _t_grid(t_from, t_to, t_step):
    if not (t_from > 0 and t_to >= t_from and t_step > 0):
        raise SystemExit("need 0 < t-from <= t-to and t-step > 0")
    ts = []
    t = t_from
    while t <= t_to + 1e-9 * t_step:
        ts.append(round(t, 12))
        t += t_step
    return ts


def _runspec(command, spec, seed=None):
    out = {"command": command}
    out.update(spec)
    out["format"] = spec.get("format", "csv")
    if seed is not None:
        out["seed"] = seed
    return out


def cmd_eigen(args):
    spec = {"mu": args.mu, "A": args.A, "tol_rel": args.tol_rel,
            "format": args.format}
    pair = qsd.solve_lambda(Model(args.mu), args.A)
    rows = [{"mu": args.mu, "A": args.A, "lambda": pair.lam, "xi2": pair.xi2,
             "mean": qsd.qsd_mean(pair), "var": qsd.qsd_var(pair)}]
    _write_table(args.out, args.format, _runspec("eigen", spec),
                 ["mu", "A", "lambda", "xi2", "mean", "var"], rows)
    return 0


def cmd_qsd(args):
    spec = {"mu": args.mu, "A": args.A, "points": args.points,
            "tol_rel": args.tol_rel, "format": args.format}
    pair = qsd.solve_lambda(Model(args.mu), args.A)
    ev = QsdEval(pair)
    rows = []
    for i in range(args.points):
        x = args.A * i / (args.points - 1)
        rows.append({"x": x, "pdf": qsd.qsd_pdf(ev, x),
                     "cdf": qsd.qsd_cdf(ev, x)})
    header = _runspec("qsd", spec)
    header["lambda"] = pair.lam
    _write_table(args.out, args.format, header, ["x", "pdf", "cdf"], rows)
    return 0


def cmd_calibrate(args):
    spec = {"mu": args.mu, "T": args.T, "tol_rel": args.tol_rel,
            "format": args.format}
    pair = risk.calibrate_threshold(Model(args.mu), args.T)
    rows = [{"mu": args.mu, "T": args.T, "A_T": pair.A, "lambda": pair.lam}]
    _write_table(args.out, args.format, _runspec("calibrate", spec),
                 ["mu", "T", "A_T", "lambda"], rows)
    return 0


def cmd_risk_table(args):
    spec = {"mu": args.mu, "t_from": args.t_from, "t_to": args.t_to,
            "t_step": args.t_step, "tol_rel": args.tol_rel,
            "format": args.format}
    ts = _t_grid(args.t_from, args.t_to, args.t_step)
    rows = _risk_rows([(args.mu, t, args.tol_rel) for t in ts])
    _write_table(args.out, args.format, _runspec("risk-table", spec),
                 FIGURES_COLUMNS, rows)
    return 1 if any(r["error"] for r in rows) else 0


def cmd_figures(args):
    mus = args.mu if args.mu else [0.5, 1.0]
    spec = {"mu": ",".join(str(m) for m in mus), "t_from": args.t_from,
            "t_to": args.t_to, "t_step": args.t_step,
            "tol_rel": args.tol_rel, "format": args.format}
    ts = _t_grid(args.t_from, args.t_to, args.t_step)
    tasks = [(m, t, args.tol_rel) for m in mus for t in ts]
    rows = _risk_rows(tasks)
    _write_table(args.out, args.format, _runspec("figures", spec),
                 FIGURES_COLUMNS, rows)
    return 1 if any(r["error"] for r in rows) else 0


def _parse_theta(raw):
    if raw in ("inf", "infinity"):
        return math.inf
    return float(raw)


def cmd_simulate(args):
    headstart = args.headstart if args.headstart == mc.QSD_HEADSTART \
        else float(args.headstart)
    thetas = [_parse_theta(t) for t in args.theta] if args.theta else [math.inf]
    cfg = mc.SimConfig(model=Model(args.mu), A=args.A, headstart=headstart,
                       theta=thetas[0], step=args.step, n_paths=args.paths,
                       seed=args.seed, t_max=args.t_max)
    spec = {"mu": args.mu, "A": args.A, "headstart": args.headstart,
            "mode": args.mode, "theta": ",".join(_fmt(t) for t in thetas),
            "step": args.step, "paths": args.paths, "t_max": args.t_max,
            "format": args.format}
    columns = ["mode", "theta", "mean", "std_err", "n_effective", "censored"]
    rows = []
    if args.mode == "passage":
        est = mc.simulate_gsr_passage(cfg)
        rows.append({"mode": "passage", "theta": cfg.theta, "mean": est.mean,
                     "std_err": est.std_err, "n_effective": est.n_effective,
                     "censored": est.censored})
    elif args.mode == "srp":
        res = mc.simulate_srp(cfg, thetas)
        columns = columns + ["cv"]
        for theta in thetas:
            est = res.estimates[theta]
            rows.append({"mode": "srp", "theta": theta, "mean": est.mean,
                         "std_err": est.std_err,
                         "n_effective": est.n_effective,
                         "censored": est.censored,
                         "cv": res.cv if math.isinf(theta) else None})
    else:  # fv: empirical quasi-stationary sample
        sample = mc.estimate_qsd_empirical(cfg)
        columns = ["index", "position"]
        rows = [{"index": i, "position": float(x)}
                for i, x in enumerate(sample)]
    _write_table(args.out, args.format, _runspec("simulate", spec, args.seed),
                 columns, rows)
    return 0


def run_selftest(paths=1000, seed=7, step=1e-3):
    """Reduced invariant suite; returns (ok, report lines)."""
    checks = []

    def check(name, ok, detail):
        checks.append((name, bool(ok), detail))

    try:
        worst = 0.0
        for z in (0.1, 2.0, 10.0):
            w0 = specfun.whittaker_w(specfun.WhittakerIndex(0, 1.0), z)
            w1 = specfun.whittaker_w(specfun.WhittakerIndex(1, 1.0), z)
            worst = max(worst,
                        abs(w0 / math.exp(-0.5 * z) - 1.0),
                        abs(w1 / (z * math.exp(-0.5 * z)) - 1.0))
        check("closed-forms", worst <= 1e-10, f"worst rel err {worst:.2e}")
    except Exception as exc:
        check("closed-forms", False, repr(exc))

    try:
        x = 1.5
        series = math.exp(x) * specfun._e1_series(x)
        cf = specfun._f_cf(x)
        rel = abs(series - cf) / cf
        check("e1-dual-method", rel <= 1e-13, f"crossover mismatch {rel:.2e}")
    except Exception as exc:
        check("e1-dual-method", False, repr(exc))

    try:
        model = Model(1.0)
        pair = qsd.solve_lambda(model, 10.0)
        lo, hi = qsd.lambda_bracket(model, 10.0)
        z = pair.z_threshold
        resid = abs(specfun.whittaker_w_scaled(1, pair.xi2, z))
        scale = max(abs(specfun.whittaker_w_scaled(1, 1.0 - 8.0 * lo, z)),
                    abs(specfun.whittaker_w_scaled(1, 1.0 - 8.0 * hi, z)))
        ok = lo <= pair.lam <= hi and resid <= 1e-9 * scale
        check("eigenvalue", ok,
              f"lambda={pair.lam:.12f}, residual/scale={resid / scale:.2e}")
    except Exception as exc:
        check("eigenvalue", False, repr(exc))

    try:
        model = Model(1.0)
        pair = qsd.solve_lambda(model, 5.0)
        tol = Tolerance(rel=1e-11, abs=1e-14)
        c1 = risk.srp_delay(model, pair, tol)
        c2 = risk.srp_delay_direct(model, pair, tol)
        rel = abs(c1 - c2) / c1
        check("delay-identity", rel <= 1e-6, f"route mismatch {rel:.2e}")
    except Exception as exc:
        check("delay-identity", False, repr(exc))

    try:
        report = risk.optimality_gap(Model(1.0), 25.0)
        ok = -1e-8 <= report.gap <= report.gap_bound + 1e-8
        check("gap-sandwich", ok,
              f"gap={report.gap:.6f}, bound={report.gap_bound:.6f}")
    except Exception as exc:
        check("gap-sandwich", False, repr(exc))

    try:
        cfg = mc.SimConfig(model=Model(1.0), A=5.0, headstart=0.0,
                           theta=math.inf, step=step, n_paths=paths, seed=seed)
        est = mc.simulate_gsr_passage(cfg)
        dev = abs(est.mean - 5.0)
        check("mc-arl", dev <= 3.0 * est.std_err,
              f"mean={est.mean:.4f}, 3se={3 * est.std_err:.4f}")
    except Exception as exc:
        check("mc-arl", False, repr(exc))

    lines = [f"{'ok  ' if ok else 'FAIL'} {name}: {detail}"
             for name, ok, detail in checks]
    return all(ok for _, ok, _ in checks), lines


def cmd_selftest(args):
    ok, lines = run_selftest(paths=args.paths, seed=args.seed, step=args.step)
    for line in lines:
        print(line)
    print(f"selftest {'PASSED' if ok else 'FAILED'} "
          f"({_backend.backend_name()} backend)")
    return 0 if ok else 1


def _add_common(p):
    p.add_argument("--tol-rel", type=float, default=1e-9,
                   help="relative quadrature tolerance")
    p.add_argument("--out", default="-", help="output path, - for stdout")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="qcd-srp",
        description="Quickest change detection: randomized "
                    "Shiryaev-Roberts analytics and simulation")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eigen", help="survival decay rate for a threshold")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--A", type=float, required=True)
    _add_common(p)
    p.set_defaults(func=cmd_eigen)

    p = sub.add_parser("qsd", help="quasi-stationary pdf/cdf on a grid")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--A", type=float, required=True)
    p.add_argument("--points", type=int, default=101)
    _add_common(p)
    p.set_defaults(func=cmd_qsd)

    p = sub.add_parser("calibrate", help="threshold matching a mean time to "
                                         "false alarm")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--T", type=float, required=True)
    _add_common(p)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("risk-table", help="bound/risk/gap table over T")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--t-from", type=float, default=1.0)
    p.add_argument("--t-to", type=float, default=100.0)
    p.add_argument("--t-step", type=float, default=1.0)
    _add_common(p)
    p.set_defaults(func=cmd_risk_table)

    p = sub.add_parser("figures", help="reproduce the two-drift experiment "
                                       "table (plot-ready)")
    p.add_argument("--mu", type=float, action="append",
                   help="drift value; repeatable (default 0.5 and 1.0)")
    p.add_argument("--t-from", type=float, default=1.0)
    p.add_argument("--t-to", type=float, default=100.0)
    p.add_argument("--t-step", type=float, default=1.0)
    _add_common(p)
    p.set_defaults(func=cmd_figures)

    p = sub.add_parser("simulate", help="Monte Carlo estimators")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--A", type=float, required=True)
    p.add_argument("--mode", choices=("passage", "srp", "fv"),
                   default="passage")
    p.add_argument("--headstart", default="0.0",
                   help="value in [0, A] or 'qsd'")
    p.add_argument("--theta", action="append",
                   help="change-point, 'inf' for never; repeatable")
    p.add_argument("--paths", type=int, default=10_000)
    p.add_argument("--step", type=float, default=1e-3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--t-max", type=float, default=None)
    _add_common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("selftest", help="reduced invariant suite")
    p.add_argument("--paths", type=int, default=1000)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--step", type=float, default=1e-3)
    p.set_defaults(func=cmd_selftest)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (BrokenPipeError, KeyboardInterrupt):
        return 1
    except Exception as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
