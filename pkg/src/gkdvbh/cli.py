"""
Command line interface.

    gkdvbh run --config fig4.cfg [--plot] [--out DIR]
    gkdvbh compare --config fig9a.cfg --config fig9b.cfg [--window 1,4.5] [--plot] [--out DIR]
    gkdvbh verify [--seed N] [--trials N] [--out DIR]
    gkdvbh grid-report [--target exp] [--n 8,16,32,64] [--kte-alpha A] [--out DIR]

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 solver divergence.
"""

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__, analysis
from .config import parse_config
from .control import FLUX_LAWS, ControlLaw
from .errors import ConfigError, InsufficientDataError
from .output import write_meta, write_run_csv
from .spectral import DEFAULT_KTE_ALPHA, spectral_convergence_report
from .svg import write_plot
from .timestepper import SimulationError, simulate

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_DIVERGED = 0, 1, 2, 3


def _out_dir(args, config=None):
    path = Path(args.out) if args.out else Path(config.output_dir if config else "out")
    path.mkdir(parents=True, exist_ok=True)
    return path


def _float_pair(text):
    try:
        a, b = (float(s) for s in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'a,b', got {text!r}") from None
    if not a < b:
        raise argparse.ArgumentTypeError(f"window start must be below its end, got {text!r}")
    return a, b


def _int_list(text):
    try:
        return [int(s) for s in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def cmd_run(args):
    config = parse_config(args.config)
    out = _out_dir(args, config)
    try:
        record = simulate(config)
    except SimulationError as exc:
        write_run_csv(out / "run.csv", exc.record, failure=(exc.time, str(exc.cause)))
        write_meta(out / "run_meta.json", config, status="failed",
                   extra={"failed_at": exc.time, "error": str(exc.cause)})
        print(f"solver failed at t={exc.time:.6g}: {exc.cause}", file=sys.stderr)
        return EXIT_DIVERGED
    write_run_csv(out / "run.csv", record)
    write_meta(out / "run_meta.json", config, extra={
        "samples": len(record),
        "max_step_bc_residual": record.max_step_bc_residual,
        "l2_increases": record.l2_increases,
    })
    if args.plot:
        write_plot(out / "plot.svg", record.times, [("l2", record.l2)],
                   f"L2 norm ({config.law.value}, delta={config.params.delta})",
                   config_hash=config.hash())
    print(f"wrote {out / 'run.csv'} ({len(record)} samples, final l2 {record.l2[-1]:.6e})")
    return EXIT_OK


_SHARED = ("nu", "mu", "alpha", "beta", "gamma", "delta", "eta", "n_points", "kte_alpha", "dt", "u0")


def theoretical_rate(config):
    """Guaranteed L2 decay rate for the config's law, or nan when none applies."""
    params, law = config.params, config.law
    if law in FLUX_LAWS:
        rate, applies = analysis.flux_law_l2_rate(params)
        return rate if applies else math.nan
    if law is ControlLaw.SIMPLE:
        ok, _ = analysis.simple_law_threshold(params)
        rate = analysis.simple_law_rate(params, 0.999)
        return rate if ok and rate > 0 else math.nan
    return math.nan


def cmd_compare(args):
    configs = [parse_config(p) for p in args.config]
    first = configs[0].echo()
    for path, cfg in zip(args.config[1:], configs[1:]):
        echo = cfg.echo()
        diff = [k for k in _SHARED if echo[k] != first[k]]
        if diff:
            raise ConfigError(f"{path} differs from {args.config[0]} in shared settings: {', '.join(diff)}")
    out = _out_dir(args, configs[0])
    rows, records = [], []
    for path, cfg in zip(args.config, configs):
        try:
            record = simulate(cfg)
        except SimulationError as exc:
            print(f"{path}: solver failed at t={exc.time:.6g}: {exc.cause}", file=sys.stderr)
            return EXIT_DIVERGED
        try:
            slope, r2 = analysis.fit_decay_rate(record, args.window)
        except InsufficientDataError as exc:
            raise ConfigError(f"{path}: {exc}") from None
        records.append(record)
        rows.append((cfg.law.value, cfg.params.delta, slope, r2, theoretical_rate(cfg)))

    lines = ["law,delta,slope,r_squared,theoretical_rate"]
    lines += [f"{law},{d},{s:.16e},{r:.16e},{th:.16e}" for law, d, s, r, th in rows]
    (out / "compare.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    (out / "compare_meta.json").write_text(json.dumps({
        "gkdvbh_version": __version__,
        "config_hashes": {str(p): c.hash() for p, c in zip(args.config, configs)},
        "window": args.window,
    }, indent=2, default=str) + "\n", encoding="utf-8")

    print(f"{'law':<10} {'delta':>5} {'slope':>10} {'r^2':>10} {'theory':>10}")
    for law, d, s, r, th in rows:
        print(f"{law:<10} {d:>5d} {s:>10.4f} {r:>10.6f} {th:>10.4f}")

    status = EXIT_OK
    slopes = {law: s for law, _, s, _, _ in rows}
    if ControlLaw.CURVATURE.value in slopes:
        for law in FLUX_LAWS:
            if law.value in slopes:
                ok = slopes[ControlLaw.CURVATURE.value] > slopes[law.value]
                print(f"{'PASS' if ok else 'FAIL'}  curvature decays slower than {law.value}: "
                      f"{slopes[ControlLaw.CURVATURE.value]:.4f} > {slopes[law.value]:.4f}")
                if not ok:
                    status = EXIT_VERIFY
    if args.plot:
        write_plot(out / "compare.svg", records[0].times,
                   [(f"{r.law.value}", r.l2) for r in records], "L2 norm by control law",
                   config_hash=",".join(c.hash() for c in configs), log_only=True)
    return status


def cmd_verify(args):
    from . import verification

    if args.trials < 1:
        raise ConfigError(f"--trials must be >= 1, got {args.trials}")
    try:
        verification.rate_multiplier()
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    lines = []

    def echo(result):
        line = result.line()
        lines.append(line)
        print(line, flush=True)

    results = verification.run_all(seed=args.seed, trials=args.trials, echo=echo)
    ok = verification.all_passed(results)
    failed = [r.name for r in results if not r.passed and not r.informational]
    summary = "verify: all suites passed" if ok else f"verify: {len(failed)} failing: {', '.join(failed)}"
    print(summary)
    if args.out:
        out = _out_dir(args)
        (out / "verify_report.txt").write_text("\n".join(lines + [summary]) + "\n", encoding="utf-8")
        csv = ["suite,status,trials,worst_margin,informational"]
        csv += [f"{r.name},{'pass' if r.passed else 'fail'},{r.trials},{r.worst_margin:.16e},{int(r.informational)}"
                for r in results]
        (out / "verify_report.csv").write_text("\n".join(csv) + "\n", encoding="utf-8")
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_grid_report(args):
    try:
        report = spectral_convergence_report(args.target, args.n, args.kte_alpha)
    except (ValueError, ConfigError) as exc:
        raise ConfigError(str(exc)) from None
    print(f"d/dx {args.target}, kte_alpha={args.kte_alpha}")
    print(f"{'n_points':>8} {'max_error':>12}")
    for n, err in report:
        print(f"{n:>8d} {err:>12.3e}")
    if args.out:
        out = _out_dir(args)
        lines = ["n_points,max_error"] + [f"{n},{err:.16e}" for n, err in report]
        (out / "grid_report.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="gkdvbh", description=__doc__.split("\n\n")[0].strip())
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="simulate one config and write run.csv")
    p.add_argument("--config", required=True, help="config path or bundled name (e.g. fig4.cfg)")
    p.add_argument("--plot", action="store_true", help="also write plot.svg")
    p.add_argument("--out", help="output directory (default: the config's output_dir)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("compare", help="fit decay slopes for several control laws")
    p.add_argument("--config", required=True, action="append", help="repeat for each law")
    p.add_argument("--window", type=_float_pair, default=None, help="fit window 'a,b' (default 0.2T,0.9T)")
    p.add_argument("--plot", action="store_true", help="also write compare.svg")
    p.add_argument("--out", help="output directory")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("verify", help="run every verification suite")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--out", help="also write verify_report.{txt,csv} here")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("grid-report", help="spectral differentiation error against grid size")
    p.add_argument("--target", default="exp", help="exp, sin_pi, constant or cubic")
    p.add_argument("--n", type=_int_list, default=[8, 16, 24, 32, 48, 64])
    p.add_argument("--kte-alpha", type=float, default=DEFAULT_KTE_ALPHA)
    p.add_argument("--out", help="also write grid_report.csv here")
    p.set_defaults(func=cmd_grid_report)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors, which matches the config-error code
        return int(exc.code or 0)
    np.seterr(all="ignore")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
