"""Command-line entry point: ``sketchreg {rates,sketchdim,diagnose,bench}``."""
import argparse
import os
import sys

from ..errors import ConfigError, IoError, NumericalFailure, ParseError, SketchRegError
from .config import apply_overrides, load_config, parse_config, target_slope
from .report import emit_report, fit_rate
from .runs import RUNNERS

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_ASSERT = 0, 2, 3, 4


def default_slope_tol(cfg):
    if cfg.slope_tol is not None:
        return cfg.slope_tol
    m = cfg.model
    return 0.08 if 2 * m.zeta + m.gamma > 1 else 0.15


def resolve(args):
    """Build the validated config from the file plus command-line overrides."""
    overrides = list(args.override or [])
    overrides.append(f'mode="{args.command}"')
    if args.seed is not None:
        overrides.append(f"master_seed={args.seed}")
    if args.threads is not None:
        overrides.append(f"threads={args.threads}")
    if args.config is None:
        return parse_config(apply_overrides({}, overrides))
    return load_config(args.config, overrides)


def check(cfg, table, fit):
    """Acceptance check behind ``--assert``; returns (ok, message)."""
    if cfg.mode == "rates":
        return fit.within_tolerance, (f"slope {fit.slope:.4f} vs target {fit.target_slope:.4f} "
                                      f"(tol {default_slope_tol(cfg)})")
    if cfg.mode == "sketchdim":
        med = [v for _, v in table.medians("m", "projection_error")]
        ok = all(b <= a * (1 + 1e-9) + 1e-12 for a, b in zip(med, med[1:]))
        return ok, "median projection error nonincreasing in m" if ok else "median projection error increases"
    if cfg.mode == "diagnose":
        col = "bound_3lambda_ok" if cfg.sketch.kind == "nystrom_als" else "bound_6lambda_ok"
        flags = table.column(col)
        frac = sum(flags) / len(flags)
        return frac >= 0.95, f"{col}: {sum(flags)}/{len(flags)}"
    return True, "bench mode has no acceptance check"


def build_parser():
    p = argparse.ArgumentParser(prog="sketchreg", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    for name in RUNNERS:
        s = sub.add_parser(name)
        s.add_argument("--config", help="JSON experiment config")
        s.add_argument("--seed", type=int, help="master seed (u64)")
        s.add_argument("--out", default=".", help="output directory")
        s.add_argument("--threads", type=int, help="worker threads")
        s.add_argument("--override", action="append", metavar="KEY=VALUE",
                       help="dotted config key with a JSON value; repeatable")
        s.add_argument("--assert", dest="check", action="store_true",
                       help="exit 4 when the mode's acceptance check fails")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve(args)
        table = RUNNERS[cfg.mode](cfg)
        fit = None
        if cfg.mode == "rates":
            m = cfg.model
            fit = fit_rate(zip(table.column("n"), table.column("error_norm")),
                           target_slope(m.gamma, m.zeta, cfg.norm_a), default_slope_tol(cfg))
            print(f"slope {fit.slope:.4f}  intercept {fit.intercept:.4f}  r2 {fit.r_squared:.4f}  "
                  f"target {fit.target_slope:.4f}")
        os.makedirs(args.out, exist_ok=True)
        csv_path = os.path.join(args.out, cfg.output.csv)
        svg_path = os.path.join(args.out, cfg.output.svg) if cfg.output.svg else None
        emit_report(table, csv_path, svg_path, fit, title=cfg.mode)
        print(f"wrote {len(table.rows)} rows to {csv_path}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ParseError, IoError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except SketchRegError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.check:
        ok, msg = check(cfg, table, fit)
        print(("PASS " if ok else "FAIL ") + msg)
        if not ok:
            return EXIT_ASSERT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
