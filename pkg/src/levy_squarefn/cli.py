"""Command-line entry point.

Two subcommands: ``run`` executes named verification suites from a
config file and writes JSON/CSV/figure artifacts; ``export`` computes a
single named field and writes it as CSV or raw binary.  Exit codes:
0 all checks passed, 1 some verification failed, 2 usage or config
error, 3 resolution or cost-guard error.

The LEVY_SQUAREFN_THREADS variable caps the BLAS/FFT worker count; it
is applied before the numerical modules load and never changes results.
"""

from __future__ import annotations

import argparse
import os
import sys


def _apply_thread_cap():
    cap = os.environ.get("LEVY_SQUAREFN_THREADS")
    if not cap:
        return
    try:
        n = max(1, int(cap))
    except ValueError:
        raise SystemExit(2)
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                "MKL_NUM_THREADS", "NUMEXPR_NUM_THREADS"):
        os.environ.setdefault(var, str(n))


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="levy-squarefn",
        description="Verification suites for nonlocal square functions "
                    "and Fourier multipliers on the periodic grid.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a verification suite")
    run.add_argument("--config", required=True, help="TOML config file")
    run.add_argument("--suite", required=True,
                     help="symbol, density, hardy-stein, square-fn, "
                          "multiplier, mc, or all")
    run.add_argument("--out", default=None, help="artifact directory")
    run.add_argument("--seed", type=int, default=None,
                     help="master seed override")
    run.add_argument("--no-plots", action="store_true",
                     help="skip figure rendering")

    exp = sub.add_parser("export", help="compute and export one field")
    exp.add_argument("--config", required=True, help="TOML config file")
    exp.add_argument("--field", required=True,
                     help="symbol, density, f0, g, or gtilde")
    exp.add_argument("--format", required=True, choices=("csv", "raw"))
    exp.add_argument("--out", default=".", help="output directory")
    return parser


def _export_field(cfg, field: str):
    from . import io as fio                      # noqa: F401
    from .errors import ConfigError
    from .jumps import build_torus_scheme
    from .spectral import (GridFunction, auto_t_max, build_symbol_grid,
                           build_time_quadrature, transition_density)
    from .square_fn import square_G, square_Gtilde
    from .suites import _Workspace, gaussian_family

    ws = _Workspace(cfg)
    if field == "symbol":
        return GridFunction(cfg.grid, ws.symbol.psi)
    if field == "density":
        return transition_density(ws.symbol, 1.0)
    if field == "f0":
        return ws.family[0]
    if field == "g":
        return square_G(ws.symbol, ws.scheme, ws.tq, ws.family[0]).values
    if field == "gtilde":
        return square_Gtilde(ws.symbol, ws.scheme, ws.tq,
                             ws.family[0]).values
    raise ConfigError(f"unknown field {field!r}", field="field")


def main(argv=None) -> int:
    _apply_thread_cap()
    args = _build_parser().parse_args(argv)

    from .config import load_config
    from .errors import ConfigError, CostGuardError, ResolutionError

    try:
        cfg = load_config(args.config)
    except FileNotFoundError:
        print(f"error: config file not found: {args.config}",
              file=sys.stderr)
        return 2
    except ConfigError as exc:
        where = f" (field {exc.field})" if exc.field else ""
        print(f"error: {exc}{where}", file=sys.stderr)
        return 2

    try:
        if args.command == "run":
            from .reports import to_json
            from .suites import run_suites
            out_dir = args.out if args.out is not None else cfg.out_dir
            results = run_suites(cfg, [args.suite], out_dir=out_dir,
                                 seed=args.seed,
                                 make_plots=not args.no_plots)
            ok = True
            for result in results:
                for rep in result.reports:
                    verdict = "PASS" if rep.passed else "FAIL"
                    print(f"{verdict} {result.suite}/{rep.name} "
                          f"rel_error={rep.rel_error:.3e} tol={rep.tol:g}")
                ok = ok and result.passed
                print(to_json({"suite": result.suite,
                               "passed": result.passed,
                               "out_dir": out_dir}, indent=None))
            return 0 if ok else 1

        field = _export_field(cfg, args.field)
        from . import io as fio
        os.makedirs(args.out, exist_ok=True)
        base = os.path.join(args.out, args.field)
        if args.format == "csv":
            fio.save_csv(field, base + ".csv")
            print(base + ".csv")
        else:
            fio.save_raw(field, base + ".raw", name=args.field)
            print(base + ".raw")
        return 0
    except ConfigError as exc:
        where = f" (field {exc.field})" if exc.field else ""
        print(f"error: {exc}{where}", file=sys.stderr)
        return 2
    except (ResolutionError, CostGuardError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
