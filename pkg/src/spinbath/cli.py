"""Command-line entry point: ``spinbath run|sweep|check-oracle|fit``.

Exit codes: 0 success, 1 configuration error, 2 numerical failure, 3 I/O error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .config import ConfigError, ScenarioConfig, SweepConfig, load_config_file
from .fits import FitError, two_step_parameters, extract_envelope, fit_exponential, compare_to_two_step
from .propagator import PropagationError
from .runner import OutputError, read_series, run_scenario, run_sweep

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3


def _load(path, seed=None, want=None):
    try:
        cfg = load_config_file(path)
    except OSError as exc:
        raise OutputError(f"cannot read {path}: {exc.strerror}") from exc
    if want is not None and not isinstance(cfg, want):
        raise ConfigError(f"{path}: expected a {want.__name__}")
    if seed is not None:
        if isinstance(cfg, SweepConfig):
            cfg = SweepConfig(cfg.base.replace(seed=seed), cfg.omegas, (seed,), cfg.aggregation,
                              cfg.fit_window, cfg.envelope)
        else:
            cfg = cfg.replace(seed=seed)
    return cfg


def cmd_run(args) -> int:
    cfg = _load(args.config, args.seed, ScenarioConfig)
    out = Path(args.out) if args.out else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        path = out / (Path(cfg.output).name if cfg.output else f"{Path(args.config).stem}.csv")
    else:
        path = cfg.output
    res = run_scenario(cfg, output=path)
    summary = dict(res.summary, output=str(path) if path else None)
    print(json.dumps(summary, indent=2))
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _load(args.config, args.seed, SweepConfig)
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    res = run_sweep(cfg, workers=args.workers, out_dir=out, stem=Path(args.config).stem)
    print(f"{'omega':>8} {'rate_mean':>12} {'rate_std':>12} {'n_seeds':>8}")
    for r in res.rows:
        flag = "  FLAGGED" if r["flagged"] else ""
        print(f"{r['omega']:8g} {r['rate_mean']:12.6g} {r['rate_std']:12.6g} {r['n_seeds']:8d}{flag}")
    print(f"slope of rate vs omega:      {res.slope:.6g}")
    print(f"slope of 1/rate vs omega:    {res.inverse_slope:.6g}")
    return EXIT_OK if not any(r["flagged"] for r in res.rows) else EXIT_NUMERIC


def cmd_check_oracle(args) -> int:
    from .validation import oracle_report

    cfg = _load(args.config, args.seed)
    base = cfg.base if isinstance(cfg, SweepConfig) else cfg
    report = oracle_report(base, t=min(base.t_max, 10.0))
    width = max(len(k) for k in report["checks"])
    for name, (dev, tol) in report["checks"].items():
        status = "PASS" if dev <= tol else "FAIL"
        print(f"{status}  {name:<{width}}  worst deviation {dev:.3e}  (tol {tol:.0e})")
    return EXIT_OK if report["passed"] else EXIT_NUMERIC


def cmd_fit(args) -> int:
    data = read_series(args.series)
    env = extract_envelope(data, args.field)
    fit = fit_exponential(env, tuple(args.window))
    print(f"exponential: rate={fit.rate:.8g} prefactor={fit.params['prefactor']:.8g} "
          f"log-rms={fit.rms:.3g} points={fit.n_points}")
    if args.two_step:
        N, delta, J = args.two_step
        res = compare_to_two_step(data, int(N), delta, J, tuple(args.two_step_window),
                             plateau_window=tuple(args.plateau) if args.plateau else None)
        b, c, w = two_step_parameters(int(N), delta, J)
        print(f"two-step: b={b:.6g} c={c:.6g} omega={w:.6g} rms={res.rms:.4g}"
              + (f" plateau={res.extra['plateau']:.4g}" if args.plateau else ""))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="spinbath", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("config")
        sp.add_argument("--out", help="output directory")
        sp.add_argument("--seed", type=lambda s: int(s, 0), help="override the master seed")
        sp.add_argument("--workers", type=int, default=1, help="parallel scenario runs")

    common(sub.add_parser("run", help="run one scenario and write its series"))
    common(sub.add_parser("sweep", help="omega/seed sweep with per-seed rate fits"))
    common(sub.add_parser("check-oracle", help="compare the fast path with dense linear algebra"))
    f = sub.add_parser("fit", help="fit a written series")
    f.add_argument("series")
    f.add_argument("--field", default="re_rho23_rectified", choices=["re_rho23_rectified", "abs_rho23"])
    f.add_argument("--window", nargs=2, type=float, default=[0.02, 0.45], metavar=("LOW", "HIGH"))
    f.add_argument("--two-step", nargs=3, type=float, metavar=("N", "DELTA", "J"),
                   help="also compare Re rho_23 with the two-step law")
    f.add_argument("--two-step-window", nargs=2, type=float, default=[0.0, 30.0])
    f.add_argument("--plateau", nargs=2, type=float)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handlers = {"run": cmd_run, "sweep": cmd_sweep, "check-oracle": cmd_check_oracle, "fit": cmd_fit}
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (PropagationError, FitError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OutputError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
