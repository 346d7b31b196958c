"""Command line entry point.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 acceptance check failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .config import ConfigError, baths_from_config, chain_from_config, load_config, quad_from_config
from .experiments import (
    NAMES,
    ExperimentSpec,
    config_hash,
    run_experiment,
    summarize,
    write_csv,
)
from .greens import SingularMatrixError, green_columns
from .md import IntegrationBlowup
from .model import ValidationError, validate
from .transport import QuadratureError

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_CHECK = 0, 2, 3, 4

log = logging.getLogger("heatdiode")


def _common(p, config_required=False):
    p.add_argument("--config", type=Path, required=config_required, help="TOML configuration file")
    p.add_argument("--out", type=Path, default=Path("results"), help="output directory")
    p.add_argument("--regime", choices=("classical", "quantum"), help="override [run] regime")
    p.add_argument("--seed", type=int, help="base seed for MD noise streams")
    p.add_argument("--workers", type=int, default=1, help="parallel processes for sweeps / MD realizations")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="heatdiode", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a named experiment")
    p.add_argument("name", choices=NAMES)
    _common(p)

    p = sub.add_parser("custom", help="run the model described in --config")
    _common(p, config_required=True)

    p = sub.add_parser("check", help="run the acceptance checks")
    _common(p)
    p.add_argument("--quick", action="store_true", help="reduced grids and MD lengths (smoke test only)")
    p.add_argument("--only", type=lambda s: [int(x) for x in s.split(",")], help="comma separated criteria")

    p = sub.add_parser("dump-green", help="write G_lm(omega) for the chain in --config")
    _common(p, config_required=True)
    p.add_argument("--omega", type=float, nargs="+", help="frequencies (default: 101 points up to the cutoff)")
    return parser


def _config(args) -> dict:
    return load_config(args.config) if args.config else {}


def cmd_run(args, name: str) -> int:
    cfg = _config(args)
    regime = args.regime or cfg.get("run", {}).get("regime")
    spec = ExperimentSpec(name, cfg.get("sweep", {}), args.out, regime, args.seed, args.workers, cfg)
    result = run_experiment(spec)
    summarize([result], args.out)
    for path in result.files:
        log.info("wrote %s", path)
    print((args.out / "summary.txt").read_text(), end="")
    return EXIT_OK


def cmd_check(args) -> int:
    from .checks import run_checks

    results = run_checks(args.only, quick=args.quick, workers=args.workers,
                         seed=12345 if args.seed is None else args.seed)
    lines = [r.line() for r in results]
    args.out.mkdir(parents=True, exist_ok=True)
    (args.out / "summary.txt").write_text("\n".join(lines) + "\n")
    payload = {
        "quick": args.quick,
        "checks": [{"criterion": r.number, "name": r.name, "passed": bool(r.passed), "detail": r.detail} for r in results],
        "all_passed": bool(all(r.passed for r in results)),
    }
    payload["config_hash"] = config_hash({"check": payload["checks"], "quick": args.quick, "seed": args.seed})
    with open(args.out / "summary.json", "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    print("\n".join(lines))
    return EXIT_OK if payload["all_passed"] else EXIT_CHECK


def cmd_dump_green(args) -> int:
    cfg = _config(args)
    chain, baths = chain_from_config(cfg), baths_from_config(cfg)
    validate(chain, baths)
    if args.omega:
        omega = np.asarray(args.omega, dtype=float)
    else:
        omega = np.linspace(0.0, quad_from_config(cfg).resolve(chain).omega_max, 101)
    n = chain.n
    g = green_columns(chain, baths.frictions, omega, range(n))
    chash = config_hash({"dump-green": cfg, "omega": omega.tolist()})
    rows = [
        (w, l + 1, m + 1, g[m, l, i].real, g[m, l, i].imag, chash)
        for i, w in enumerate(omega) for l in range(n) for m in range(n)
    ]
    path = write_csv(args.out / "green.csv", ["omega", "l", "m", "re", "im", "config_hash"], rows)
    (args.out / "summary.txt").write_text(f"dump-green {n} beads, {omega.size} frequencies -> {path} [{chash}]\n")
    print(path)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        if args.command == "run":
            return cmd_run(args, args.name)
        if args.command == "custom":
            return cmd_run(args, "custom")
        if args.command == "check":
            return cmd_check(args)
        return cmd_dump_green(args)
    except (QuadratureError, SingularMatrixError, IntegrationBlowup, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, ValidationError, ValueError, TypeError) as exc:
        # builders raise plain ValueError/TypeError for malformed values
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
