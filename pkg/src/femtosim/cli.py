"""Command-line front end.

Exit codes: 0 success, 1 configuration error, 2 runtime flag (power-control
non-convergence in more than 10% of replicates).
"""
from __future__ import annotations

import argparse
import os
import sys

from .config import ConfigError, NetworkConfig, config_to_text, load_config
from .experiment import (FIGURE_IDS, SweepError, SweepSpec, figure_dataset,
                         run_all_figures, run_replicate, run_sweep, write_csv,
                         write_figure, write_manifest)

FLAG_THRESHOLD = 0.10


def _add_config_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="flat key=value config file or run manifest (.json)")
    parser.add_argument("--defaults", action="store_true",
                        help="start from the built-in default parameters")
    parser.add_argument("--set", dest="overrides", action="append", default=[],
                        metavar="KEY=VALUE", help="override one parameter (repeatable)")
    parser.add_argument("--seed", type=int, help="master seed")
    parser.add_argument("--replicates", type=int, help="Monte Carlo replicates")
    parser.add_argument("--mode", choices=("poisson", "fixed"),
                        help="femtocell count mode")


def _build_config(args) -> NetworkConfig:
    overrides = {}
    for item in args.overrides:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        key, _, value = item.partition("=")
        overrides[key.strip()] = value.strip()
    if args.seed is not None:
        overrides["seed"] = str(args.seed)
    if args.replicates is not None:
        overrides["replicates"] = str(args.replicates)
    if args.mode is not None:
        overrides["femtocell_count_mode"] = args.mode
    use_defaults = args.defaults or args.config is None
    return load_config(args.config, overrides, use_defaults=use_defaults)


def _parse_axis(text: str, cast=float) -> tuple:
    """Axis syntax: comma list '1,5,10' or range 'start:stop:step' (inclusive)."""
    if ":" in text:
        parts = [cast(p) for p in text.split(":")]
        start, stop = parts[0], parts[1]
        step = parts[2] if len(parts) > 2 else 1
        values = []
        v = start
        while v <= stop + 1e-9:
            values.append(cast(v))
            v += step
        return tuple(values)
    return tuple(cast(p) for p in text.split(","))


def cmd_simulate(args) -> int:
    config = _build_config(args)
    record = run_replicate(config, args.strategy, args.replicate)
    print(f"strategy={record.strategy} n_f_mean={record.n_f_mean} "
          f"realized_femtocells={record.realized_femtocells} "
          f"gamma={record.gamma} epsilon={record.epsilon}")
    print(f"kappa_m={config.kappa_m} seed={config.seed} replicate={args.replicate}")
    for name in ("r_m", "r_f", "r_sum", "split_gain", "shared_gain",
                 "mean_femto_sinr_db", "served_femto_count", "served_macro_count",
                 "handover_count", "handover_success_count",
                 "mean_macro_power_mw", "mean_femto_power_mw"):
        print(f"{name} = {getattr(record, name)}")
    if not record.power_control_converged:
        print("warning: power control did not converge", file=sys.stderr)
        return 2
    return 0


def cmd_sweep(args) -> int:
    config = _build_config(args)
    spec = SweepSpec(
        base=config,
        n_f_values=_parse_axis(args.nf),
        gamma_values=_parse_axis(args.gammas, int) if args.gammas else (),
        epsilon_values=_parse_axis(args.epsilons) if args.epsilons else (),
        strategies=tuple(args.strategies.split(",")),
        replicates=config.replicates,
        figure_tag="sweep",
    )
    result = run_sweep(spec, workers=args.workers)
    columns = list(result.rows[0].keys()) if result.rows else []
    os.makedirs(args.out, exist_ok=True)
    csv_path = os.path.join(args.out, "sweep.csv")
    write_csv(csv_path, columns, result.rows)
    write_manifest(os.path.join(args.out, "sweep.manifest.json"),
                   {"config": config.as_dict(), "replicates": spec.replicates,
                    "n_f_values": list(spec.n_f_values),
                    "gamma_values": list(spec.gamma_values),
                    "epsilon_values": list(spec.epsilon_values),
                    "strategies": list(spec.strategies)})
    print(f"wrote {csv_path} ({len(result.rows)} rows, {result.elapsed_s:.1f}s)")
    if result.flagged_fraction > FLAG_THRESHOLD:
        print(f"warning: non-convergence fraction {result.flagged_fraction:.2%} "
              f"exceeds {FLAG_THRESHOLD:.0%}", file=sys.stderr)
        return 2
    return 0


def cmd_figure(args) -> int:
    config = _build_config(args)
    if args.figure_id == "all":
        summary = run_all_figures(config, args.out, workers=args.workers)
        for figure_id, info in summary["figures"].items():
            print(f"{figure_id}: {info['csv']} ({info['elapsed_s']:.1f}s)")
        print(f"total {summary['elapsed_s']:.1f}s")
        return 2 if summary["flagged_fraction"] > FLAG_THRESHOLD else 0
    result = figure_dataset(args.figure_id, config, workers=args.workers)
    csv_path, manifest_path = write_figure(result, args.out)
    print(f"wrote {csv_path} and {manifest_path} ({result.elapsed_s:.1f}s)")
    flagged = max((row.get("flagged_fraction", 0.0) for row in result.rows), default=0.0)
    if flagged > FLAG_THRESHOLD:
        print(f"warning: non-convergence fraction {flagged:.2%}", file=sys.stderr)
        return 2
    return 0


def cmd_validate(args) -> int:
    config = _build_config(args)
    print("configuration OK")
    print(config_to_text(config), end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="femtosim",
        description="Two-tier femtocell/macrocell uplink Monte Carlo simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one replicate and print a metrics summary")
    _add_config_options(p)
    p.add_argument("--strategy", choices=("split", "pc", "sic"), default="sic")
    p.add_argument("--replicate", type=int, default=0)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="run a parameter sweep and write CSV")
    _add_config_options(p)
    p.add_argument("--nf", required=True, help="n_f axis, e.g. 0:40:5 or 1,5,10")
    p.add_argument("--gammas", help="gamma axis for the split strategy")
    p.add_argument("--epsilons", help="epsilon axis for the sic strategy")
    p.add_argument("--strategies", default="sic", help="comma list of split,pc,sic")
    p.add_argument("--out", default="out")
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("figure", help="reproduce one figure dataset (fig2..fig8 or all)")
    _add_config_options(p)
    p.add_argument("figure_id", choices=FIGURE_IDS + ("all",))
    p.add_argument("--out", default="out")
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("validate-config", help="parse and validate a configuration")
    _add_config_options(p)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, SweepError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
