"""Command line front end.

Subcommands map one-to-one onto the experiment campaigns plus the
self-check battery. Every campaign writes a delimited row file, a JSON
metadata sidecar, and (unless suppressed) a rendered figure.
"""

import argparse
import csv
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .config import SystemConfig, load_config
from .errors import SimulationError
from .experiments import (
    DEFAULT_M_VALUES,
    DEFAULT_XPD_VALUES,
    run_cdf,
    run_m_sweep,
    run_xpd_sweep,
    write_metadata,
    write_rows_csv,
)
from .validation import run_validation, validation_rows


def _parse_m_values(text):
    try:
        values = tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad port list: {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty port list")
    return values


def _parse_xpd_values(text):
    try:
        values = tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad XPD list: {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("empty XPD list")
    return values


def build_parser():
    parser = argparse.ArgumentParser(
        prog="dpmimo",
        description="Downlink SE campaigns for dual-polarized massive MIMO.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", type=Path, default=None,
                       help="key=value config file")
        p.add_argument("--seed", type=int, default=None,
                       help="override the base seed")
        p.add_argument("--out", type=Path, default=None,
                       help="output CSV path (default out/<command>.csv)")
        p.add_argument("--trials", type=int, default=None,
                       help="Monte Carlo trials per drop")
        p.add_argument("--drops", type=int, default=None,
                       help="number of UE drops")

    for name, summary in (
        ("m-sweep", "average sum SE versus the number of BS ports"),
        ("cdf", "per-UE SE samples at a fixed port count"),
        ("xpd-sweep", "average sum SE versus ports for several XPD values"),
    ):
        p = sub.add_parser(name, help=summary)
        add_common(p)
        p.add_argument("--no-plot", action="store_true",
                       help="skip the figure, write only CSV and metadata")
        if name in ("m-sweep", "xpd-sweep"):
            p.add_argument("--m-values", type=_parse_m_values, default=None,
                           help="comma separated port counts")
        if name == "xpd-sweep":
            p.add_argument("--xpd-values", type=_parse_xpd_values,
                           default=None,
                           help="comma separated XPD values in dB (inf ok)")

    p = sub.add_parser("validate", help="run the model self-check battery")
    add_common(p)
    return parser


def _load_base_config(args):
    cfg = load_config(args.config) if args.config else SystemConfig()
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.trials is not None:
        overrides["mc_trials"] = args.trials
    if args.drops is not None:
        overrides["drops"] = args.drops
    if overrides:
        cfg = replace(cfg, **overrides)
    return cfg


def _resolve_out(args, default_name):
    out = args.out if args.out is not None else Path("out") / default_name
    out.parent.mkdir(parents=True, exist_ok=True)
    return out


def _run_experiment(args, name):
    cfg = _load_base_config(args)
    extra = {}
    if name == "m-sweep":
        m_values = args.m_values or DEFAULT_M_VALUES
        rows = run_m_sweep(cfg, m_values)
        extra["m_values"] = list(m_values)
    elif name == "cdf":
        rows = run_cdf(cfg)
    else:
        m_values = args.m_values or DEFAULT_M_VALUES
        xpd_values = args.xpd_values or DEFAULT_XPD_VALUES
        rows = run_xpd_sweep(cfg, m_values, xpd_values)
        extra["m_values"] = list(m_values)
        extra["xpd_values"] = [
            "inf" if np.isinf(v) else v for v in xpd_values
        ]

    out = _resolve_out(args, f"{name.replace('-', '_')}.csv")
    write_rows_csv(rows, out)
    write_metadata(out.with_suffix(".meta.json"), cfg, name, extra=extra)
    if not args.no_plot:
        from . import plots

        fig_path = out.with_suffix(".png")
        if name == "m-sweep":
            plots.plot_m_sweep(rows, fig_path)
        elif name == "cdf":
            plots.plot_cdf(rows, fig_path)
        else:
            plots.plot_xpd_sweep(rows, fig_path)
        print(f"wrote {out}, {out.with_suffix('.meta.json')}, {fig_path}")
    else:
        print(f"wrote {out}, {out.with_suffix('.meta.json')}")
    return 0


def _run_validate(args):
    cfg = _load_base_config(args)
    report = run_validation(cfg)
    print(report.to_text())
    if args.out is not None:
        out = args.out
        out.parent.mkdir(parents=True, exist_ok=True)
        rows = validation_rows(report)
        with open(out, "w", newline="") as fh:
            writer = csv.DictWriter(
                fh, fieldnames=list(rows[0].keys()), lineterminator="\n"
            )
            writer.writeheader()
            writer.writerows(rows)
        print(f"wrote {out}")
    return 0 if report.all_passed else 2


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "validate":
            return _run_validate(args)
        return _run_experiment(args, args.command)
    except SimulationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
