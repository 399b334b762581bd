"""Command-line interface: single-trial estimates, Monte Carlo sweeps, presets, selftest."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import selftest as selftest_module
from .config import config_to_dict, load_config
from .errors import ConfigError
from .harness import METHODS, ExperimentConfig, noise_stream, run_trial, source_stream, sweep, write_csv
from .presets import paper_fig2_config, paper_fig3_config


def _parse_methods(text: str) -> tuple[str, ...]:
    methods = tuple(m.strip() for m in text.split(",") if m.strip())
    unknown = set(methods) - set(METHODS)
    if not methods or unknown:
        raise argparse.ArgumentTypeError(f"methods must be a comma-separated subset of {METHODS}")
    return methods


def _apply_overrides(config: ExperimentConfig, args) -> ExperimentConfig:
    updates = {}
    if getattr(args, "seed", None) is not None:
        updates["rng_seed"] = args.seed
    if getattr(args, "method", None) is not None:
        updates["methods"] = args.method
    if getattr(args, "model", None) is not None:
        updates["synthesis_model"] = args.model
    if getattr(args, "trials", None) is not None:
        updates["trials"] = args.trials
    return replace(config, **updates) if updates else config


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sadce",
        description="Near-field XL-MIMO channel estimation: single trials, Monte Carlo sweeps, presets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_est = sub.add_parser("estimate", help="run one synthetic trial and print the estimate as JSON")
    p_est.add_argument("--config", type=Path, default=None, help="JSON experiment config")
    p_est.add_argument("--seed", type=int, default=None)
    p_est.add_argument("--snr-db", type=float, default=None, help="SNR for the trial (default: first grid point)")
    p_est.add_argument("--method", type=_parse_methods, default=None)
    p_est.add_argument("--model", choices=("exact", "fresnel"), default=None)
    p_est.add_argument("--out", type=Path, default=None, help="also write the JSON to a file")

    p_sweep = sub.add_parser("sweep", help="Monte Carlo sweep, emits CSV (and optional figures)")
    p_sweep.add_argument("--config", type=Path, required=True)
    p_sweep.add_argument("--out", type=Path, required=True, help="output CSV path")
    p_sweep.add_argument("--seed", type=int, default=None)
    p_sweep.add_argument("--threads", type=int, default=1)
    p_sweep.add_argument("--method", type=_parse_methods, default=None)
    p_sweep.add_argument("--model", choices=("exact", "fresnel"), default=None)
    p_sweep.add_argument("--trials", type=int, default=None)
    p_sweep.add_argument("--figures", action="store_true", help="render a figure next to the CSV")
    p_sweep.add_argument("--timing", action="store_true", help="write measured (non-reproducible) runtimes")

    for name, help_text in (
        ("paper-fig2", "preset: accuracy vs SNR on the 41x41 array"),
        ("paper-fig3", "preset: channel NMSE vs pilot length at 10 dB"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--out", type=Path, required=True, help="output CSV path")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--trials", type=int, default=None)
        p.add_argument("--method", type=_parse_methods, default=None)
        p.add_argument("--model", choices=("exact", "fresnel"), default=None)
        p.add_argument("--no-figures", action="store_true", help="skip figure rendering")
        p.add_argument("--timing", action="store_true")
        p.add_argument("--dump-config", type=Path, default=None, help="also write the preset config as JSON")

    p_self = sub.add_parser("selftest", help="run the built-in oracle suites")
    p_self.add_argument("--seed", type=int, default=12345)
    return parser


def _complex_pair(z: complex) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def _cmd_estimate(args) -> int:
    config = load_config(args.config) if args.config else paper_fig2_config(trials=1)
    config = _apply_overrides(config, args)
    snr_db = args.snr_db if args.snr_db is not None else config.snr_grid_db[0]
    record = run_trial(
        config,
        snr_db,
        config.pilot_length,
        source_stream(config.rng_seed, 0),
        noise_stream(config.rng_seed, 0, 0),
    )
    payload = {
        "snr_db": record.snr_db,
        "pilot_len": record.pilot_len,
        "truth": {
            "u": record.truth_u,
            "v": record.truth_v,
            "r_m": record.truth_r,
            "gain": _complex_pair(record.truth_gain),
        },
        "estimates": {},
    }
    for method, res in record.results.items():
        payload["estimates"][method] = {
            "u_hat": res.u_hat,
            "v_hat": res.v_hat,
            "r_hat_m": res.r_hat,
            "nmse_db": 10.0 * np.log10(res.nmse) if np.isfinite(res.nmse) and res.nmse > 0 else None,
            "runtime_ms": res.runtime_ms,
            "failed": res.failed,
            "detail": res.detail,
            "diagnostics": res.diagnostics,
        }
    text = json.dumps(payload, indent=2, allow_nan=True)
    print(text)
    if args.out:
        args.out.write_text(text + "\n")
    return 0


def _run_sweep(config: ExperimentConfig, args, figures: bool) -> int:
    result = sweep(config, threads=args.threads)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    write_csv(result, args.out, timing=args.timing)
    print(f"wrote {args.out} ({len(result.rows)} rows)")
    if figures:
        from .figures import render_sweep_figure

        fig_path = args.out.with_suffix(".png")
        render_sweep_figure(result, fig_path)
        print(f"wrote {fig_path}")
    return 0


def _cmd_sweep(args) -> int:
    config = _apply_overrides(load_config(args.config), args)
    return _run_sweep(config, args, figures=args.figures)


def _cmd_preset(args, builder) -> int:
    config = _apply_overrides(builder(), args)
    if args.dump_config:
        args.dump_config.parent.mkdir(parents=True, exist_ok=True)
        args.dump_config.write_text(json.dumps(config_to_dict(config), indent=2) + "\n")
        print(f"wrote {args.dump_config}")
    return _run_sweep(config, args, figures=not args.no_figures)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "estimate":
            return _cmd_estimate(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        if args.command == "paper-fig2":
            return _cmd_preset(args, paper_fig2_config)
        if args.command == "paper-fig3":
            return _cmd_preset(args, paper_fig3_config)
        if args.command == "selftest":
            return selftest_module.run(seed=args.seed)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
