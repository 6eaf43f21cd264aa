"""Command line entry point.

Subcommands mirror the experiments (fray, outage, min-outage, secrecy,
runtime) plus a single-instance `solve` for debugging.  Every flag can also
be given in a flat key=value config file; command line flags win.  The
default worker count comes from the SPZF_THREADS environment variable.
"""
from __future__ import annotations

import argparse
import os
import sys

from .harness import ExperimentConfig, run_experiment, solve_once, write_csv

THREADS_ENV = "SPZF_THREADS"


def _int_list(text: str) -> list[int]:
    return [int(v) for v in str(text).split(",") if v != ""]


def _float_list(text: str) -> list[float]:
    return [float(v) for v in str(text).split(",") if v != ""]


def _algo_list(text: str) -> list[str]:
    return [a.strip() for a in str(text).split(",") if a.strip()]


def _m_range(text: str) -> list[int]:
    lo, hi = str(text).split(":")
    return list(range(int(lo), int(hi) + 1))


def _read_config(path: str) -> dict:
    """Flat key = value lines; '#' starts a comment."""
    values = {}
    with open(path) as f:
        for lineno, line in enumerate(f, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, val = line.split("=", 1)
            values[key.strip().replace("-", "_")] = val.strip()
    return values


def _add_common(sub):
    sub.add_argument("--config", help="flat key=value config file")
    sub.add_argument("--trials", type=int, default=None)
    sub.add_argument("--seed", type=int, default=None)
    sub.add_argument("--out", default=None, help="output CSV path")
    sub.add_argument("--threads", type=int, default=None)
    sub.add_argument("--model", choices=["rayleigh", "geometric"], default=None)
    sub.add_argument("--paths", type=int, default=None, help="multipath count (geometric)")
    sub.add_argument("--sigma2", type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spzf",
        description="Phase-only zero-forcing experiments for artificial-noise beamforming",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fray", help="single-channel infeasibility probability vs length")
    _add_common(p)
    p.add_argument("--m", type=str, default=None, help="comma list of channel lengths")
    p.add_argument("--m-range", type=str, default=None, help="inclusive range lo:hi")

    p = sub.add_parser("outage", help="two-user outage vs set count")
    _add_common(p)
    p.add_argument("--n", type=str, default=None, help="antenna counts, comma list")
    p.add_argument("--m", type=str, default=None)
    p.add_argument("--m-range", type=str, default=None)
    p.add_argument("--algo", type=str, default=None, help="comma list of algorithms")

    p = sub.add_parser("min-outage", help="minimum outage over set counts vs antennas")
    _add_common(p)
    p.add_argument("--n", type=str, default=None)
    p.add_argument("--algo", type=str, default=None)

    p = sub.add_parser("secrecy", help="mean secrecy rate vs SNR")
    _add_common(p)
    p.add_argument("--n", type=str, default=None)
    p.add_argument("--m", type=str, default=None, help="fixed set count (default: searched)")
    p.add_argument("--ne", type=str, default=None, help="eavesdropper antennas")
    p.add_argument("--snr-db", type=str, default=None, help="comma list of SNR values in dB")
    p.add_argument("--algo", type=str, default=None)

    p = sub.add_parser("runtime", help="mean partition runtime per realization")
    _add_common(p)
    p.add_argument("--n", type=str, default=None)
    p.add_argument("--m", type=str, default=None)
    p.add_argument("--algo", type=str, default=None)

    p = sub.add_parser("solve", help="solve one two-user instance from channel files")
    p.add_argument("--h1", required=True, help="first channel file (re im per line)")
    p.add_argument("--h2", required=True, help="second channel file")
    p.add_argument("--algo", default="iterative")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    return parser


def _setting(args, cfg_file: dict, key: str, default=None):
    cli_val = getattr(args, key, None)
    if cli_val is not None:
        return cli_val
    if key in cfg_file:
        return cfg_file[key]
    return default


def _experiment_config(args) -> ExperimentConfig:
    cfg_file = _read_config(args.config) if getattr(args, "config", None) else {}
    get = lambda key, default=None: _setting(args, cfg_file, key, default)

    env_threads = os.environ.get(THREADS_ENV)
    threads = get("threads", int(env_threads) if env_threads else 1)

    m = get("m")
    m_range = get("m_range")
    if m is not None and m_range is not None:
        raise ValueError("pass either m or m-range, not both")
    m_values = _int_list(m) if m is not None else (_m_range(m_range) if m_range else None)

    experiment = {"fray": "fray", "outage": "outage", "min_outage": "min-outage",
                  "min-outage": "min-outage", "secrecy": "secrecy",
                  "runtime": "runtime"}[args.command]
    return ExperimentConfig(
        experiment=experiment,
        model=get("model", "rayleigh"),
        paths=int(get("paths", 10)),
        sigma2=float(get("sigma2", 1.0)),
        n=_int_list(get("n", "20")),
        m=m_values,
        algos=_algo_list(get("algo", "random-fc")),
        trials=int(get("trials", 10_000)),
        seed=int(get("seed", 0)),
        snr_db=_float_list(get("snr_db", "0,5,10,15,20,25,30")),
        n_e=int(get("ne", 1)),
        out=str(get("out", "results.csv")),
        threads=int(threads),
    )


def _print_solution(report: dict):
    print(f"n = {report['n']}, m = {report['m']}, algo = {report['algo']}")
    print(f"partition sets: {report['partition']}")
    print(f"stage-1 pseudo-loss: {report['pseudo_loss']:.6g}")
    print(f"outcome: {report['outcome']}")
    if report["outcome"] != "success":
        print(f"failing stage: {report['failing_stage']}")
        return
    for k, phases in enumerate(report["stage_phases"], start=1):
        print(f"stage {k} phases (rad): " + " ".join(f"{p:.9f}" for p in phases))
    print("w (re im):")
    for wi in report["w"]:
        print(f"  {wi.real:+.12f} {wi.imag:+.12f}")
    res = report["residuals"]
    print("relative residuals: " + " ".join(f"{r:.3e}" for r in res))


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "solve":
            report = solve_once(args.h1, args.h2, args.algo, args.m, args.seed)
            _print_solution(report)
            return 0
        cfg = _experiment_config(args)
        rows = run_experiment(cfg)
        write_csv(rows, cfg.out)
        print(f"{cfg.experiment}: wrote {len(rows)} rows to {cfg.out} "
              f"(trials={cfg.trials}, seed={cfg.seed}, threads={cfg.threads})")
        return 0
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
