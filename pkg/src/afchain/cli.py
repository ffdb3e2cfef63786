"""Command-line entry point.

Subcommands: exponents, simulate, bounds, design-gain, regime,
reproduce <figN>, fit. Network parameters come from a JSON config file
(keys mirror NetworkConfig field names) and/or flags; flags win.

Exit codes: 0 ok, 2 configuration error, 3 numerical precision escalation
required (rerun with --precision big:<digits>).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .errors import ConfigError, PrecisionEscalationRequired
from .network import (
    ConstantMu,
    ConstantPower,
    GeometricPower,
    LogNormalMu,
    stable_log_capacity,
)
from .precision import PrecisionConfig
from .runner import (
    ExperimentSpec,
    config_from_dict,
    fit_slope,
    run,
    run_from_manifest,
    write_fits,
)
from .reproduce import FIGURES, reproduce
from .scaling import (
    design_power_growth,
    exponents_closed_form,
    lyap_upper_bounds,
    power_growth_bounds,
    scaling_regime,
)


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="JSON config file")
    p.add_argument("--d", type=int, help="antennas per node")
    p.add_argument("--hops", type=int, help="number of hops n")
    p.add_argument("--gain", choices=["fixed", "variable"])
    p.add_argument("--mu", type=float, help="constant fading variance")
    p.add_argument("--mu-lognormal", metavar="A,B", help="log-normal fading: a,b")
    p.add_argument("--power-const", type=float, metavar="P")
    p.add_argument("--power-geom", metavar="P0,G", help="geometric power: p0,g")
    p.add_argument("--n0", type=float, help="noise total variance")
    p.add_argument("--seed", type=int)
    p.add_argument("--precision", metavar="double|big:<digits>")
    p.add_argument("--replicas", type=int, default=None)


def _parse_precision(text: str) -> PrecisionConfig:
    if text == "double":
        return PrecisionConfig()
    if text.startswith("big"):
        digits = 100
        if ":" in text:
            digits = int(text.split(":", 1)[1])
        return PrecisionConfig("big", digits)
    raise ConfigError(f"bad precision spec {text!r}", field="precision")


def _pair(text: str, flag: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise ConfigError(f"{flag} expects two comma-separated values", field=flag)
    return float(parts[0]), float(parts[1])


def _build_config(args):
    data = {}
    if args.config:
        with open(args.config) as fh:
            data = json.load(fh)
    if args.d is not None:
        data["d"] = args.d
    if args.hops is not None:
        data["n"] = args.hops
    if args.gain is not None:
        data["gain"] = args.gain
    if args.mu is not None:
        data["mu_schedule"] = {"kind": "constant", "value": args.mu}
    if args.mu_lognormal is not None:
        a, b = _pair(args.mu_lognormal, "--mu-lognormal")
        data["mu_schedule"] = {"kind": "lognormal", "a": a, "b": b}
    if args.power_const is not None:
        data["power_schedule"] = {"kind": "constant", "value": args.power_const}
    if args.power_geom is not None:
        p0, g = _pair(args.power_geom, "--power-geom")
        data["power_schedule"] = {"kind": "geometric", "p0": p0, "growth": g}
    if args.n0 is not None:
        data["n0"] = args.n0
    if args.seed is not None:
        data["seed"] = args.seed
    if args.precision is not None:
        prec = _parse_precision(args.precision)
        data["precision"] = {"backend": prec.backend, "digits": prec.digits}
    if "d" not in data or "n" not in data:
        raise ConfigError("need --d and --hops (or a config file)", field="config")
    return config_from_dict(data)


def _cmd_exponents(args) -> int:
    cfg = _build_config(args)
    spec = ExperimentSpec(cfg, replicas=1, emit=("exponents",))
    result = run(spec, args.out)
    rep = result.report
    for i in range(cfg.d):
        print(
            f"i={i + 1}  lambda_H={rep.lambda_h[i]:+.6f}  "
            f"lambda_Q={rep.lambda_q[i]:+.6f}  lambda_gamma={rep.lambda_gamma[i]:+.6f}"
        )
    print(f"L = {rep.l_value:+.6f}  ({rep.method}) -> {result.out_dir}")
    return 0


def _cmd_simulate(args) -> int:
    if args.from_manifest:
        result = run_from_manifest(args.from_manifest, args.out)
        print(f"re-ran manifest -> {result.out_dir}")
        return 0
    cfg = _build_config(args)
    emit = tuple(args.emit.split(",")) if args.emit else ("trajectory",)
    spec = ExperimentSpec(cfg, replicas=args.replicas or 1, emit=emit)
    result = run(spec, args.out)
    print(f"wrote {', '.join(result.files)} -> {result.out_dir}")
    return 0


def _cmd_bounds(args) -> int:
    cfg = _build_config(args)
    spec = ExperimentSpec(cfg, replicas=1, emit=("bounds",))
    result = run(spec, args.out)
    ubs = lyap_upper_bounds(cfg)
    fixed_b, var_b = power_growth_bounds(cfg)
    for i, ub in enumerate(ubs):
        print(f"i={i + 1}  lambda_upper_bound={ub:+.6f}")
    print(f"power growth bounds: fixed={fixed_b:.6f} variable={var_b:.6f}")
    print(f"-> {result.out_dir}")
    return 0


def _cmd_design_gain(args) -> int:
    g = design_power_growth(
        args.d, args.mu, args.n0, args.gain, args.index, horizon=args.horizon
    )
    print(f"g = {g!r}")
    return 0


def _cmd_regime(args) -> int:
    verdict = scaling_regime(args.growth, args.i, args.j)
    print(verdict)
    return 0


def _cmd_reproduce(args) -> int:
    out = reproduce(args.figure, args.out, fast=args.fast)
    print(f"{args.figure} -> {out}")
    return 0


def _cmd_fit(args) -> int:
    rows = _read_csv(args.csv)
    fits = _fit_trajectory_rows(rows, burn_in=args.burn_in)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_fits(out_dir / "fits.csv", fits)
    for f in fits:
        print(
            f"{f.quantity}[{f.eig_index}]: slope={f.slope:+.6f} "
            f"r2={f.r2:.4f}"
        )
    print(f"-> {out_dir / 'fits.csv'}")
    return 0


def _read_csv(path):
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        rows = []
        for line in fh:
            parts = line.strip().split(",")
            rows.append(dict(zip(header, parts)))
    return rows


def _fit_trajectory_rows(rows, burn_in=0.2):
    # replica-mean log capacity per eigenchannel from a trajectory.csv
    by_key = {}
    for row in rows:
        key = (int(row["hop"]), int(row["eig_index"]))
        by_key.setdefault(key, []).append(float(row["log_snr"]))
    hops = sorted({k[0] for k in by_key})
    indices = sorted({k[1] for k in by_key})
    fits = []
    for i in indices:
        series = [
            float(np.mean(stable_log_capacity(np.array(by_key[(h, i)]))))
            for h in hops
        ]
        fits.append(
            fit_slope(
                hops, series, burn_in, quantity="log_capacity", eig_index=i
            )
        )
    return fits


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="afchain",
        description="Amplify-and-forward MIMO relay chains: spectra, "
        "trajectories, bounds, and figure reproduction.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exponents", help="closed-form spectrum of a chain")
    _add_config_flags(p)
    p.add_argument("--out", type=Path, default=Path("out/exponents"))
    p.set_defaults(func=_cmd_exponents)

    p = sub.add_parser("simulate", help="seeded trajectory replicas")
    _add_config_flags(p)
    p.add_argument("--emit", help="comma-separated subset of "
                   "trajectory,exponents,bounds,nu,slopes")
    p.add_argument("--from-manifest", type=Path, help="re-run a prior manifest")
    p.add_argument("--out", type=Path, default=Path("out/simulate"))
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("bounds", help="exponent and power-growth bounds")
    _add_config_flags(p)
    p.add_argument("--out", type=Path, default=Path("out/bounds"))
    p.set_defaults(func=_cmd_bounds)

    p = sub.add_parser("design-gain", help="geometric power growth for a flat exponent")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--n0", type=float, default=1.0)
    p.add_argument("--gain", choices=["fixed", "variable"], default="fixed")
    p.add_argument("--index", type=int, default=1)
    p.add_argument("--horizon", type=int, default=1000)
    p.set_defaults(func=_cmd_design_gain)

    p = sub.add_parser("regime", help="antenna-scaling regime of a capacity ratio")
    p.add_argument("--growth", required=True,
                   choices=["constant", "sublinear", "linear", "superlinear"])
    p.add_argument("--i", type=int, required=True)
    p.add_argument("--j", type=int, required=True)
    p.set_defaults(func=_cmd_regime)

    p = sub.add_parser("reproduce", help="run a figure recipe")
    p.add_argument("figure", choices=list(FIGURES))
    p.add_argument("--out", type=Path, default=None)
    p.add_argument("--fast", action="store_true",
                   help="double precision, fewer replicas")
    p.set_defaults(func=_cmd_reproduce)

    p = sub.add_parser("fit", help="slope fits from a trajectory.csv")
    p.add_argument("--csv", type=Path, required=True)
    p.add_argument("--burn-in", type=float, default=0.2)
    p.add_argument("--out", type=Path, default=Path("out/fit"))
    p.set_defaults(func=_cmd_fit)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "command", None) == "reproduce" and args.out is None:
        args.out = Path("out") / args.figure
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except PrecisionEscalationRequired as exc:
        print(f"precision escalation required: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
