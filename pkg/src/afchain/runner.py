"""Experiment runner: seeded replica fan-out, CSV emission, JSON manifests,
slope fitting, and the figure reproduction recipes.

Every run writes machine-readable CSVs plus a manifest that re-executes the
run exactly. Replica r uses seed (base seed + r), so a single run with
`replicas=R` equals R single runs with consecutive seeds.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field, replace
from importlib import metadata as _metadata
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .network import (
    GAIN_FIXED,
    GAIN_VARIABLE,
    ConstantMu,
    ConstantPower,
    GeometricPower,
    InformationProcess,
    LogNormalMu,
    MuList,
    NetworkConfig,
    PowerList,
    TrajectoryRecord,
    simulate_trajectory,
    stable_log_capacity,
)
from .precision import PrecisionConfig
from .rds import estimate_spectrum
from .scaling import (
    ExponentReport,
    build_difference_report,
    exponents_closed_form,
    lyap_upper_bounds,
    phi_bar_exact,
    power_growth_bounds,
)

try:
    PACKAGE_VERSION = _metadata.version("afchain")
except _metadata.PackageNotFoundError:  # not installed
    PACKAGE_VERSION = "0.0.0+local"

TRAJECTORY_HEADER = "replica,hop,eig_index,log_snr,capacity_nats,log_power_X,log_power_I"
EXPONENTS_HEADER = "index,lambda_H,lambda_Q,lambda_gamma,method,stderr"
FITS_HEADER = "quantity,eig_index,slope,predicted,rel_err,r2"
NU_HEADER = "replica,hop,eig_index,log_nu"
BOUNDS_HEADER = "index,lambda_upper_bound,power_growth_fixed,power_growth_variable"
CONVERGENCE_HEADER = "replica,hop,eig_index,norm_log_capacity,lambda_gamma"
SWEEP_HEADER = "b,power_ratio,eig_index,lambda_est,stderr,bound,gap"

EMIT_KINDS = ("trajectory", "exponents", "bounds", "nu", "slopes")


# ---------------------------------------------------------------------------
# config (de)serialization


def config_to_dict(cfg: NetworkConfig) -> dict:
    mu = cfg.mu_schedule
    if isinstance(mu, ConstantMu):
        mu_d = {"kind": "constant", "value": mu.value}
    elif isinstance(mu, MuList):
        mu_d = {"kind": "list", "values": list(mu.values)}
    else:
        mu_d = {"kind": "lognormal", "a": mu.a, "b": mu.b}
    power = cfg.power_schedule
    if isinstance(power, ConstantPower):
        power_d = {"kind": "constant", "value": power.value}
    elif isinstance(power, GeometricPower):
        power_d = {"kind": "geometric", "p0": power.p0, "growth": power.growth}
    else:
        power_d = {"kind": "list", "values": list(power.values)}
    return {
        "d": cfg.d,
        "n": cfg.n,
        "gain": cfg.gain,
        "mu_schedule": mu_d,
        "power_schedule": power_d,
        "n0": cfg.n0,
        "seed": cfg.seed,
        "precision": {"backend": cfg.precision.backend, "digits": cfg.precision.digits},
        "source_symbols": cfg.source_symbols,
    }


def _mu_from_dict(d: dict) -> object:
    kind = d.get("kind")
    if kind == "constant":
        return ConstantMu(float(d["value"]))
    if kind == "list":
        return MuList(tuple(float(v) for v in d["values"]))
    if kind == "lognormal":
        return LogNormalMu(float(d["a"]), float(d["b"]))
    raise ConfigError(f"unknown mu schedule kind {kind!r}", field="mu_schedule.kind")


def _power_from_dict(d: dict) -> object:
    kind = d.get("kind")
    if kind == "constant":
        return ConstantPower(float(d["value"]))
    if kind == "geometric":
        return GeometricPower(float(d["p0"]), float(d["growth"]))
    if kind == "list":
        return PowerList(tuple(float(v) for v in d["values"]))
    raise ConfigError(
        f"unknown power schedule kind {kind!r}", field="power_schedule.kind"
    )


def config_from_dict(data: dict) -> NetworkConfig:
    known = {
        "d", "n", "gain", "mu_schedule", "power_schedule", "n0", "seed",
        "precision", "source_symbols",
    }
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config keys {sorted(unknown)}", field="config")
    try:
        prec_d = data.get("precision", {"backend": "double"})
        precision = PrecisionConfig(
            backend=prec_d.get("backend", "double"),
            digits=int(prec_d.get("digits", 100)),
        )
        return NetworkConfig(
            d=int(data["d"]),
            n=int(data["n"]),
            gain=data.get("gain", GAIN_FIXED),
            mu_schedule=_mu_from_dict(data.get("mu_schedule", {"kind": "constant", "value": 1.0})),
            power_schedule=_power_from_dict(
                data.get("power_schedule", {"kind": "constant", "value": 1.0})
            ),
            n0=float(data.get("n0", 1.0)),
            seed=int(data.get("seed", 0)),
            precision=precision,
            source_symbols=data.get("source_symbols", "gaussian"),
        )
    except KeyError as exc:
        raise ConfigError(f"missing config key {exc.args[0]!r}", field=exc.args[0])


# ---------------------------------------------------------------------------
# slope fitting


@dataclass(frozen=True)
class SlopeFit:
    """OLS line through (n, log value) pairs after a burn-in prefix."""

    quantity: str
    eig_index: int
    slope: float
    intercept: float
    r2: float
    predicted: float
    rel_err: float


def fit_slope(
    hops,
    values,
    burn_in: float = 0.2,
    *,
    quantity: str = "series",
    eig_index: int = 0,
    predicted: float = math.nan,
) -> SlopeFit:
    """Least-squares slope of `values` against `hops`, discarding the first
    `burn_in` fraction. Needs at least 10 post-burn-in points."""
    hops = np.asarray(hops, dtype=float)
    values = np.asarray(values, dtype=float)
    if hops.shape != values.shape:
        raise ValueError("hops and values must have matching shapes")
    if not 0.0 <= burn_in < 1.0:
        raise ValueError(f"burn_in must be in [0, 1), got {burn_in}")
    start = int(math.floor(burn_in * len(hops)))
    x = hops[start:]
    y = values[start:]
    if len(x) < 10:
        raise ValueError(f"need >= 10 post-burn-in points, got {len(x)}")
    xm = x - x.mean()
    ym = y - y.mean()
    ssx = float(xm @ xm)
    slope = float(xm @ ym) / ssx
    intercept = float(y.mean() - slope * x.mean())
    ss_res = float(np.sum((y - (intercept + slope * x)) ** 2))
    ss_tot = float(ym @ ym)
    r2 = 1.0 if ss_tot == 0.0 and ss_res <= 1e-300 else max(0.0, 1.0 - ss_res / ss_tot)
    if math.isnan(predicted):
        rel = math.nan
    elif predicted == 0.0:
        rel = abs(slope)
    else:
        rel = abs(slope - predicted) / abs(predicted)
    return SlopeFit(quantity, eig_index, slope, intercept, r2, predicted, rel)


# ---------------------------------------------------------------------------
# runs


@dataclass(frozen=True)
class ExperimentSpec:
    """A reproducible experiment: one config, fanned out over replicas."""

    config: NetworkConfig
    replicas: int = 1
    emit: tuple = ("trajectory",)

    def __post_init__(self):
        if self.replicas < 1:
            raise ConfigError("replicas must be >= 1", field="replicas")
        bad = [k for k in self.emit if k not in EMIT_KINDS]
        if bad:
            raise ConfigError(f"unknown emit kinds {bad}", field="emit")
        if "slopes" in self.emit:
            post_burn_in = self.config.n - math.floor(0.2 * self.config.n)
            if post_burn_in < 10:
                raise ConfigError(
                    "slope fits need at least 10 post-burn-in hops "
                    f"(n >= 13), got n = {self.config.n}",
                    field="emit",
                )


def spec_to_dict(spec: ExperimentSpec) -> dict:
    return {
        "config": config_to_dict(spec.config),
        "replicas": spec.replicas,
        "emit": list(spec.emit),
    }


def spec_from_dict(data: dict) -> ExperimentSpec:
    return ExperimentSpec(
        config=config_from_dict(data["config"]),
        replicas=int(data.get("replicas", 1)),
        emit=tuple(data.get("emit", ["trajectory"])),
    )


@dataclass
class RunResult:
    out_dir: Path
    files: list
    records: list  # list over replicas of list[TrajectoryRecord]
    report: ExponentReport | None
    fits: list


def _fmt(x) -> str:
    return repr(float(x))


def _write_csv(path: Path, header: str, rows) -> None:
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(str(c) for c in row) + "\n")


def simulate_replicas(cfg: NetworkConfig, replicas: int) -> list:
    out = []
    for r in range(replicas):
        out.append(simulate_trajectory(replace(cfg, seed=cfg.seed + r)))
    return out


def pooled_log_capacity(records_by_replica) -> tuple[np.ndarray, np.ndarray]:
    """(hops, replica-mean log capacity per eigenchannel), from log SNRs."""
    hops = np.array([rec.hop for rec in records_by_replica[0]], dtype=float)
    stacks = []
    for records in records_by_replica:
        stacks.append(
            np.stack([stable_log_capacity(rec.log_snr) for rec in records])
        )
    return hops, np.mean(stacks, axis=0)


def run(spec: ExperimentSpec, out_dir) -> RunResult:
    """Execute the spec and write one CSV per emitted kind plus a manifest."""
    t0 = time.time()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    cfg = spec.config
    d = cfg.d

    needs_sim = any(k in spec.emit for k in ("trajectory", "nu", "slopes"))
    records_by_replica = simulate_replicas(cfg, spec.replicas) if needs_sim else []

    report = None
    if any(k in spec.emit for k in ("exponents", "bounds", "slopes", "nu")):
        report = exponents_closed_form(cfg)

    files = []
    fits = []

    if "trajectory" in spec.emit:
        rows = []
        for r, records in enumerate(records_by_replica):
            for rec in records:
                for i in range(d):
                    rows.append(
                        (
                            r,
                            rec.hop,
                            i + 1,
                            _fmt(rec.log_snr[i]),
                            _fmt(rec.capacity[i]),
                            _fmt(rec.log_power_x),
                            _fmt(rec.log_power_i),
                        )
                    )
        _write_csv(out_dir / "trajectory.csv", TRAJECTORY_HEADER, rows)
        files.append("trajectory.csv")

    if "exponents" in spec.emit:
        _write_csv(
            out_dir / "exponents.csv",
            EXPONENTS_HEADER,
            [
                (
                    i + 1,
                    _fmt(report.lambda_h[i]),
                    _fmt(report.lambda_q[i]),
                    _fmt(report.lambda_gamma[i]),
                    report.method,
                    _fmt(0.0),
                )
                for i in range(d)
            ],
        )
        files.append("exponents.csv")

    if "bounds" in spec.emit:
        ubs = lyap_upper_bounds(cfg)
        fixed_b, var_b = power_growth_bounds(cfg)
        _write_csv(
            out_dir / "bounds.csv",
            BOUNDS_HEADER,
            [
                (i + 1, _fmt(ubs[i]), _fmt(fixed_b), _fmt(var_b))
                for i in range(d)
            ],
        )
        files.append("bounds.csv")

    if "nu" in spec.emit:
        rows = []
        for r, records in enumerate(records_by_replica):
            for rec in records:
                logc = stable_log_capacity(rec.log_snr)
                for j in range(2, d + 1):
                    rows.append((r, rec.hop, j, _fmt(logc[0] - logc[j - 1])))
        _write_csv(out_dir / "nu.csv", NU_HEADER, rows)
        files.append("nu.csv")

    if "slopes" in spec.emit:
        fits = standard_fits(records_by_replica, report)
        write_fits(out_dir / "fits.csv", fits)
        files.append("fits.csv")

    manifest = {
        "kind": "afchain-run",
        "version": PACKAGE_VERSION,
        "spec": spec_to_dict(spec),
        "seeds": [cfg.seed + r for r in range(spec.replicas)],
        "files": files,
        "wall_time_s": round(time.time() - t0, 3),
    }
    with open(out_dir / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")

    return RunResult(out_dir, files, records_by_replica, report, fits)


def standard_fits(records_by_replica, report: ExponentReport, burn_in: float = 0.2):
    """Replica-mean slope fits: per-eigenchannel log capacity against the
    SNR-decay exponents, plus the two signal-power trajectories."""
    d = report.d
    hops, logc = pooled_log_capacity(records_by_replica)
    fits = []
    for i in range(d):
        fits.append(
            fit_slope(
                hops,
                logc[:, i],
                burn_in,
                quantity="log_capacity",
                eig_index=i + 1,
                predicted=report.lambda_gamma[i],
            )
        )
    px = np.mean(
        [[rec.log_power_x for rec in records] for records in records_by_replica],
        axis=0,
    )
    pi = np.mean(
        [[rec.log_power_i for rec in records] for records in records_by_replica],
        axis=0,
    )
    fits.append(
        fit_slope(
            hops, px, burn_in,
            quantity="log_power_X", eig_index=0,
            predicted=2.0 * report.lambda_q[0],
        )
    )
    fits.append(
        fit_slope(
            hops, pi, burn_in,
            quantity="log_power_I", eig_index=0,
            predicted=2.0 * report.lambda_h[0],
        )
    )
    for j in range(2, d + 1):
        nu = logc[:, 0] - logc[:, j - 1]
        fits.append(
            fit_slope(
                hops, nu, burn_in,
                quantity="log_nu", eig_index=j,
                predicted=report.lambda_gamma[0] - report.lambda_gamma[j - 1],
            )
        )
    return fits


def write_fits(path: Path, fits) -> None:
    _write_csv(
        path,
        FITS_HEADER,
        [
            (
                f.quantity,
                f.eig_index,
                _fmt(f.slope),
                _fmt(f.predicted),
                _fmt(f.rel_err),
                _fmt(f.r2),
            )
            for f in fits
        ],
    )


def run_from_manifest(manifest_path, out_dir) -> RunResult:
    with open(manifest_path) as fh:
        manifest = json.load(fh)
    if manifest.get("kind") != "afchain-run":
        raise ConfigError("not an afchain run manifest", field="manifest")
    return run(spec_from_dict(manifest["spec"]), out_dir)


# ---------------------------------------------------------------------------
# pooled spectrum estimation (the estimator-side experiment)


def estimate_exponents_pooled(
    cfg: NetworkConfig,
    steps: int,
    replicas: int,
    *,
    renorm_period: int = 1,
) -> tuple[np.ndarray, np.ndarray]:
    """Replica-averaged spectrum estimate of the chain's information map.

    Returns (exponents, standard errors of the replica mean)."""
    ests = []
    for r in range(replicas):
        rng = np.random.default_rng(cfg.seed + r)
        spec = estimate_spectrum(
            InformationProcess(cfg), steps, renorm_period, rng
        )
        ests.append(spec.exponents)
    ests = np.stack(ests)
    mean = ests.mean(axis=0)
    if replicas > 1:
        stderr = ests.std(axis=0, ddof=1) / math.sqrt(replicas)
    else:
        stderr = np.zeros_like(mean)
    return mean, stderr
