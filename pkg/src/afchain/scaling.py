"""Closed-form Lyapunov theory of the relay chain: spectrum formulas, power
growth bounds, capacity-ratio divergence, antenna-scaling regimes, stream
costs, and gain design.

All exponents derive from lambda_i = (L + psi(d-i+1)) / 2, where L is the
long-run average of log(alpha_j^2 mu_j). Fixed-gain L is elementary;
variable-gain L integrates log((p/d) G + d n0) against the Gamma(d^2, mu)
law of the squared channel Frobenius norm (Gauss-Laguerre), tensored with
Gauss-Hermite when mu is log-normal. A Monte Carlo evaluator doubles as the
test oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np
from scipy.optimize import brentq
from scipy.special import roots_genlaguerre, roots_hermite

from .errors import ConfigError
from .network import (
    GAIN_FIXED,
    GAIN_VARIABLE,
    ConstantMu,
    ConstantPower,
    GeometricPower,
    LogNormalMu,
    MuList,
    NetworkConfig,
    PowerList,
)
from .rds import LyapunovSpectrum
from .special import digamma_int, harmonic

LAGUERRE_NODES = 64
HERMITE_NODES = 128

METHOD_FIXED = "closed-form-fixed"
METHOD_QUAD = "quadrature-variable"
METHOD_MC = "monte-carlo-variable"

REGIME_BOTH_NONNEG = "both-nonneg"
REGIME_BOTH_NONPOS = "both-nonpos"
REGIME_STRADDLING = "straddling"


@dataclass(frozen=True)
class ExponentReport:
    """Spectrum of the information map plus the derived power/SNR families."""

    d: int
    gain: str
    lambda_h: tuple
    lambda_q: tuple
    lambda_gamma: tuple
    l_value: float
    method: str

    def as_spectrum(self) -> LyapunovSpectrum:
        return LyapunovSpectrum(
            exponents=np.array(self.lambda_h),
            stderr=np.zeros(self.d),
            steps_used=0,
            method="closed-form",
        )


def _report(d, gain, l_value, method) -> ExponentReport:
    lam = tuple(0.5 * (l_value + digamma_int(d - i + 1)) for i in range(1, d + 1))
    return ExponentReport(
        d=d,
        gain=gain,
        lambda_h=lam,
        lambda_q=tuple(max(0.0, x) for x in lam),
        lambda_gamma=tuple(min(0.0, 2.0 * x) for x in lam),
        l_value=l_value,
        method=method,
    )


# ---------------------------------------------------------------------------
# per-hop terms e_j = E log(alpha_j^2 mu_j), in log-power form so geometric
# schedules with p_j ~ g^j never overflow


import functools


@functools.lru_cache(maxsize=None)
def _laguerre(d2: int):
    if d2 - 1 > 150:
        raise ConfigError(
            "Gauss-Laguerre weights overflow for d^2 > 151; use Monte Carlo",
            field="d",
        )
    x, w = roots_genlaguerre(LAGUERRE_NODES, d2 - 1)
    return x, w / w.sum()


@functools.lru_cache(maxsize=None)
def _hermite():
    t, u = roots_hermite(HERMITE_NODES)
    return t, u / u.sum()


def _log_n0(d, n0):
    return math.log(d * n0) if n0 > 0 else -math.inf


def term_fixed(lp_j, lp_prev, d, mu, n0) -> float:
    """lp_* are log powers."""
    return float(
        lp_j + np.log(mu) - np.logaddexp(lp_prev + np.log(d * mu), _log_n0(d, n0))
    )


def term_variable(lp_j, lp_prev, d, mu, n0) -> float:
    x, w = _laguerre(d * d)
    inner = np.logaddexp(lp_prev + np.log(mu * x / d), _log_n0(d, n0))
    return float(lp_j + np.log(mu) - w @ inner)


def term_fixed_lognormal(lp_j, lp_prev, d, a, b, n0) -> float:
    t, u = _hermite()
    mu = np.exp(a + math.sqrt(2.0 * b) * t)
    return float(
        u @ (lp_j + np.log(mu) - np.logaddexp(lp_prev + np.log(d * mu), _log_n0(d, n0)))
    )


def term_variable_lognormal(lp_j, lp_prev, d, a, b, n0) -> float:
    t, u = _hermite()
    mu = np.exp(a + math.sqrt(2.0 * b) * t)
    x, w = _laguerre(d * d)
    inner = np.logaddexp(lp_prev + np.log(np.outer(mu, x) / d), _log_n0(d, n0)) @ w
    return float(u @ (lp_j + np.log(mu) - inner))


def _term(gain, lp_j, lp_prev, d, mu_desc, n0) -> float:
    kind, payload = mu_desc
    if gain == GAIN_FIXED:
        if kind == "value":
            return term_fixed(lp_j, lp_prev, d, payload, n0)
        return term_fixed_lognormal(lp_j, lp_prev, d, *payload, n0)
    if kind == "value":
        return term_variable(lp_j, lp_prev, d, payload, n0)
    return term_variable_lognormal(lp_j, lp_prev, d, *payload, n0)


def _mu_desc(sched, j=None):
    if isinstance(sched, ConstantMu):
        return ("value", float(sched.value))
    if isinstance(sched, MuList):
        return ("value", float(sched.values[j - 1]))
    if isinstance(sched, LogNormalMu):
        return ("lognormal", (sched.a, sched.b))
    raise ConfigError(f"unsupported mu schedule {sched!r}", field="mu_schedule")


def information_rate(cfg: NetworkConfig, *, horizon: int | None = None) -> float:
    """L = long-run average of log(alpha_j^2 mu_j) for the configured chain.

    Constant schedules evaluate exactly; geometric schedules use the limit
    of the (convergent) per-hop terms, or a finite-horizon average when
    `horizon` is given; list schedules average their finite length.
    """
    d, n0, gain = cfg.d, cfg.n0, cfg.gain
    power = cfg.power_schedule
    mu = cfg.mu_schedule

    if isinstance(mu, MuList) or isinstance(power, PowerList):
        n = cfg.n
        terms = [
            _term(
                gain,
                math.log(power.at(j)),
                math.log(power.at(j - 1)),
                d,
                _mu_desc(mu, j),
                n0,
            )
            for j in range(1, n + 1)
        ]
        return float(np.mean(terms))

    if isinstance(power, ConstantPower) or (
        isinstance(power, GeometricPower) and power.growth == 1.0
    ):
        lp = math.log(power.at(1))
        return _term(gain, lp, lp, d, _mu_desc(mu), n0)

    assert isinstance(power, GeometricPower)
    g = power.growth
    if g < 1.0:
        raise ConfigError(
            "geometric power decay (growth < 1) drives the information rate "
            "to -inf; no finite spectrum exists",
            field="power_schedule",
        )
    if horizon is not None:
        lp0 = math.log(power.p0)
        lg = math.log(g)
        terms = [
            _term(gain, lp0 + j * lg, lp0 + (j - 1) * lg, d, _mu_desc(mu), n0)
            for j in range(1, horizon + 1)
        ]
        return float(np.mean(terms))
    # limit of the per-hop terms: the additive noise floor washes out
    if gain == GAIN_FIXED:
        return math.log(g / d)
    return math.log(g) + math.log(d) - digamma_int(d * d)


def information_rate_mc(
    cfg: NetworkConfig, draws: int = 1_000_000, seed: int = 20_240_901
) -> float:
    """Monte Carlo oracle for L under constant-power schedules."""
    if not isinstance(cfg.power_schedule, (ConstantPower, GeometricPower)):
        raise ConfigError("Monte Carlo L needs a stationary power schedule")
    if isinstance(cfg.power_schedule, GeometricPower) and cfg.power_schedule.growth != 1.0:
        raise ConfigError("Monte Carlo L needs a stationary power schedule")
    rng = np.random.default_rng(seed)
    d, n0 = cfg.d, cfg.n0
    p = cfg.power_schedule.at(1)
    mu_sched = cfg.mu_schedule
    if isinstance(mu_sched, ConstantMu):
        mus = np.full(draws, float(mu_sched.value))
    elif isinstance(mu_sched, LogNormalMu):
        mus = np.exp(mu_sched.a + math.sqrt(mu_sched.b) * rng.standard_normal(draws))
    else:
        raise ConfigError("Monte Carlo L needs a constant or lognormal mu schedule")
    if cfg.gain == GAIN_FIXED:
        terms = np.log(p * mus) - np.log(p * d * mus + d * n0)
    else:
        gsq = rng.gamma(d * d, 1.0, size=draws) * mus
        terms = np.log(p * mus) - np.log((p / d) * gsq + d * n0)
    return float(terms.mean())


def exponents_closed_form(
    cfg: NetworkConfig,
    *,
    method: str = "auto",
    horizon: int | None = None,
    mc_draws: int = 1_000_000,
    mc_seed: int = 20_240_901,
) -> ExponentReport:
    """Ordered spectrum of the information map from the closed form.

    `method="monte-carlo"` replaces the quadrature evaluation of L by
    sampling (the oracle route); anything else picks the deterministic
    evaluation for the configured gain.
    """
    if method not in ("auto", "monte-carlo"):
        raise ValueError(f"method must be 'auto' or 'monte-carlo', got {method!r}")
    if method == "monte-carlo":
        l_value = information_rate_mc(cfg, draws=mc_draws, seed=mc_seed)
        label = METHOD_MC
    else:
        l_value = information_rate(cfg, horizon=horizon)
        label = METHOD_FIXED if cfg.gain == GAIN_FIXED else METHOD_QUAD
    return _report(cfg.d, cfg.gain, l_value, label)


# ---------------------------------------------------------------------------
# growth bounds


def power_growth_bounds(cfg: NetworkConfig) -> tuple[float, float]:
    """Minimum exponential growth rates of the average transmit power needed
    to sustain the top information exponent, per gain strategy."""
    d = cfg.d
    rep_f = exponents_closed_form(replace(cfg, gain=GAIN_FIXED))
    rep_v = exponents_closed_form(replace(cfg, gain=GAIN_VARIABLE))
    fixed = max(2.0 * rep_f.lambda_h[0] + math.log(d) - digamma_int(d), 0.0)
    variable = max(
        2.0 * rep_v.lambda_h[0] + digamma_int(d * d) - digamma_int(d) - math.log(d),
        0.0,
    )
    return fixed, variable


def lyap_upper_bounds(cfg: NetworkConfig) -> np.ndarray:
    """Per-index upper bounds on the information exponents in terms of the
    power growth rate rho = lim (1/n) log(p_n / p_0)."""
    d = cfg.d
    rho = cfg.power_schedule.growth_rate(cfg.n)
    out = np.empty(d)
    for j in range(1, d + 1):
        psi_j = digamma_int(d - j + 1)
        if cfg.gain == GAIN_FIXED:
            out[j - 1] = 0.5 * (rho - math.log(d) + psi_j)
        else:
            out[j - 1] = 0.5 * (rho + math.log(d) - digamma_int(d * d) + psi_j)
    return out


# ---------------------------------------------------------------------------
# capacity-ratio divergence


def lyapunov_difference(lambda_h_i: float, lambda_h_j: float) -> tuple[float, str]:
    """Separation rate of two eigenchannel capacities from their raw
    exponents, with the sign regime that produced it."""
    if not lambda_h_i > lambda_h_j:
        raise ValueError(
            f"need lambda_i > lambda_j (i < j), got {lambda_h_i} <= {lambda_h_j}"
        )
    if lambda_h_j >= 0:
        return 0.0, REGIME_BOTH_NONNEG
    if lambda_h_i <= 0:
        return 2.0 * (lambda_h_i - lambda_h_j), REGIME_BOTH_NONPOS
    return -2.0 * lambda_h_j, REGIME_STRADDLING


def phi_bar_exact(d: int, i: int, j: int) -> Fraction:
    """Exact upper bound on the capacity separation rate: H_{d-i} - H_{d-j}."""
    if not (1 <= i < j <= d):
        raise ValueError(f"need 1 <= i < j <= d, got i={i}, j={j}, d={d}")
    return harmonic(d - i) - harmonic(d - j)


@dataclass(frozen=True)
class DifferenceReport:
    """phi, its exact upper bound, and the sign regime for every i < j pair."""

    d: int
    phi: np.ndarray
    phi_bar: np.ndarray
    regime: list


def build_difference_report(report: ExponentReport) -> DifferenceReport:
    d = report.d
    phi = np.zeros((d, d))
    phi_bar = np.zeros((d, d))
    regime = [[None] * d for _ in range(d)]
    for i in range(1, d + 1):
        for j in range(i + 1, d + 1):
            p, r = lyapunov_difference(report.lambda_h[i - 1], report.lambda_h[j - 1])
            phi[i - 1, j - 1] = p
            phi_bar[i - 1, j - 1] = float(phi_bar_exact(d, i, j))
            regime[i - 1][j - 1] = r
    return DifferenceReport(d=d, phi=phi, phi_bar=phi_bar, regime=regime)


REGIME_VANISHING = "vanishing"
REGIME_BOUNDED = "bounded"
REGIME_DIVERGENT = "divergent"

_ANTENNA_KINDS = ("constant", "sublinear", "linear", "superlinear")


def scaling_regime(antenna_growth: str, i: int, j: int) -> str:
    """Limit behavior of n * phi_{i,j} as hops and antennas scale together.

    `antenna_growth` describes d as a function of n. Assumes the pair is not
    in the both-nonnegative regime (where the limit is trivially 0); with
    constant d any nonzero separation rate diverges, including the
    straddling case.
    """
    if antenna_growth not in _ANTENNA_KINDS:
        raise ValueError(
            f"antenna_growth must be one of {_ANTENNA_KINDS}, got {antenna_growth!r}"
        )
    if not 1 <= i < j:
        raise ValueError(f"need 1 <= i < j, got i={i}, j={j}")
    if antenna_growth == "superlinear":
        return REGIME_VANISHING
    if antenna_growth == "linear":
        return REGIME_BOUNDED
    return REGIME_DIVERGENT


def predict_nu_slope(report: ExponentReport, i: int, j: int) -> float:
    """Exponential rate at which the i-th and j-th eigenchannel capacities
    diverge: the slope of log(c_i / c_j) per hop."""
    if not (1 <= i < j <= report.d):
        raise ValueError(f"need 1 <= i < j <= d, got i={i}, j={j}, d={report.d}")
    return report.lambda_gamma[i - 1] - report.lambda_gamma[j - 1]


def stream_cost(d: int, i: int, n: int) -> float:
    """Multiplicative transmit-power factor for adding an (i+1)-th stream
    while keeping it from decaying, over n hops."""
    if not 1 <= i < d:
        raise ValueError(f"need 1 <= i < d, got i={i}, d={d}")
    return math.exp(n / (d - i))


# ---------------------------------------------------------------------------
# gain design


def design_power_growth(
    d: int,
    mu: float,
    n0: float,
    gain: str,
    target_index: int = 1,
    *,
    p0: float = 1.0,
    horizon: int = 1000,
    bracket_factor: float = 4.0,
) -> float:
    """Geometric power growth g making the target exponent vanish over a
    finite horizon. Monotonicity of the exponent in g makes the bracketed
    root-find safe; the fixed-gain noiseless root d * exp(-psi(d-i+1)) seeds
    the bracket."""
    if not (1 <= target_index <= d):
        raise ValueError(f"target_index must be in 1..d, got {target_index}")
    if gain not in (GAIN_FIXED, GAIN_VARIABLE):
        raise ValueError(f"unknown gain strategy {gain!r}")
    psi_i = digamma_int(d - target_index + 1)
    desc = ("value", float(mu))
    lp0 = math.log(p0)

    def lam(g):
        lg = math.log(g)
        terms = [
            _term(gain, lp0 + j * lg, lp0 + (j - 1) * lg, d, desc, n0)
            for j in range(1, horizon + 1)
        ]
        return 0.5 * (float(np.mean(terms)) + psi_i)

    lo, hi = 1.0, bracket_factor * d
    f_lo, f_hi = lam(lo), lam(hi)
    if f_lo >= 0 or f_hi <= 0:
        raise ValueError(
            "no zero crossing of the target exponent for g in "
            f"[{lo}, {hi}]: endpoint values ({f_lo:.6f}, {f_hi:.6f}); "
            "feasible growth rates lie outside this bracket"
        )
    return float(brentq(lam, lo, hi, xtol=1e-12, rtol=1e-14))
