"""The amplify-and-forward MIMO relay chain: per-hop gains, covariance
propagation, eigenchannel SNRs and capacities, and seeded trajectory
simulation.

Randomness convention: every draw (mu schedule, channels H, noise directions
Z, source symbols, and the realized gains) is generated in float64 from the
config seed, then lifted exactly into the active precision backend. Both
backends therefore simulate the *same realization* and differ only in
arithmetic. Draw order per trajectory: the whole mu vector, then the source
vector, then per hop the channel block followed by the noise block.

SNR bookkeeping never leaves the log domain. At double precision the
trajectory tracks the whitened information product in a per-direction
log-scaled QR factorization, which keeps even deeply decayed eigenchannels
accurate to near machine relative precision; the plain normalized covariance
pair (exact contract of :func:`step_covariances` / :func:`eigen_snr`) is the
big-float ground-truth path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Union

import mpmath as mp
import numpy as np

from .errors import ConfigError, NotPositiveDefiniteError, PrecisionEscalationRequired
from .precision import (
    PrecisionConfig,
    cholesky,
    conj_t,
    eig_hermitian,
    fro_norm,
    is_big,
    jacobi_eigh,
    matmul,
    qr_decompose,
    scalar_log,
    solve_lower,
    vec_norm,
    whiten,
)
from .rds import MatrixProcess
from .sampling import (
    sample_channel_matrix,
    sample_complex_gaussian,
    sample_lognormal,
    sample_source_vector,
    sample_unit_noise_vector,
)

GAIN_FIXED = "fixed"
GAIN_VARIABLE = "variable"


# ---------------------------------------------------------------------------
# schedules


@dataclass(frozen=True)
class ConstantMu:
    value: float = 1.0

    def validate(self, n):
        if not self.value > 0:
            raise ConfigError("mu must be > 0", field="mu_schedule")

    def draw(self, n, rng):
        self.validate(n)
        return np.full(n, float(self.value))


@dataclass(frozen=True)
class MuList:
    values: tuple

    def validate(self, n):
        vals = np.asarray(self.values, dtype=float)
        if len(vals) != n:
            raise ConfigError(
                f"mu list has length {len(vals)}, expected n = {n}",
                field="mu_schedule",
            )
        if (vals <= 0).any():
            raise ConfigError("all mu values must be > 0", field="mu_schedule")

    def draw(self, n, rng):
        self.validate(n)
        return np.asarray(self.values, dtype=float)


@dataclass(frozen=True)
class LogNormalMu:
    a: float = 0.0
    b: float = 1.0

    def validate(self, n):
        if not self.b > 0:
            raise ConfigError("lognormal b must be > 0", field="mu_schedule")

    def draw(self, n, rng):
        self.validate(n)
        return sample_lognormal(self.a, self.b, rng, size=n)


MuSchedule = Union[ConstantMu, MuList, LogNormalMu]


@dataclass(frozen=True)
class ConstantPower:
    value: float = 1.0

    def at(self, i):
        return float(self.value)

    def growth_rate(self, n=None):
        return 0.0

    def validate(self, n):
        if not self.value > 0:
            raise ConfigError("power must be > 0", field="power_schedule")


@dataclass(frozen=True)
class GeometricPower:
    p0: float = 1.0
    growth: float = 1.0

    def at(self, i):
        return float(self.p0) * float(self.growth) ** i

    def growth_rate(self, n=None):
        return math.log(self.growth)

    def validate(self, n):
        if not self.p0 > 0:
            raise ConfigError("p0 must be > 0", field="power_schedule")
        if not self.growth > 0:
            raise ConfigError("growth must be > 0", field="power_schedule")


@dataclass(frozen=True)
class PowerList:
    values: tuple  # p_0 .. p_n inclusive

    def at(self, i):
        return float(self.values[i])

    def growth_rate(self, n=None):
        n = len(self.values) - 1 if n is None else n
        return math.log(self.values[n] / self.values[0]) / n

    def validate(self, n):
        if len(self.values) != n + 1:
            raise ConfigError(
                f"power list has length {len(self.values)}, expected n+1 = {n + 1}",
                field="power_schedule",
            )
        if any(not v > 0 for v in self.values):
            raise ConfigError("all powers must be > 0", field="power_schedule")


PowerSchedule = Union[ConstantPower, GeometricPower, PowerList]


@dataclass(frozen=True)
class NetworkConfig:
    """Everything needed to reproduce one relay-chain experiment."""

    d: int
    n: int
    gain: str = GAIN_FIXED
    mu_schedule: MuSchedule = ConstantMu(1.0)
    power_schedule: PowerSchedule = ConstantPower(1.0)
    n0: float = 1.0
    seed: int = 0
    precision: PrecisionConfig = field(default_factory=PrecisionConfig)
    source_symbols: str = "gaussian"

    def __post_init__(self):
        if self.d < 1:
            raise ConfigError("d must be >= 1", field="d")
        if self.n < 1:
            raise ConfigError("n must be >= 1", field="n")
        if self.gain not in (GAIN_FIXED, GAIN_VARIABLE):
            raise ConfigError(f"unknown gain strategy {self.gain!r}", field="gain")
        if not self.n0 > 0:
            raise ConfigError("n0 must be > 0", field="n0")
        if self.source_symbols not in ("gaussian", "unit-modulus"):
            raise ConfigError(
                f"unknown source symbol kind {self.source_symbols!r}",
                field="source_symbols",
            )
        self.power_schedule.validate(self.n)
        self.mu_schedule.validate(self.n)

    @property
    def p0(self) -> float:
        return self.power_schedule.at(0)

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)


# ---------------------------------------------------------------------------
# gains


def gain_fixed(p_j, p_jm1, d, mu_j, n0) -> float:
    """Per-hop gain from average channel statistics."""
    if not (p_j > 0 and p_jm1 > 0 and d >= 1 and mu_j > 0 and n0 >= 0):
        raise ValueError("gain_fixed needs positive powers and mu, n0 >= 0")
    return math.sqrt(p_j / (p_jm1 * d * mu_j + d * n0))


def gain_variable(p_j, p_jm1, d, h_j, n0) -> float:
    """Per-hop gain from the realized channel's Frobenius norm."""
    if not (p_j > 0 and p_jm1 > 0 and d >= 1 and n0 >= 0):
        raise ValueError("gain_variable needs positive powers, n0 >= 0")
    fro2 = float(np.sum(np.abs(np.asarray(h_j)) ** 2))
    denom = (p_jm1 / d) * fro2 + d * n0
    if denom <= 0:
        raise ValueError("gain_variable: zero channel with zero noise floor")
    return math.sqrt(p_j / denom)


@dataclass(frozen=True)
class HopDraw:
    """One realized hop: channel, normalized noise Z = V / sqrt(n0), gain."""

    index: int
    h: np.ndarray  # (d, d) complex128
    z: np.ndarray  # (d,)  complex128
    alpha: float
    mu: float


def draw_hops(cfg: NetworkConfig, rng: np.random.Generator) -> list[HopDraw]:
    mus = cfg.mu_schedule.draw(cfg.n, rng)
    hops = []
    for j in range(1, cfg.n + 1):
        h = sample_channel_matrix(cfg.d, float(mus[j - 1]), rng)
        z = sample_unit_noise_vector(cfg.d, rng)
        p_j = cfg.power_schedule.at(j)
        p_jm1 = cfg.power_schedule.at(j - 1)
        if cfg.gain == GAIN_FIXED:
            alpha = gain_fixed(p_j, p_jm1, cfg.d, float(mus[j - 1]), cfg.n0)
        else:
            alpha = gain_variable(p_j, p_jm1, cfg.d, h, cfg.n0)
        hops.append(HopDraw(j, h, z, alpha, float(mus[j - 1])))
    return hops


# ---------------------------------------------------------------------------
# covariance propagation (normalized representatives + log scales)


@dataclass
class CovariancePair:
    """R_I = exp(logscale_i) * ri_hat, R_N = exp(logscale_n) * rn_hat.

    The hatted matrices have unit Frobenius norm; logscale_n = -inf encodes
    the empty noise sum before the first hop.
    """

    ri_hat: np.ndarray
    logscale_i: object  # float or mpf
    rn_hat: np.ndarray
    logscale_n: object

    @classmethod
    def initial(cls, d: int, p0: float, precision: PrecisionConfig) -> "CovariancePair":
        eye = precision.eye(d)
        if precision.is_double:
            ri_hat = eye / math.sqrt(d)
            ls_i = math.log(p0) + 0.5 * math.log(d)
            ls_n = -math.inf
        else:
            ri_hat = eye / mp.sqrt(mp.mpf(d))
            ls_i = mp.log(mp.mpf(p0)) + mp.log(mp.mpf(d)) / 2
            ls_n = mp.mpf("-inf")
        return cls(ri_hat, ls_i, ri_hat.copy(), ls_n)

    def reconstruct(self):
        """Unscaled (R_I, R_N); only sensible when the scales are moderate."""
        if is_big(self.ri_hat):
            ri = self.ri_hat * mp.exp(self.logscale_i)
            rn = self.rn_hat * mp.exp(self.logscale_n)
        else:
            ri = self.ri_hat * math.exp(self.logscale_i)
            rn = self.rn_hat * math.exp(
                self.logscale_n if self.logscale_n > -math.inf else -math.inf
            )
        return ri, rn


def step_covariances(cov: CovariancePair, hop: HopDraw, n0: float) -> CovariancePair:
    """One-hop update: R_I <- a^2 H R_I H^H, R_N <- n0 I + a^2 H R_N H^H."""
    big = is_big(cov.ri_hat)
    d = cov.ri_hat.shape[0]
    if big:
        h = PrecisionConfig("big").lift(hop.h)
        alpha2 = mp.mpf(hop.alpha) ** 2
        log_alpha2 = mp.log(alpha2) if hop.alpha != 0 else mp.mpf("-inf")
        n0_s = mp.mpf(n0)
        exp_f, log_f = mp.exp, mp.log
        neg_inf = mp.mpf("-inf")
        eye = PrecisionConfig("big").eye(d)
    else:
        h = np.asarray(hop.h, dtype=np.complex128)
        alpha2 = hop.alpha**2
        log_alpha2 = math.log(alpha2) if hop.alpha != 0 else -math.inf
        n0_s = float(n0)
        exp_f, log_f = math.exp, math.log
        neg_inf = -math.inf
        eye = np.eye(d, dtype=np.complex128)

    ht = conj_t(h)

    # information part
    p = matmul(matmul(h, cov.ri_hat), ht)
    s = fro_norm(p)
    if float(s) == 0.0 or log_alpha2 == neg_inf:
        ri_hat = eye / fro_norm(eye)
        ls_i = neg_inf
    else:
        ri_hat = p / s
        ls_i = cov.logscale_i + log_alpha2 + log_f(s)

    # noise part: n0 I + alpha^2 exp(ls_n) * (H rn_hat H^H)
    q = matmul(matmul(h, cov.rn_hat), ht)
    qn = fro_norm(q)
    log_noise = log_f(n0_s)
    if cov.logscale_n == neg_inf or log_alpha2 == neg_inf or float(qn) == 0.0:
        log_prop = neg_inf
    else:
        log_prop = cov.logscale_n + log_alpha2 + log_f(qn)
    m = max(log_noise, log_prop)
    inner = exp_f(log_noise - m) * eye
    if log_prop != neg_inf:
        inner = inner + exp_f(log_prop - m) * (q / qn)
    s2 = fro_norm(inner)
    rn_hat = inner / s2
    ls_n = m + log_f(s2)

    new = CovariancePair(ri_hat, ls_i, rn_hat, ls_n)
    _check_noise_floor(new, n0)
    return new


def _check_noise_floor(cov: CovariancePair, n0: float):
    # cheap structural guard; full PD failures surface in cholesky
    if not is_big(cov.rn_hat):
        dg = np.diagonal(cov.rn_hat).real
        if (dg <= 0).any():
            raise PrecisionEscalationRequired(
                "noise covariance lost positive definiteness at double "
                "precision; rerun with a big-float backend"
            )


def eigen_snr(cov: CovariancePair) -> np.ndarray:
    """Descending log eigen-SNRs of the pair, via Cholesky whitening.

    log_snr_i = log E_i(L^{-1} ri_hat L^{-H}) + logscale_i - logscale_n with
    L L^H = rn_hat. The log-domain return survives arbitrarily deep decay.
    """
    big = is_big(cov.rn_hat)
    try:
        l = cholesky(cov.rn_hat)
    except NotPositiveDefiniteError as exc:
        if big:
            raise
        raise PrecisionEscalationRequired(
            "whitening failed at double precision; rerun with a big-float "
            "backend"
        ) from exc
    s = whiten(l, cov.ri_hat)
    ed = eig_hermitian(s, asym_tol=1e-6)
    d = s.shape[0]
    out = np.empty(d)
    for i in range(d):
        val = ed.eigenvalues[i]
        if not val > 0:
            out[i] = -math.inf
        elif big:
            out[i] = float(mp.log(val) + cov.logscale_i - cov.logscale_n)
        else:
            out[i] = math.log(val) + cov.logscale_i - cov.logscale_n
    return out


def covariances_direct(hops: list[HopDraw], p0: float, n0: float,
                       precision: PrecisionConfig):
    """Unscaled (R_I, R_N) straight from the product formulas (oracle route)."""
    d = hops[0].h.shape[0]
    eye = precision.eye(d)
    lifted = [precision.lift(h.h) for h in hops]

    def tail_product(start):  # H_n ... H_start
        acc = eye
        for h in lifted[start - 1 :]:
            acc = matmul(h, acc)
        return acc

    alphas = [mp.mpf(h.alpha) if not precision.is_double else h.alpha for h in hops]
    n = len(hops)

    pref = p0
    for a in alphas:
        pref = pref * a * a
    m = tail_product(1)
    ri = pref * matmul(m, conj_t(m))

    rn = eye * (mp.mpf(n0) if not precision.is_double else n0)
    for l in range(2, n + 1):
        pref = 1 if precision.is_double else mp.mpf(1)
        for a in alphas[l - 1 :]:
            pref = pref * a * a
        t = tail_product(l)
        rn = rn + (n0 * pref) * matmul(t, conj_t(t))
    return ri, rn


# ---------------------------------------------------------------------------
# per-direction log-scaled whitened product (double-precision trajectory path)

# A block of scales wider than this cannot be squared in double; split it at
# its largest internal gap. Blocks decouple with relative error exp(-2*gap),
# so gaps above MIN_SPLIT_GAP keep full double accuracy.
SPREAD_LIMIT = 300.0
MIN_SPLIT_GAP = 25.0


def graded_log_eigvals(ell: np.ndarray, b: np.ndarray) -> np.ndarray:
    """log eigenvalues of diag(e^ell) B diag(e^ell), B Hermitian PD and
    well-conditioned, preserving relative accuracy across any grading."""
    order = np.argsort(-ell, kind="stable")
    ell = ell[order]
    b = b[np.ix_(order, order)]
    return _graded_sorted(ell, b)


def _graded_sorted(ell, b):
    if ell[0] - ell[-1] <= SPREAD_LIMIT:
        shift = ell[0]
        w = np.exp(ell - shift)
        h = w[:, None] * b * w[None, :]
        vals, _ = jacobi_eigh(h, relative=True)
        vals = np.maximum(vals, 1e-320)
        return np.log(vals) + 2.0 * shift
    gaps = ell[:-1] - ell[1:]
    m = int(np.argmax(gaps)) + 1
    if gaps[m - 1] < MIN_SPLIT_GAP:
        raise PrecisionEscalationRequired(
            "log-scale spread too wide without a usable gap; rerun with a "
            "big-float backend"
        )
    top = _graded_sorted(ell[:m], b[:m, :m])
    # eigenvalues of the trailing block live on the Schur complement
    l11 = cholesky(b[:m, :m])
    x = solve_lower(l11, b[:m, m:])
    schur = b[m:, m:] - conj_t(x) @ x
    bottom = _graded_sorted(ell[m:], schur)
    return np.concatenate([top, bottom])


class WhitenedSnrTracker:
    """QR-factored whitened information product at double precision.

    State: W_n = Omega_n diag(e^ell) That_n with Omega unitary and That
    unit-diagonal upper triangular. log eigen-SNRs are the log eigenvalues
    of diag(e^ell) (That That^H) diag(e^ell).
    """

    def __init__(self, d: int):
        self.d = d
        self.omega = np.eye(d, dtype=np.complex128)
        self.ell = np.zeros(d)
        self.that = np.eye(d, dtype=np.complex128)

    def step(self, fhat: np.ndarray, log_scale: float):
        q, r = qr_decompose(fhat @ self.omega)
        self.omega = q
        rd = np.diagonal(r).real.copy()
        # exp argument clipped: below-diagonal entries of r are structural
        # zeros, and a >700-nat scale inversion cannot occur in a sane run
        dd = np.minimum(np.triu(self.ell[None, :] - self.ell[:, None]), 700.0)
        ghat = np.triu((r / rd[:, None]) * np.exp(dd))
        self.that = ghat @ self.that
        self.ell = self.ell + np.log(rd) + log_scale

    def log_snrs(self) -> np.ndarray:
        if not np.all(np.isfinite(self.that.ravel().view(float))):
            raise PrecisionEscalationRequired(
                "whitened-product factors overflowed at double precision; "
                "rerun with a big-float backend"
            )
        b = self.that @ conj_t(self.that)
        try:
            vals = graded_log_eigvals(self.ell, b)
        except NotPositiveDefiniteError as exc:
            raise PrecisionEscalationRequired(
                "graded eigenvalue extraction failed at double precision; "
                "rerun with a big-float backend"
            ) from exc
        return np.sort(vals)[::-1]


# ---------------------------------------------------------------------------
# trajectory simulation


def stable_capacity(log_snr: np.ndarray) -> np.ndarray:
    """c = log(1 + e^{log_snr}) without overflow or underflow-to-garbage."""
    return np.logaddexp(0.0, log_snr)


def stable_log_capacity(log_snr: np.ndarray) -> np.ndarray:
    """log c, accurate even when c itself would denormalize."""
    ls = np.asarray(log_snr, dtype=float)
    out = np.where(ls < -36.0, ls, np.log(np.maximum(stable_capacity(ls), 1e-320)))
    return out


@dataclass(frozen=True)
class TrajectoryRecord:
    """Per-hop log eigen-SNRs, capacities, and signal powers (log domain)."""

    hop: int
    log_snr: np.ndarray
    capacity: np.ndarray
    total_capacity: float
    log_power_x: float
    log_power_i: float


def simulate_trajectory(cfg: NetworkConfig, rng=None) -> list[TrajectoryRecord]:
    """One seeded realization of the relay chain.

    Per hop: advance the covariance pair to get eigen-SNRs and capacities,
    advance the information vector, and advance the lifted total signal
    [X; sqrt(n0)], all with per-step renormalization so only log magnitudes
    accumulate.
    """
    rng = cfg.rng() if rng is None else rng
    hops = draw_hops(cfg, rng)
    x0 = sample_source_vector(cfg.d, cfg.p0, cfg.source_symbols, rng)

    prec = cfg.precision
    with prec.workspace():
        if prec.is_double:
            return _simulate_double(cfg, hops, x0)
        return _simulate_big(cfg, hops, x0)


def _norm_f64(v):
    return float(np.linalg.norm(v))


def _simulate_double(cfg, hops, x0):
    d, n0 = cfg.d, cfg.n0
    cov = CovariancePair.initial(d, cfg.p0, cfg.precision)
    tracker = WhitenedSnrTracker(d)
    k_prev = None

    ihat = x0 / _norm_f64(x0)
    log_i = math.log(_norm_f64(x0))
    s = np.concatenate([x0, [math.sqrt(n0)]]).astype(np.complex128)
    shat = s / _norm_f64(s)
    log_s = math.log(_norm_f64(s))

    records = []
    for hop in hops:
        cov = step_covariances(cov, hop, n0)
        try:
            k_new = cholesky(cov.rn_hat)
        except NotPositiveDefiniteError as exc:
            raise PrecisionEscalationRequired(
                "whitening failed at double precision; rerun with a "
                "big-float backend"
            ) from exc
        if k_prev is None:
            fhat = solve_lower(k_new, hop.h)
            log_scale = (
                math.log(hop.alpha)
                + 0.5 * math.log(cfg.p0)
                - 0.5 * cov.logscale_n
            )
        else:
            k_prev_mat, ls_prev = k_prev
            fhat = solve_lower(k_new, hop.h @ k_prev_mat)
            log_scale = math.log(hop.alpha) + 0.5 * (ls_prev - cov.logscale_n)
        tracker.step(fhat, log_scale)
        k_prev = (k_new, cov.logscale_n)

        log_snr = tracker.log_snrs()
        caps = stable_capacity(log_snr)

        y = hop.h @ ihat
        nrm = _norm_f64(y)
        log_i += math.log(hop.alpha) + math.log(nrm)
        ihat = y / nrm

        w_top = hop.alpha * (hop.h @ shat[:d] + shat[d] * hop.z)
        w = np.concatenate([w_top, [shat[d]]])
        nrm = _norm_f64(w)
        log_s += math.log(nrm)
        shat = w / nrm

        records.append(
            TrajectoryRecord(
                hop=hop.index,
                log_snr=log_snr,
                capacity=caps,
                total_capacity=float(caps.sum()),
                log_power_x=2.0 * (log_s + math.log(_norm_f64(shat[:d]))),
                log_power_i=2.0 * log_i,
            )
        )
    return records


def _simulate_big(cfg, hops, x0):
    d, n0 = cfg.d, cfg.n0
    prec = cfg.precision
    cov = CovariancePair.initial(d, cfg.p0, prec)

    iv = prec.lift(x0)
    nrm = vec_norm(iv)
    ihat = iv / nrm
    log_i = mp.log(nrm)

    sv = prec.lift(np.concatenate([x0, [math.sqrt(n0)]]))
    nrm = vec_norm(sv)
    shat = sv / nrm
    log_s = mp.log(nrm)

    records = []
    for hop in hops:
        cov = step_covariances(cov, hop, n0)
        log_snr = eigen_snr(cov)
        caps = stable_capacity(log_snr)

        h = prec.lift(hop.h)
        z = prec.lift(hop.z)
        alpha = mp.mpf(hop.alpha)

        y = np.dot(h, ihat)
        nrm = vec_norm(y)
        log_i = log_i + mp.log(alpha) + mp.log(nrm)
        ihat = y / nrm

        w_top = alpha * (np.dot(h, shat[:d]) + shat[d] * z)
        w = np.concatenate([w_top, [shat[d]]])
        nrm = vec_norm(w)
        log_s = log_s + mp.log(nrm)
        shat = w / nrm

        records.append(
            TrajectoryRecord(
                hop=hop.index,
                log_snr=log_snr,
                capacity=caps,
                total_capacity=float(caps.sum()),
                log_power_x=float(2 * (log_s + mp.log(vec_norm(shat[:d])))),
                log_power_i=float(2 * log_i),
            )
        )
    return records


# ---------------------------------------------------------------------------
# information-component matrix processes (for the spectrum estimator)


class InformationProcess(MatrixProcess):
    """Draws alpha_j H_j: the linear part of the chain's information map.

    Under constant power schedules the draws are i.i.d.; geometric and list
    schedules make them i.i.d. up to the deterministic per-step gain scalar,
    which the estimator accounts for by step index.
    """

    def __init__(self, cfg: NetworkConfig):
        self.cfg = cfg
        self.dim = cfg.d

    def draw_batch(self, start, count, rng):
        cfg = self.cfg
        d = cfg.d
        mus = _estimator_mus(cfg, count, rng)
        h = sample_complex_gaussian(1.0, rng, size=(count, d, d)) * np.sqrt(mus)[
            :, None, None
        ]
        out = np.empty_like(h)
        for t in range(count):
            j = start + t + 1
            p_j = cfg.power_schedule.at(j)
            p_jm1 = cfg.power_schedule.at(j - 1)
            if cfg.gain == GAIN_FIXED:
                alpha = gain_fixed(p_j, p_jm1, d, float(mus[t]), cfg.n0)
            else:
                alpha = gain_variable(p_j, p_jm1, d, h[t], cfg.n0)
            out[t] = alpha * h[t]
        return out


def _estimator_mus(cfg, count, rng):
    sched = cfg.mu_schedule
    if isinstance(sched, ConstantMu):
        return np.full(count, float(sched.value))
    if isinstance(sched, LogNormalMu):
        return sample_lognormal(sched.a, sched.b, rng, size=count)
    raise ConfigError(
        "spectrum estimation over a finite mu list is not defined; use a "
        "constant or lognormal schedule",
        field="mu_schedule",
    )
