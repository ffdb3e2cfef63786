"""Random-matrix-product machinery: Lyapunov spectrum estimation by QR
accumulation, the affine-to-linear lift, and renormalized affine iteration.

Magnitudes never leave the log domain, so arbitrarily long products neither
overflow nor underflow. Matrix processes are i.i.d. up to a positive
per-step scalar; draws must satisfy E log+ ||A_1|| < infinity (asserted by
the caller).
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import accel
from .precision import fro_norm, is_big, qr_decompose
from .sampling import sample_complex_gaussian

log = logging.getLogger(__name__)


class MatrixProcess:
    """Sequence of d x d random complex matrices, drawn by step index.

    Subclasses implement ``draw_batch``; ``draw`` is a convenience view.
    Batches are complex128 unless the process is explicitly big-float
    (object dtype), in which case estimation takes the generic path.
    """

    dim: int

    def draw_batch(self, start: int, count: int, rng) -> np.ndarray:
        raise NotImplementedError

    def draw(self, index: int, rng) -> np.ndarray:
        return self.draw_batch(index, 1, rng)[0]


class ConstantProcess(MatrixProcess):
    def __init__(self, matrix):
        self.matrix = np.asarray(matrix, dtype=np.complex128)
        self.dim = self.matrix.shape[0]

    def draw_batch(self, start, count, rng):
        return np.broadcast_to(self.matrix, (count, self.dim, self.dim)).copy()


class DiagonalProcess(ConstantProcess):
    def __init__(self, values):
        super().__init__(np.diag(np.asarray(values, dtype=np.complex128)))


class ScaledGaussianProcess(MatrixProcess):
    """A_i = scale(i) * H_i with H_i i.i.d. complex Gaussian entries CN(0, mu)."""

    def __init__(self, dim, scale=1.0, mu=1.0):
        self.dim = dim
        self.mu = float(mu)
        self.scale = scale if callable(scale) else (lambda i, s=float(scale): s)

    def draw_batch(self, start, count, rng):
        h = sample_complex_gaussian(self.mu, rng, size=(count, self.dim, self.dim))
        s = np.array([self.scale(start + t) for t in range(count)])
        return h * s[:, None, None]


class VectorProcess:
    """Sequence of random d-vectors (the additive part of an affine system)."""

    dim: int

    def draw_batch(self, start: int, count: int, rng) -> np.ndarray:
        raise NotImplementedError

    def draw(self, index: int, rng) -> np.ndarray:
        return self.draw_batch(index, 1, rng)[0]


class GaussianVectorProcess(VectorProcess):
    def __init__(self, dim, variance=1.0):
        self.dim = dim
        self.variance = float(variance)

    def draw_batch(self, start, count, rng):
        return sample_complex_gaussian(self.variance, rng, size=(count, self.dim))


class ScaledVectorProcess(VectorProcess):
    """c * base: used to check that lifted spectra ignore the shift's scale."""

    def __init__(self, base: VectorProcess, factor: float):
        self.base = base
        self.factor = factor
        self.dim = base.dim

    def draw_batch(self, start, count, rng):
        return self.factor * self.base.draw_batch(start, count, rng)


@dataclass(frozen=True)
class AffineSystem:
    """x -> A x + r with sign-symmetric, almost-surely nonzero r."""

    matrix: MatrixProcess
    shift: VectorProcess
    sign_symmetric: bool = True

    def __post_init__(self):
        if self.matrix.dim != self.shift.dim:
            raise ValueError(
                f"dimension mismatch between matrix ({self.matrix.dim}) "
                f"and shift ({self.shift.dim}) draws"
            )


class LiftedProcess(MatrixProcess):
    """(d+1)-dimensional linear embedding [[A, r], [0, a]] of an affine system.

    Its Lyapunov spectrum is {lambda_A,i} union {log a}, independent of the
    statistics of r.
    """

    def __init__(self, system: AffineSystem, a_value: float = 1.0):
        self.system = system
        self.a_value = float(a_value)
        self.dim = system.matrix.dim + 1

    def draw_batch(self, start, count, rng):
        d = self.system.matrix.dim
        amats = self.system.matrix.draw_batch(start, count, rng)
        rvecs = self.system.shift.draw_batch(start, count, rng)
        if amats.shape != (count, d, d) or rvecs.shape != (count, d):
            raise ValueError(
                f"dimension mismatch between A draws {amats.shape} and "
                f"r draws {rvecs.shape}"
            )
        out = np.zeros((count, d + 1, d + 1), dtype=np.complex128)
        out[:, :d, :d] = amats
        out[:, :d, d] = rvecs
        out[:, d, d] = self.a_value
        return out


def lift_affine(system: AffineSystem, a_value: float = 1.0) -> LiftedProcess:
    return LiftedProcess(system, a_value)


@dataclass
class LyapunovSpectrum:
    """Ordered exponent estimates with batch-means standard errors."""

    exponents: np.ndarray
    stderr: np.ndarray
    steps_used: int
    method: str  # "closed-form" | "qr-estimate"
    frame_restarts: int = 0

    def __post_init__(self):
        self.exponents = np.asarray(self.exponents, dtype=float)
        self.stderr = np.asarray(self.stderr, dtype=float)


DEFAULT_BATCHES = 20


def _check_log_moment(probe: np.ndarray) -> None:
    # finite-sample stand-in for E log+ ||A_1|| < infinity: a handful of
    # draws must have finite norms
    for k in range(probe.shape[0]):
        nrm = float(fro_norm(probe[k]))
        if not math.isfinite(nrm):
            raise ValueError(
                "process draws have non-finite norm; the log-moment "
                "condition cannot hold"
            )


def estimate_spectrum(
    proc: MatrixProcess,
    steps: int,
    renorm_period: int = 1,
    rng: np.random.Generator | None = None,
    *,
    batches: int = DEFAULT_BATCHES,
    chunk: int = 4096,
) -> LyapunovSpectrum:
    """Full Lyapunov spectrum of the matrix product by QR accumulation.

    Keeps an orthonormal frame, re-orthonormalizes every `renorm_period`
    steps, and averages log diag(R). The initial frame is the identity.
    Numerically lost directions are re-randomized (counted in
    ``frame_restarts``, with their event logs floored at log(1e-300)).
    """
    d = proc.dim
    if rng is None:
        rng = np.random.default_rng()
    if steps < 10 * d:
        raise ValueError(f"steps must be >= 10*d = {10 * d}, got {steps}")
    if renorm_period < 1:
        raise ValueError(f"renorm_period must be >= 1, got {renorm_period}")

    # dtype probe on a throwaway generator; the caller's stream is untouched
    probe = proc.draw_batch(0, 8, np.random.default_rng(0))
    big = is_big(probe)
    _check_log_moment(probe)
    if big:
        return _estimate_generic(proc, steps, renorm_period, rng, batches)

    chunk = max(renorm_period, (chunk // renorm_period) * renorm_period)
    q = np.eye(d, dtype=np.complex128)
    n_events = -(-steps // renorm_period)
    logs = np.empty((n_events, d))
    event_steps = np.full(n_events, renorm_period, dtype=np.int64)
    if steps % renorm_period:
        event_steps[-1] = steps % renorm_period

    restarts = 0
    done = 0
    event_base = 0
    while done < steps:
        count = min(chunk, steps - done)
        mats = np.ascontiguousarray(proc.draw_batch(done, count, rng))
        chunk_events = -(-count // renorm_period)
        view = logs[event_base : event_base + chunk_events]
        offset = 0
        while True:
            status = accel.qr_accumulate(mats[offset:], q, view, renorm_period)
            if status == -1:
                break
            # a direction died inside event `status`: floor it and restart
            restarts += 1
            lost = accel.repair_frame(q, rng)
            view[status, :] = accel.LOG_TINY
            log.warning(
                "spectrum estimator restarted %d frame direction(s) at step ~%d",
                len(lost),
                done + (status + 1) * renorm_period,
            )
            warnings.warn(
                "degenerate frame during spectrum estimation; "
                f"re-randomized {len(lost)} direction(s)",
                RuntimeWarning,
                stacklevel=2,
            )
            consumed = (status + 1) * renorm_period
            offset += min(consumed, mats.shape[0] - offset)
            view = view[status + 1 :]
            if offset >= mats.shape[0] or view.shape[0] == 0:
                break
        done += count
        event_base += chunk_events

    return _spectrum_from_logs(logs, event_steps, steps, batches, restarts)


def _estimate_generic(proc, steps, renorm_period, rng, batches):
    # big-float path: per-event QR through the generic factorization
    d = proc.dim
    from .precision import PrecisionConfig  # local to avoid import cycle noise

    q = PrecisionConfig("big").eye(d)
    n_events = -(-steps // renorm_period)
    logs = np.empty((n_events, d))
    event_steps = np.full(n_events, renorm_period, dtype=np.int64)
    if steps % renorm_period:
        event_steps[-1] = steps % renorm_period
    import mpmath as mp

    event = 0
    t = 0
    while t < steps:
        span = min(renorm_period, steps - t)
        for s in range(span):
            q = np.dot(proc.draw(t + s, rng), q)
        qq, rr = qr_decompose(q)
        q = qq
        logs[event] = [float(mp.log(rr[j, j].real)) for j in range(d)]
        event += 1
        t += span
    return _spectrum_from_logs(logs, event_steps, steps, batches, 0)


def _spectrum_from_logs(logs, event_steps, steps, batches, restarts):
    d = logs.shape[1]
    exponents = logs.sum(axis=0) / steps

    n_events = logs.shape[0]
    b = max(1, min(batches, n_events))
    bounds = np.linspace(0, n_events, b + 1, dtype=int)
    rates = np.empty((b, d))
    for k in range(b):
        sl = slice(bounds[k], bounds[k + 1])
        span = event_steps[sl].sum()
        rates[k] = logs[sl].sum(axis=0) / max(span, 1)
    if b > 1:
        stderr = rates.std(axis=0, ddof=1) / np.sqrt(b)
    else:
        stderr = np.zeros(d)

    order = np.argsort(-exponents, kind="stable")
    return LyapunovSpectrum(
        exponents=exponents[order],
        stderr=stderr[order],
        steps_used=int(steps),
        method="qr-estimate",
        frame_restarts=restarts,
    )


def affine_top_exponent_with_stderr(
    system: AffineSystem,
    x0: np.ndarray,
    steps: int,
    rng: np.random.Generator,
    *,
    batches: int = DEFAULT_BATCHES,
    chunk: int = 4096,
) -> tuple[float, float]:
    """(1/n) log ||x_n|| for the iterated affine recursion, with batch-means
    standard error. The state is stored as a unit vector plus accumulated
    log norm, so trajectories of any length stay representable."""
    x0 = np.asarray(x0, dtype=np.complex128)
    d = system.matrix.dim
    if x0.shape != (d,):
        raise ValueError(f"x0 must have shape ({d},), got {x0.shape}")
    nrm0 = np.linalg.norm(x0)
    if nrm0 == 0:
        raise ValueError("x0 must be nonzero")
    if steps < 1:
        raise ValueError("steps must be >= 1")

    xhat = (x0 / nrm0).astype(np.complex128)
    lognorm = float(np.log(nrm0))
    log0 = lognorm
    increments = np.empty(steps)
    done = 0
    while done < steps:
        count = min(chunk, steps - done)
        amats = np.ascontiguousarray(system.matrix.draw_batch(done, count, rng))
        rvecs = np.ascontiguousarray(system.shift.draw_batch(done, count, rng))
        lognorm = accel.affine_accumulate(
            amats, rvecs, xhat, lognorm, increments[done : done + count]
        )
        done += count

    value = (lognorm - log0) / steps
    b = max(1, min(batches, steps))
    bounds = np.linspace(0, steps, b + 1, dtype=int)
    rates = np.array(
        [increments[bounds[k] : bounds[k + 1]].mean() for k in range(b)]
    )
    stderr = rates.std(ddof=1) / np.sqrt(b) if b > 1 else 0.0
    return float(value), float(stderr)


def affine_top_exponent(system, x0, steps, rng) -> float:
    """See :func:`affine_top_exponent_with_stderr`."""
    return affine_top_exponent_with_stderr(system, x0, steps, rng)[0]
