"""Configurable-precision complex linear algebra.

Two scalar backends share one API: native double (numpy complex128, LAPACK
fast paths) and big-float (numpy object arrays of mpmath mpc scalars).
Dispatch is by dtype: object arrays take the generic pure-Python routes,
complex128 arrays take the vectorized ones. Big-float work should run inside
``PrecisionConfig.workspace()`` so mpmath carries the requested precision.
"""

from __future__ import annotations

import contextlib
import math
from dataclasses import dataclass

import mpmath as mp
import numpy as np
import scipy.linalg

from .errors import (
    ConfigError,
    DegenerateFactorizationError,
    NonHermitianError,
    NotPositiveDefiniteError,
)

# Extra decimal digits carried beyond the requested precision.
GUARD_DIGITS = 5
# Effective decimal digits of IEEE double, used in stopping rules.
DOUBLE_DIGITS = 16

BACKEND_DOUBLE = "double"
BACKEND_BIG = "big"


@dataclass(frozen=True)
class PrecisionConfig:
    """Scalar backend selector: native double or big-float with `digits`."""

    backend: str = BACKEND_DOUBLE
    digits: int = 100

    def __post_init__(self):
        if self.backend not in (BACKEND_DOUBLE, BACKEND_BIG):
            raise ConfigError(
                f"unknown backend {self.backend!r}", field="precision.backend"
            )
        if self.backend == BACKEND_BIG and self.digits < 16:
            raise ConfigError(
                f"big-float backend needs digits >= 16, got {self.digits}",
                field="precision.digits",
            )

    @property
    def is_double(self) -> bool:
        return self.backend == BACKEND_DOUBLE

    def workspace(self):
        """Context manager pinning mpmath to this precision (no-op for double)."""
        if self.is_double:
            return contextlib.nullcontext()
        return mp.workdps(self.digits + GUARD_DIGITS)

    def lift(self, a: np.ndarray) -> np.ndarray:
        """Lift a float64/complex128 array into this backend's scalar type.

        float64 values convert to mpf exactly, so both backends see the
        identical realization of any random draw.
        """
        a = np.asarray(a)
        if self.is_double:
            return a.astype(np.complex128)
        out = np.empty(a.shape, dtype=object)
        flat_in = a.ravel()
        flat_out = out.ravel()
        for i, z in enumerate(flat_in):
            z = complex(z)
            flat_out[i] = mp.mpc(z.real, z.imag)
        return out

    def eye(self, d: int) -> np.ndarray:
        if self.is_double:
            return np.eye(d, dtype=np.complex128)
        out = np.full((d, d), mp.mpc(0), dtype=object)
        for i in range(d):
            out[i, i] = mp.mpc(1)
        return out


def is_big(a: np.ndarray) -> bool:
    return a.dtype == object


def active_digits(a: np.ndarray) -> int:
    return mp.mp.dps if is_big(a) else DOUBLE_DIGITS


def conj_t(a: np.ndarray) -> np.ndarray:
    return np.conjugate(a.T)


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if is_big(a) or is_big(b):
        return np.dot(a, b)
    return a @ b


def abs2(z):
    if isinstance(z, mp.mpc):
        return z.real * z.real + z.imag * z.imag
    if isinstance(z, mp.mpf):
        return z * z
    return z.real * z.real + z.imag * z.imag


def fro_norm(a: np.ndarray):
    if not is_big(a):
        return float(np.linalg.norm(a))
    total = mp.mpf(0)
    for z in a.ravel():
        total += abs2(z)
    return mp.sqrt(total)


def vec_norm(v: np.ndarray):
    return fro_norm(v)


def to_float_array(a: np.ndarray) -> np.ndarray:
    """Round to complex128 (big-float values lose precision, deliberately)."""
    if not is_big(a):
        return np.asarray(a, dtype=np.complex128)
    out = np.empty(a.shape, dtype=np.complex128)
    flat_in = a.ravel()
    flat_out = out.ravel()
    for i, z in enumerate(flat_in):
        flat_out[i] = complex(z)
    return out


def _sqrt(x, big: bool):
    return mp.sqrt(x) if big else math.sqrt(x)


def scalar_log(x):
    if isinstance(x, (mp.mpf, mp.mpc)):
        return mp.log(x)
    return math.log(x)


def qr_decompose(a: np.ndarray):
    """Thin QR with positive real diagonal of R (unique for full-rank input).

    Raises DegenerateFactorizationError (with the offending column) when a
    diagonal entry falls below d * eps * ||A||_F.
    """
    a = np.asarray(a)
    d = a.shape[0]
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"qr_decompose expects a square matrix, got {a.shape}")
    if is_big(a):
        return _qr_mgs(a)
    q, r = np.linalg.qr(a)
    diag = np.diagonal(r).copy()
    tol = d * np.finfo(np.float64).eps * float(np.linalg.norm(a))
    small = np.abs(diag) <= tol
    if small.any():
        raise DegenerateFactorizationError(int(np.argmax(small)))
    phases = diag / np.abs(diag)
    q = q * phases[np.newaxis, :]
    r = r * np.conjugate(phases)[:, np.newaxis]
    return q, r


def _qr_mgs(a: np.ndarray):
    # Modified Gram-Schmidt with one reorthogonalization pass; the column
    # norms land on the diagonal, so diag(R) > 0 comes for free.
    d = a.shape[0]
    scale = fro_norm(a)
    tol = d * mp.mpf(10) ** (-mp.mp.dps) * scale
    q = np.empty((d, d), dtype=object)
    r = np.full((d, d), mp.mpc(0), dtype=object)
    for j in range(d):
        v = a[:, j].copy()
        for _ in range(2):
            for i in range(j):
                c = np.dot(np.conjugate(q[:, i]), v)
                r[i, j] += c
                v = v - c * q[:, i]
        nrm = vec_norm(v)
        if nrm <= tol:
            raise DegenerateFactorizationError(j)
        r[j, j] = mp.mpc(nrm)
        q[:, j] = v / nrm
    return q, r


def cholesky(a: np.ndarray) -> np.ndarray:
    """Lower-triangular L with L L^H = A for Hermitian positive definite A."""
    a = np.asarray(a)
    d = a.shape[0]
    big = is_big(a)
    if big:
        zero = mp.mpc(0)
        l = np.full((d, d), zero, dtype=object)
    else:
        l = np.zeros((d, d), dtype=np.complex128)
    for j in range(d):
        s = a[j, j].real - sum(abs2(l[j, k]) for k in range(j))
        s = s if big else float(s)
        if not s > 0:
            raise NotPositiveDefiniteError(j)
        ljj = _sqrt(s, big)
        l[j, j] = mp.mpc(ljj) if big else complex(ljj)
        for i in range(j + 1, d):
            acc = a[i, j]
            for k in range(j):
                acc = acc - l[i, k] * np.conjugate(l[j, k])
            l[i, j] = acc / ljj
    return l


def solve_lower(l: np.ndarray, b: np.ndarray) -> np.ndarray:
    """L^{-1} B by forward substitution (B may be a matrix or vector)."""
    if not is_big(l) and not is_big(b):
        return scipy.linalg.solve_triangular(l, b, lower=True)
    d = l.shape[0]
    b = np.atleast_2d(b.T).T if b.ndim == 1 else b
    x = np.empty_like(b)
    for col in range(b.shape[1]):
        for i in range(d):
            acc = b[i, col]
            for k in range(i):
                acc = acc - l[i, k] * x[k, col]
            x[i, col] = acc / l[i, i]
    return x


def whiten(l: np.ndarray, a: np.ndarray) -> np.ndarray:
    """L^{-1} A L^{-H}: congruence mapping generalized to ordinary spectra."""
    y = solve_lower(l, a)
    return conj_t(solve_lower(l, conj_t(y)))


@dataclass
class EigenDecomposition:
    """Descending eigenvalues and the matching unitary column eigenvectors."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def hermitian_asymmetry(a: np.ndarray) -> float:
    nrm = fro_norm(a)
    if float(nrm) == 0.0:
        return 0.0
    return float(fro_norm(a - conj_t(a)) / nrm)


def eig_hermitian(a: np.ndarray, *, asym_tol: float = 1e-8) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending.

    Double input goes through LAPACK; big-float input through the cyclic
    Jacobi solver below.
    """
    a = np.asarray(a)
    asym = hermitian_asymmetry(a)
    if asym > asym_tol:
        raise NonHermitianError(asym)
    a = (a + conj_t(a)) * (mp.mpf("0.5") if is_big(a) else 0.5)
    if not is_big(a):
        vals, vecs = np.linalg.eigh(a)
        order = np.arange(len(vals))[::-1]
        return EigenDecomposition(vals[order].astype(float), vecs[:, order])
    vals, vecs = jacobi_eigh(a)
    return EigenDecomposition(vals, vecs)


def jacobi_eigh(a: np.ndarray, *, relative: bool = False, max_sweeps: int = 100):
    """Cyclic Jacobi eigensolver for Hermitian matrices of either backend.

    Stopping rule: off-diagonal Frobenius mass below ||A||_F * 10^(4-digits)
    by default, or (relative=True) every |a_pq| below
    10^(4-digits) * sqrt(a_pp a_qq). The relative rule preserves the high
    relative accuracy of small eigenvalues of diagonally graded positive
    definite matrices; the absolute rule matches general Hermitian input.
    Equal eigenvalues keep a stable order by original index.
    """
    a = np.asarray(a)
    big = is_big(a)
    d = a.shape[0]
    if big:
        a = a.copy()
        v = np.full((d, d), mp.mpc(0), dtype=object)
        for i in range(d):
            v[i, i] = mp.mpc(1)
        one = mp.mpf(1)
    else:
        a = a.astype(np.complex128).copy()
        v = np.eye(d, dtype=np.complex128)
        one = 1.0
    digits = active_digits(a)
    stop = (mp.mpf(10) if big else 10.0) ** (4 - digits)
    fro0 = fro_norm(a)
    if d == 1 or float(fro0) == 0.0:
        vals = np.array([a[i, i].real for i in range(d)], dtype=object if big else float)
        return vals, v

    def off_mass():
        total = one - one
        for p in range(d):
            for q in range(p + 1, d):
                total += 2 * abs2(a[p, q])
        return _sqrt(total, big)

    def converged():
        if not relative:
            return off_mass() <= stop * fro0
        for p in range(d):
            for q in range(p + 1, d):
                gate = stop * _sqrt(abs(a[p, p].real * a[q, q].real), big)
                if abs(a[p, q]) > gate:
                    return False
        return True

    for _ in range(max_sweeps):
        if converged():
            break
        for p in range(d):
            for q in range(p + 1, d):
                apq = a[p, q]
                m = abs(apq)
                if relative:
                    gate = stop * _sqrt(abs(a[p, p].real * a[q, q].real), big)
                else:
                    gate = stop * fro0 / (d * d)
                if m <= gate:
                    continue
                e = apq / m
                tau = (a[q, q].real - a[p, p].real) / (2 * m)
                sign = one if tau >= 0 else -one
                hyp = mp.hypot(one, tau) if big else math.hypot(1.0, tau)
                t = sign / (abs(tau) + hyp)
                c = one / _sqrt(one + t * t, big)
                s = t * c
                ec = np.conjugate(e)
                # rows p, q of U^H A
                rp = c * a[p, :] - (s * e) * a[q, :]
                rq = (s * ec) * a[p, :] + c * a[q, :]
                a[p, :], a[q, :] = rp, rq
                # columns p, q of (U^H A) U
                cp = c * a[:, p] - (s * ec) * a[:, q]
                cq = (s * e) * a[:, p] + c * a[:, q]
                a[:, p], a[:, q] = cp, cq
                a[p, q] = 0 * a[p, q]
                a[q, p] = 0 * a[q, p]
                cp = c * v[:, p] - (s * ec) * v[:, q]
                cq = (s * e) * v[:, p] + c * v[:, q]
                v[:, p], v[:, q] = cp, cq
    else:
        raise ArithmeticError("Jacobi eigensolver failed to converge")

    diag = [a[i, i].real for i in range(d)]
    # stable sort: equal eigenvalues keep original index order
    order = sorted(range(d), key=lambda i: -float(diag[i]))
    if big:
        vals = np.array([diag[i] for i in order], dtype=object)
    else:
        vals = np.array([float(diag[i]) for i in order])
    return vals, v[:, order]
