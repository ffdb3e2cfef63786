"""Pure-numpy fallbacks for the compiled accumulation kernels.

Semantics match ``afchain._accel`` exactly; only speed differs. Both operate
on complex128 arrays. Object-dtype (big-float) frames are handled by the
generic path in :mod:`afchain.rds`, not here.
"""

from __future__ import annotations

import numpy as np

# Diagonal entries of R at or below this are treated as a lost direction.
TINY = 1e-300
LOG_TINY = np.log(TINY)


def qr_accumulate(mats, q, logs, renorm_period):
    """Multiply `mats` into the frame `q`, orthonormalizing every
    `renorm_period` steps and recording log diag(R) per event.

    Returns the index of the first event whose QR hit a numerically lost
    direction, or -1. On a degenerate event the frame is left as the raw
    (non-orthonormalized) accumulated product for the caller to repair;
    `logs` rows from that event on are untouched.
    """
    m = mats.shape[0]
    d = q.shape[0]
    event = 0
    for t in range(m):
        q[:] = mats[t] @ q
        last = t == m - 1
        if (t + 1) % renorm_period == 0 or last:
            # modified Gram-Schmidt, columns left to right
            for j in range(d):
                v = q[:, j]
                for i in range(j):
                    v -= (q[:, i].conj() @ v) * q[:, i]
                nrm = np.linalg.norm(v)
                if nrm <= TINY:
                    return event
                logs[event, j] = np.log(nrm)
                v /= nrm
            event += 1
    return -1


def repair_frame(q, rng):
    """Re-orthonormalize `q`, replacing numerically dead directions with
    fresh random ones. Returns the list of replaced column indices."""
    d = q.shape[0]
    lost = []
    for j in range(d):
        v = q[:, j]
        for i in range(j):
            v -= (q[:, i].conj() @ v) * q[:, i]
        nrm = np.linalg.norm(v)
        if nrm <= TINY:
            lost.append(j)
            while True:
                v[:] = rng.standard_normal(d) + 1j * rng.standard_normal(d)
                for i in range(j):
                    v -= (q[:, i].conj() @ v) * q[:, i]
                nrm = np.linalg.norm(v)
                if nrm > TINY:
                    break
        v /= nrm
    return lost


def affine_accumulate(amats, rvecs, xhat, lognorm, increments):
    """Iterate x -> A x + r in renormalized form.

    `xhat` is the unit state (updated in place), `lognorm` the accumulated
    log norm; per-step increments of the log norm are written to
    `increments`. Returns the updated lognorm.
    """
    m = amats.shape[0]
    for t in range(m):
        if lognorm > -690.0:
            w = amats[t] @ xhat + np.exp(-lognorm) * rvecs[t]
            nrm = np.linalg.norm(w)
            step = np.log(nrm)
        else:
            # state still astronomically small: bring the shift in unscaled
            w = np.exp(lognorm) * (amats[t] @ xhat) + rvecs[t]
            nrm = np.linalg.norm(w)
            step = np.log(nrm) - lognorm
        increments[t] = step
        lognorm += step
        xhat[:] = w / nrm
    return lognorm
