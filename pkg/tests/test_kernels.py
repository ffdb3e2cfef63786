"""Compiled kernel vs pure-numpy fallback equivalence."""

import numpy as np
import pytest

from afchain import _accel_fallback as fallback
from afchain import accel


def _random_mats(seed, m, d, scale=0.5):
    rng = np.random.default_rng(seed)
    mats = scale * (
        rng.standard_normal((m, d, d)) + 1j * rng.standard_normal((m, d, d))
    )
    return np.ascontiguousarray(mats.astype(np.complex128))


requires_compiled = pytest.mark.skipif(
    accel.compiled is None, reason="compiled extension not built"
)


@requires_compiled
@pytest.mark.parametrize("renorm_period", [1, 3, 7])
def test_qr_accumulate_matches_fallback(renorm_period):
    mats = _random_mats(1, 200, 4)
    events = -(-200 // renorm_period)
    q1 = np.eye(4, dtype=np.complex128)
    q2 = np.eye(4, dtype=np.complex128)
    logs1 = np.zeros((events, 4))
    logs2 = np.zeros((events, 4))
    s1 = accel.compiled.qr_accumulate(mats.copy(), q1, logs1, renorm_period)
    s2 = fallback.qr_accumulate(mats.copy(), q2, logs2, renorm_period)
    assert s1 == s2 == -1
    np.testing.assert_allclose(logs1, logs2, atol=1e-12)
    np.testing.assert_allclose(q1, q2, atol=1e-12)


@requires_compiled
def test_qr_accumulate_reports_degenerate_event():
    mats = _random_mats(2, 10, 3)
    mats[4] = 0.0  # kills the frame at step 5
    for impl in (accel.compiled, fallback):
        q = np.eye(3, dtype=np.complex128)
        logs = np.zeros((10, 3))
        status = impl.qr_accumulate(mats.copy(), q, logs, 1)
        assert status == 4


def test_repair_frame_restores_orthonormality():
    rng = np.random.default_rng(3)
    q = np.zeros((3, 3), dtype=np.complex128)
    q[:, 0] = [1, 0, 0]
    lost = fallback.repair_frame(q, rng)
    assert sorted(lost) == [1, 2]
    np.testing.assert_allclose(q.conj().T @ q, np.eye(3), atol=1e-12)


@requires_compiled
def test_affine_accumulate_matches_fallback():
    rng = np.random.default_rng(4)
    m, d = 300, 3
    amats = _random_mats(5, m, d, scale=0.4)
    rvecs = np.ascontiguousarray(
        (rng.standard_normal((m, d)) + 1j * rng.standard_normal((m, d))).astype(
            np.complex128
        )
    )
    x1 = np.zeros(d, dtype=np.complex128)
    x1[0] = 1.0
    x2 = x1.copy()
    inc1 = np.zeros(m)
    inc2 = np.zeros(m)
    l1 = accel.compiled.affine_accumulate(amats, rvecs, x1, 0.0, inc1)
    l2 = fallback.affine_accumulate(amats, rvecs, x2, 0.0, inc2)
    np.testing.assert_allclose(l1, l2, atol=1e-10)
    np.testing.assert_allclose(inc1, inc2, atol=1e-10)
    np.testing.assert_allclose(x1, x2, atol=1e-10)


def test_affine_accumulate_tiny_state_branch():
    # a state starting below exp(-690) must recover through the shift
    amats = np.ascontiguousarray(0.5 * np.eye(2, dtype=np.complex128)[None, :, :])
    rvecs = np.ascontiguousarray(np.ones((1, 2), dtype=np.complex128))
    x = np.array([1.0, 0.0], dtype=np.complex128)
    inc = np.zeros(1)
    lognorm = fallback.affine_accumulate(amats, rvecs, x, -1000.0, inc)
    assert abs(lognorm - 0.5 * np.log(2.0)) < 1e-12  # ||(1,1)|| = sqrt(2)


def test_fallback_selected_by_env(monkeypatch):
    # accel.backend_name reflects the active implementation
    assert accel.backend_name() in ("compiled", "numpy")
