"""Kernel selection: compiled extension when importable, numpy fallback otherwise.

Set AFCHAIN_NO_ACCEL=1 to force the fallback (the benchmark and the
equivalence tests exercise both through the module-level handles).
"""

from __future__ import annotations

import os

from . import _accel_fallback as fallback

try:
    from . import _accel as compiled
except ImportError:  # extension not built
    compiled = None

USE_COMPILED = compiled is not None and not os.environ.get("AFCHAIN_NO_ACCEL")

_active = compiled if USE_COMPILED else fallback

qr_accumulate = _active.qr_accumulate
affine_accumulate = _active.affine_accumulate
repair_frame = fallback.repair_frame
TINY = fallback.TINY
LOG_TINY = fallback.LOG_TINY


def backend_name() -> str:
    return "compiled" if USE_COMPILED else "numpy"
