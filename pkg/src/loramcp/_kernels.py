"""Hot per-frame interference reduction: numba kernel with a numpy fallback.

The fallback is selected by setting LORAMCP_DISABLE_NUMBA=1 (or automatically
when numba is not importable).  Both lanes evaluate the same arithmetic, so
they differ only in float summation order; benchmarks/kernel_bench.py compares
their throughput.
"""

from __future__ import annotations

import os

import numpy as np

ENV_FLAG = "LORAMCP_DISABLE_NUMBA"


def numba_enabled() -> bool:
    if os.environ.get(ENV_FLAG, "0") == "1":
        return False
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


def frame_interference_numpy(coef, lq, idx, t, g, l_q0: float) -> float:
    """Sum over active interferers of coef * h(t) * g, vectorised."""
    if len(idx) == 0:
        return 0.0
    lqa = lq[idx]
    ov = np.minimum(l_q0, t + lqa) - np.maximum(0.0, t)
    h = np.maximum(ov, 0.0) / l_q0
    return float(np.sum(coef[idx] * h * g))


_jit_kernel = None


def _get_jit_kernel():
    global _jit_kernel
    if _jit_kernel is None:
        from numba import njit

        @njit(cache=True, nogil=True)
        def _kernel(coef, lq, idx, t, g, l_q0):
            acc = 0.0
            for j in range(idx.shape[0]):
                i = idx[j]
                ov = min(l_q0, t[j] + lq[i]) - max(0.0, t[j])
                if ov > 0.0:
                    acc += coef[i] * (ov / l_q0) * g[j]
            return acc

        _jit_kernel = _kernel
    return _jit_kernel


def frame_interference(coef, lq, idx, t, g, l_q0: float, use_numba: bool | None = None) -> float:
    if use_numba is None:
        use_numba = numba_enabled()
    if use_numba:
        return float(_get_jit_kernel()(coef, lq, idx, t, g, l_q0))
    return frame_interference_numpy(coef, lq, idx, t, g, l_q0)


def warm_up(use_numba: bool | None = None) -> None:
    """Trigger JIT compilation before forking worker processes."""
    if use_numba is None:
        use_numba = numba_enabled()
    if use_numba:
        z = np.zeros(1)
        _get_jit_kernel()(z, z, np.zeros(1, dtype=np.int64), z, z, 1.0)
