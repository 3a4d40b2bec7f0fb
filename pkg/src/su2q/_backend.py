"""Kernel selection for matrix-element evaluation.

The compiled extension is used when it imports; otherwise the numpy
fallback runs.  ``SU2Q_BACKEND=python`` forces the fallback and
``SU2Q_THREADS`` caps the number of worker threads used by the compiled
kernel (default 1).  Bands above ``_wigner_py.STABLE_SUM_TWO_L`` always use the
Euler-angle route, which avoids cancellation in the explicit sum.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import _wigner_py

try:  # pragma: no cover - depends on the build
    from . import _wigner_ext
except ImportError:  # pragma: no cover
    _wigner_ext = None

if os.environ.get("SU2Q_BACKEND", "auto").lower() == "python":
    _wigner_ext = None

BACKEND = "ext" if _wigner_ext is not None else "python"


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("SU2Q_THREADS", "1")))
    except ValueError:
        return 1


def _wigner_batch_ext(quats: np.ndarray, two_l: int) -> np.ndarray:
    quats = np.ascontiguousarray(quats, dtype=np.float64).reshape(-1, 4)
    n_nodes = quats.shape[0]
    dim = two_l + 1
    flat, coef, expo = _wigner_py.term_table(two_l)
    out = np.zeros((n_nodes, dim * dim), dtype=np.complex128)
    threads = min(thread_count(), max(1, n_nodes // 256))
    if threads == 1:
        _wigner_ext.wigner_range(quats, 0, n_nodes, two_l, flat, coef, expo, out)
    else:
        bounds = np.linspace(0, n_nodes, threads + 1).astype(int)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            jobs = [pool.submit(_wigner_ext.wigner_range, quats, int(lo), int(hi), two_l,
                                flat, coef, expo, out)
                    for lo, hi in zip(bounds[:-1], bounds[1:])]
            for job in jobs:
                job.result()
    return out.reshape(n_nodes, dim, dim)


def wigner_batch(quats: np.ndarray, two_l: int) -> np.ndarray:
    """Matrices t^l(g) for each quaternion row, using the selected kernel."""
    if two_l < 0:
        raise ValueError(f"two_l must be non-negative, got {two_l}")
    if two_l > _wigner_py.STABLE_SUM_TWO_L:
        return _wigner_py.wigner_euler(quats, two_l)
    if _wigner_ext is None:
        return _wigner_py.wigner_batch(quats, two_l)
    return _wigner_batch_ext(quats, two_l)
