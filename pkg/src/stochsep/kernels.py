"""Kernel selection: compiled scan loops when available, pure Python otherwise.

The compiled extension only covers the hot path that dominates benchmark
runtime: float-mode, unipoint, scan-strategy candidate evaluation.  Exact
mode and dependence-carrying datasets always use the generic engine code.
Set STOCHSEP_PURE=1 to force the pure path (used by the benchmark harness
to compare both).
"""

from __future__ import annotations

import os

import numpy as np

try:
    from . import _kernels as _impl
    HAVE_COMPILED = True
except ImportError:
    _impl = None
    HAVE_COMPILED = False


def force_pure() -> bool:
    return os.environ.get("STOCHSEP_PURE", "") == "1"


def compiled_active() -> bool:
    return HAVE_COMPILED and not force_pure()


MAX_KERNEL_DIMENSION = 8  # stack-array bound compiled into the extension


def kernel_applicable(dataset, ctx, strategy, threads) -> bool:
    return (compiled_active()
            and not ctx.exact
            and strategy == "scan"
            and threads == 1
            and dataset.dimension <= MAX_KERNEL_DIMENSION
            and all(u.kind == "point" for u in dataset.units))


def _arrays(dataset, drop):
    from .model import RED
    locs = dataset.locations
    coords = np.array([[float(c) for c in l.coords[drop:]] for l in locs],
                      dtype=np.float64)
    probs = np.array([float(l.prob) for l in locs], dtype=np.float64)
    is_red = np.array([1 if l.color == RED else 0 for l in locs], dtype=np.uint8)
    return coords, probs, is_red


def level_tau_sum(dataset, drop, eps):
    """Sum of candidate charges at one projection level (float, unipoint)."""
    coords, probs, is_red = _arrays(dataset, drop)
    status, total, count = _impl.level_tau_sum(coords, probs, is_red, eps)
    if status != 0:
        from .position import PositionError
        raise PositionError("projection-level degeneracy detected in kernel scan")
    return total, count
