"""Per-atom Monte Carlo kernel, compiled with numba or vectorized with numpy.

Each atom gets a uint8 outcome code. The geometry (whether the probe point
lies inside the pre-collapse window) and the two excitation probabilities are
the same for every atom and are resolved by the caller.
"""
from __future__ import annotations

import numpy as np

from .. import _accel
from . import _rng
from ._rng import (
    DRAW_DECAY,
    DRAW_EFFICIENCY,
    DRAW_EMIT_SIDE,
    DRAW_EXCITE,
    DRAW_SIDE,
    atom_state,
    draw,
)

DETECTED_R = np.uint8(1)
EXCITED = np.uint8(2)
EMITTED = np.uint8(4)
EMITTED_R = np.uint8(8)
PRECOLLAPSED = np.uint8(16)


def simulate_block_numpy(key, start, count, geom_collapsed, efficiency,
                         p_coherent, p_collapsed, p_decay):
    atoms = np.arange(start, start + count, dtype=np.uint64)
    state = atom_state(np.uint64(key), atoms)
    right = draw(state, _rng.SALTS[DRAW_SIDE]) >= 0.5
    if geom_collapsed:
        pre = draw(state, _rng.SALTS[DRAW_EFFICIENCY]) < efficiency
    else:
        pre = np.zeros(count, dtype=bool)
    p = np.where(pre, p_collapsed, p_coherent)
    excited = draw(state, _rng.SALTS[DRAW_EXCITE]) < p
    emitted = excited & (draw(state, _rng.SALTS[DRAW_DECAY]) < p_decay)
    emit_right = np.where(pre, right, draw(state, _rng.SALTS[DRAW_EMIT_SIDE]) >= 0.5) & emitted

    codes = right.astype(np.uint8)
    codes |= excited.astype(np.uint8) << 1
    codes |= emitted.astype(np.uint8) << 2
    codes |= emit_right.astype(np.uint8) << 3
    codes |= pre.astype(np.uint8) << 4
    return codes


if _accel.HAVE_NUMBA:
    import os

    import numba

    if "NUMBA_THREADING_LAYER" not in os.environ:
        # tbb first only warns when the installed tbb is too old
        numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

    _mix64 = numba.njit(inline="always")(_rng.mix64)
    _SALTS = _rng.SALTS

    @numba.njit(inline="always")
    def _draw(state, slot):
        return (_mix64(state ^ _SALTS[slot]) >> _rng.S11) * _rng.INV_2_53

    @numba.njit(parallel=True, cache=True)
    def _simulate_block_jit(key, start, count, geom_collapsed, efficiency,
                            p_coherent, p_collapsed, p_decay, out):
        for i in numba.prange(count):
            state = _mix64(key + (start + np.uint64(i)) * _rng.GOLDEN)
            right = _draw(state, DRAW_SIDE) >= 0.5
            pre = False
            if geom_collapsed:
                pre = _draw(state, DRAW_EFFICIENCY) < efficiency
            p = p_collapsed if pre else p_coherent
            code = 0
            if right:
                code |= 1
            if pre:
                code |= 16
            if _draw(state, DRAW_EXCITE) < p:
                code |= 2
                if _draw(state, DRAW_DECAY) < p_decay:
                    code |= 4
                    if pre:
                        emit_right = right
                    else:
                        emit_right = _draw(state, DRAW_EMIT_SIDE) >= 0.5
                    if emit_right:
                        code |= 8
            out[i] = code

    def simulate_block_numba(key, start, count, geom_collapsed, efficiency,
                             p_coherent, p_collapsed, p_decay, threads=None):
        out = np.empty(count, dtype=np.uint8)
        if threads is not None:
            numba.set_num_threads(threads)
        _simulate_block_jit(np.uint64(key), np.uint64(start), count, bool(geom_collapsed),
                            float(efficiency), float(p_coherent), float(p_collapsed),
                            float(p_decay), out)
        return out
else:  # pragma: no cover
    simulate_block_numba = None


def simulate_block(key, start, count, geom_collapsed, efficiency,
                   p_coherent, p_collapsed, p_decay, backend=None, threads=None):
    """Outcome codes for atoms ``start .. start+count-1``."""
    backend = backend or _accel.backend_name()
    if backend == "numba":
        if simulate_block_numba is None:
            raise RuntimeError("numba backend requested but numba is not installed")
        return simulate_block_numba(key, start, count, geom_collapsed, efficiency,
                                    p_coherent, p_collapsed, p_decay, threads)
    if backend != "numpy":
        raise ValueError(f"unknown backend {backend!r}")
    return simulate_block_numpy(key, start, count, geom_collapsed, efficiency,
                                p_coherent, p_collapsed, p_decay)
