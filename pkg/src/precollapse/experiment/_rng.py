"""Counter-based uniforms keyed on (master seed, atom index, draw index).

The mixer is the splitmix64 finalizer. The same functions run on numpy uint64
arrays and, compiled, inside the numba kernel; ``uniform_scalar`` is an
independent pure-int version used by the per-atom reference path.
"""
from __future__ import annotations

import numpy as np

M1 = np.uint64(0xBF58476D1CE4E5B9)
M2 = np.uint64(0x94D049BB133111EB)
GOLDEN = np.uint64(0x9E3779B97F4A7C15)
GAMMA = np.uint64(0xD1B54A32D192ED03)
S30 = np.uint64(30)
S27 = np.uint64(27)
S31 = np.uint64(31)
S11 = np.uint64(11)
INV_2_53 = 1.0 / 9007199254740992.0
_MASK = (1 << 64) - 1


# draw slots per atom
DRAW_SIDE = 0
DRAW_EFFICIENCY = 1
DRAW_EXCITE = 2
DRAW_DECAY = 3
DRAW_EMIT_SIDE = 4


def mix64(z):
    z = (z ^ (z >> S30)) * M1
    z = (z ^ (z >> S27)) * M2
    return z ^ (z >> S31)


def atom_state(key, atom):
    return mix64(key + atom * GOLDEN)


def salt(k: int) -> np.uint64:
    return np.uint64(((k + 1) * int(GAMMA)) & _MASK)


SALTS = np.array([salt(k) for k in range(5)], dtype=np.uint64)


def draw(state, salt):
    return (mix64(state ^ salt) >> S11) * INV_2_53


def seed_key(master_seed: int) -> np.uint64:
    """Scramble the user seed once so nearby seeds give unrelated streams."""
    return np.uint64(_mix64_int((int(master_seed) & _MASK) ^ int(GOLDEN)))


def uniforms(key: np.uint64, atoms: np.ndarray, k: int) -> np.ndarray:
    atoms = np.asarray(atoms, dtype=np.uint64)
    return draw(atom_state(key, atoms), salt(k))


def _mix64_int(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def uniform_scalar(key: int, atom: int, k: int) -> float:
    state = _mix64_int((int(key) + atom * 0x9E3779B97F4A7C15) & _MASK)
    z = _mix64_int(state ^ (((k + 1) * 0xD1B54A32D192ED03) & _MASK))
    return (z >> 11) * INV_2_53
