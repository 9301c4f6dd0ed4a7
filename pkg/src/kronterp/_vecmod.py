"""Vectorized modular arithmetic helpers (internal).

int64 products must stay below 2^63, so the numpy fast paths are only taken
for moduli below 2^31; callers fall back to exact Python integers otherwise.
"""

from __future__ import annotations

import numpy as np

NUMPY_MOD_LIMIT = 1 << 31


def numpy_ok(q: int) -> bool:
    return q < NUMPY_MOD_LIMIT


def powmod_vec(base: np.ndarray, e: int, q: int) -> np.ndarray:
    """Elementwise base**e mod q by binary exponentiation."""
    if e < 0:
        raise ValueError("negative exponent")
    out = np.ones_like(base)
    b = base % q
    while e:
        if e & 1:
            out = out * b % q
        b = b * b % q
        e >>= 1
    return out
