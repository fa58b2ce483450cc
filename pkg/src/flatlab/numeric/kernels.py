"""Hot inner loops of the KdV stepper.

Two implementations of the same arithmetic: a numba @njit kernel and a pure
numpy fallback. Selection: numba is used when importable unless the
environment flag ``FLATLAB_NO_NUMBA`` is set to a non-empty value other than
"0"; ``BACKEND`` records the active choice. ``benchmarks/bench_kdv.py``
compares the two paths.

Update rule (leapfrog, three-point-average nonlinearity, five-point
dispersion stencil) for l_z = 3 l l_x - l_xxx on a periodic grid:

    l_j^{n+1} = l_j^{n-1}
                + (dz/dx)   * (l_{j+1}+l_j+l_{j-1}) * (l_{j+1}-l_{j-1})
                - (dz/dx^3) * (l_{j+2}-2 l_{j+1}+2 l_{j-1}-l_{j-2})

The chunk routines advance ``nsteps`` leapfrog steps in place over the two
level buffers and return them in (previous, current) order.
"""

from __future__ import annotations

import os

import numpy as np

_FLAG = os.environ.get("FLATLAB_NO_NUMBA", "")
NUMBA_DISABLED = _FLAG not in ("", "0")


def euler_step(l0: np.ndarray, dx: float, dz: float) -> np.ndarray:
    """Single first-order bootstrap step (numpy on both backends)."""
    lp1 = np.roll(l0, -1)
    lm1 = np.roll(l0, 1)
    lp2 = np.roll(l0, -2)
    lm2 = np.roll(l0, 2)
    rhs = (lp1 + l0 + lm1) * (lp1 - lm1) / (2.0 * dx) \
        - (lp2 - 2.0 * lp1 + 2.0 * lm1 - lm2) / (2.0 * dx ** 3)
    return l0 + dz * rhs


def _chunk_numpy(prev: np.ndarray, cur: np.ndarray, dx: float, dz: float, nsteps: int):
    r1 = dz / dx
    r3 = dz / dx ** 3
    for _ in range(nsteps):
        lp1 = np.roll(cur, -1)
        lm1 = np.roll(cur, 1)
        lp2 = np.roll(cur, -2)
        lm2 = np.roll(cur, 2)
        prev += r1 * (lp1 + cur + lm1) * (lp1 - lm1) \
            - r3 * (lp2 - 2.0 * lp1 + 2.0 * lm1 - lm2)
        prev, cur = cur, prev
    return prev, cur


_chunk_numba = None
if not NUMBA_DISABLED:
    try:
        from numba import njit

        @njit(cache=True)
        def _chunk_numba_impl(prev, cur, dx, dz, nsteps):  # pragma: no cover - numba
            n = cur.shape[0]
            r1 = dz / dx
            r3 = dz / (dx * dx * dx)
            for _ in range(nsteps):
                for j in range(n):
                    jp1 = j + 1 if j + 1 < n else 0
                    jp2 = j + 2 if j + 2 < n else j + 2 - n
                    jm1 = j - 1 if j >= 1 else n - 1
                    jm2 = j - 2 if j >= 2 else n + j - 2
                    a = cur[jp1]
                    b = cur[j]
                    cm = cur[jm1]
                    prev[j] = prev[j] + r1 * (a + b + cm) * (a - cm) \
                        - r3 * (cur[jp2] - 2.0 * a + 2.0 * cm - cur[jm2])
                tmp = prev
                prev = cur
                cur = tmp
            return prev, cur

        _chunk_numba = _chunk_numba_impl
    except ImportError:
        _chunk_numba = None

BACKEND = "numba" if _chunk_numba is not None else "numpy"


def leapfrog_chunk(prev, cur, dx, dz, nsteps, backend: str | None = None):
    """Advance nsteps leapfrog steps; returns the updated (prev, cur) pair."""
    use = backend or BACKEND
    if use == "numba":
        if _chunk_numba is None:
            raise RuntimeError("numba backend unavailable")
        return _chunk_numba(prev, cur, dx, dz, nsteps)
    return _chunk_numpy(prev, cur, dx, dz, nsteps)
