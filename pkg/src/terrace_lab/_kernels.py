"""Explicit Euler kernels for the competition-diffusion system.

Both kernels evaluate the same three-point stencil with a mirrored ghost node
for zero-flux ends; Dirichlet ends are held fixed. The numba kernel is used
when numba is importable (``pip install terrace-lab[fast]``).
"""

from __future__ import annotations

import numpy as np

from .model import FloatArray

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:
    HAS_NUMBA = False


def _euler_loop(
    u: FloatArray,
    v: FloatArray,
    out_u: FloatArray,
    out_v: FloatArray,
    dt: float,
    inv_dx2: float,
    d: float,
    r: float,
    a: float,
    b: float,
    delta: float,
    neumann_left: bool,
    neumann_right: bool,
) -> None:
    n = u.shape[0]
    ku = 1.0 + delta
    kv = 1.0 - 2.0 * delta
    for i in range(n):
        if i == 0:
            if not neumann_left:
                out_u[0] = u[0]
                out_v[0] = v[0]
                continue
            lu = 2.0 * (u[1] - u[0]) * inv_dx2
            lv = 2.0 * (v[1] - v[0]) * inv_dx2
        elif i == n - 1:
            if not neumann_right:
                out_u[i] = u[i]
                out_v[i] = v[i]
                continue
            lu = 2.0 * (u[i - 1] - u[i]) * inv_dx2
            lv = 2.0 * (v[i - 1] - v[i]) * inv_dx2
        else:
            lu = (u[i - 1] - 2.0 * u[i] + u[i + 1]) * inv_dx2
            lv = (v[i - 1] - 2.0 * v[i] + v[i + 1]) * inv_dx2
        out_u[i] = u[i] + dt * (lu + u[i] * (ku - u[i] - a * v[i]))
        out_v[i] = v[i] + dt * (d * lv + r * v[i] * (kv - v[i] - b * u[i]))


if HAS_NUMBA:
    _euler_jit = njit(cache=True)(_euler_loop)


def _laplacian(w: FloatArray, inv_dx2: float) -> FloatArray:
    lap = np.empty_like(w)
    lap[1:-1] = (w[:-2] - 2.0 * w[1:-1] + w[2:]) * inv_dx2
    lap[0] = 2.0 * (w[1] - w[0]) * inv_dx2
    lap[-1] = 2.0 * (w[-2] - w[-1]) * inv_dx2
    return lap


def euler_numpy(
    u: FloatArray,
    v: FloatArray,
    dt: float,
    dx: float,
    d: float,
    r: float,
    a: float,
    b: float,
    delta: float,
    neumann_left: bool,
    neumann_right: bool,
) -> tuple[FloatArray, FloatArray]:
    inv_dx2 = 1.0 / (dx * dx)
    new_u = u + dt * (_laplacian(u, inv_dx2) + u * (1.0 + delta - u - a * v))
    growth_v = r * v * (1.0 - 2.0 * delta - v - b * u)
    new_v = v + dt * (d * _laplacian(v, inv_dx2) + growth_v)
    if not neumann_left:
        new_u[0], new_v[0] = u[0], v[0]
    if not neumann_right:
        new_u[-1], new_v[-1] = u[-1], v[-1]
    return new_u, new_v


def euler_step(
    u: FloatArray,
    v: FloatArray,
    dt: float,
    dx: float,
    d: float,
    r: float,
    a: float,
    b: float,
    delta: float,
    neumann_left: bool,
    neumann_right: bool,
    use_jit: bool | None = None,
) -> tuple[FloatArray, FloatArray]:
    """One forward-Euler step; returns fresh arrays and leaves the inputs intact."""
    if use_jit is None:
        use_jit = HAS_NUMBA
    if use_jit and HAS_NUMBA:
        out_u = np.empty_like(u)
        out_v = np.empty_like(v)
        _euler_jit(
            u, v, out_u, out_v, dt, 1.0 / (dx * dx), d, r, a, b, delta,
            neumann_left, neumann_right,
        )
        return out_u, out_v
    return euler_numpy(u, v, dt, dx, d, r, a, b, delta, neumann_left, neumann_right)
