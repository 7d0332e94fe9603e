"""Numba rasterization kernels.

One kernel per (strategy, gain mode) combination.  All kernels share the
same conventions as the reference implementations in `association` and
`oracles`: toroidal wrapped distances, pixel centers at (i+0.5)*side/res,
log-domain max-power scores, ties broken by smallest AP index, and a
location coinciding with an AP served by that AP.

Per-(AP, pixel) gains come from the counter-based splitmix64 hash in
`rng`; the numba twin below is bit-for-bit identical to the Python one
(pinned by a test), which is what makes the pure-Python oracle able to
reproduce these maps exactly.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit, uint64

_TWO_PI = 6.283185307179586
_INV_2_53 = 1.0 / 9007199254740992.0


@njit(cache=True, inline="always")
def _mix64(z):
    z = (z ^ (z >> uint64(30))) * uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> uint64(27))) * uint64(0x94D049BB133111EB)
    return z ^ (z >> uint64(31))


@njit(cache=True, inline="always")
def _hash_uniform(seed, counter):
    h = _mix64((seed + counter + uint64(0x9E3779B97F4A7C15)))
    return ((h >> uint64(11)) + 0.5) * _INV_2_53


@njit(cache=True, inline="always")
def _pair_gain(seed, counter, kind, sigma, scale):
    # kind: 0 deterministic, 1 lognormal, 2 exponential (see rng module)
    if kind == 0:
        return 1.0
    u1 = _hash_uniform(seed, uint64(2) * counter)
    if kind == 2:
        return -scale * math.log(u1)
    u2 = _hash_uniform(seed, uint64(2) * counter + uint64(1))
    z = math.sqrt(-2.0 * math.log(u1)) * math.cos(_TWO_PI * u2)
    return math.exp(sigma * z)


@njit(cache=True, inline="always")
def _wrapped_d2(x, y, px, py, side):
    dx = abs(x - px)
    if dx > side - dx:
        dx = side - dx
    dy = abs(y - py)
    if dy > side - dy:
        dy = side - dy
    return dx * dx + dy * dy


@njit(cache=True)
def nearest_map(xs, ys, side, res):
    grid = np.empty((res, res), np.int32)
    n = xs.shape[0]
    step = side / res
    for i in range(res):
        py = (i + 0.5) * step
        for j in range(res):
            px = (j + 0.5) * step
            best = np.inf
            bi = -1
            for k in range(n):
                d2 = _wrapped_d2(xs[k], ys[k], px, py, side)
                if d2 < best:
                    best = d2
                    bi = k
            grid[i, j] = bi
    return grid


@njit(cache=True)
def weighted_distance_map(xs, ys, weights, side, res):
    """Max-power map for a single shared path-loss exponent, PER_AP gains.

    argmax of log(P H) - (a/2) log d2 equals argmin of d2 * (P H)^(-2/a)
    when a is common, which avoids a log per (pixel, AP) pair.
    """
    grid = np.empty((res, res), np.int32)
    n = xs.shape[0]
    step = side / res
    for i in range(res):
        py = (i + 0.5) * step
        for j in range(res):
            px = (j + 0.5) * step
            best = np.inf
            bi = -1
            for k in range(n):
                s = _wrapped_d2(xs[k], ys[k], px, py, side) * weights[k]
                if s < best:
                    best = s
                    bi = k
            grid[i, j] = bi
    return grid


@njit(cache=True)
def max_power_map(xs, ys, log_ph, half_a, side, res):
    """General max-power map with per-AP exponents, PER_AP gains."""
    grid = np.empty((res, res), np.int32)
    n = xs.shape[0]
    step = side / res
    for i in range(res):
        py = (i + 0.5) * step
        for j in range(res):
            px = (j + 0.5) * step
            best = -np.inf
            bi = -1
            for k in range(n):
                d2 = _wrapped_d2(xs[k], ys[k], px, py, side)
                if d2 == 0.0:
                    bi = k
                    break
                s = log_ph[k] - half_a[k] * math.log(d2)
                if s > best:
                    best = s
                    bi = k
            grid[i, j] = bi
    return grid


@njit(cache=True)
def max_sir_map(xs, ys, log_ph, half_a, side, res):
    """Max-SIR map, PER_AP gains: score_n = p_n / (total - p_n)."""
    grid = np.empty((res, res), np.int32)
    n = xs.shape[0]
    step = side / res
    power = np.empty(n)
    for i in range(res):
        py = (i + 0.5) * step
        for j in range(res):
            px = (j + 0.5) * step
            atom = -1
            total = 0.0
            for k in range(n):
                d2 = _wrapped_d2(xs[k], ys[k], px, py, side)
                if d2 == 0.0:
                    atom = k
                    break
                p = math.exp(log_ph[k] - half_a[k] * math.log(d2))
                power[k] = p
                total += p
            if atom >= 0:
                grid[i, j] = atom
                continue
            best = -np.inf
            bi = -1
            for k in range(n):
                denom = total - power[k]
                s = power[k] / denom if denom > 0.0 else np.inf
                if s > best:
                    best = s
                    bi = k
            grid[i, j] = bi
    return grid


@njit(cache=True)
def max_power_map_per_point(
    xs, ys, log_p, half_a, kind, sigma, scale, gain_seed, side, res
):
    """Max-power map with an independent hashed gain per (AP, pixel)."""
    grid = np.empty((res, res), np.int32)
    n = xs.shape[0]
    step = side / res
    npix = uint64(res * res)
    for i in range(res):
        py = (i + 0.5) * step
        for j in range(res):
            px = (j + 0.5) * step
            pix = uint64(i * res + j)
            best = -np.inf
            bi = -1
            for k in range(n):
                d2 = _wrapped_d2(xs[k], ys[k], px, py, side)
                if d2 == 0.0:
                    bi = k
                    break
                g = _pair_gain(gain_seed, uint64(k) * npix + pix, kind[k], sigma[k], scale[k])
                s = log_p[k] + math.log(g) - half_a[k] * math.log(d2)
                if s > best:
                    best = s
                    bi = k
            grid[i, j] = bi
    return grid


@njit(cache=True)
def max_sir_map_per_point(
    xs, ys, log_p, half_a, kind, sigma, scale, gain_seed, side, res
):
    """Max-SIR map with hashed per-(AP, pixel) gains.

    Uses the same (seed, counter) hash as max_power_map_per_point, so for a
    fixed gain_seed both strategies see the identical gain field.
    """
    grid = np.empty((res, res), np.int32)
    n = xs.shape[0]
    step = side / res
    npix = uint64(res * res)
    power = np.empty(n)
    for i in range(res):
        py = (i + 0.5) * step
        for j in range(res):
            px = (j + 0.5) * step
            pix = uint64(i * res + j)
            atom = -1
            total = 0.0
            for k in range(n):
                d2 = _wrapped_d2(xs[k], ys[k], px, py, side)
                if d2 == 0.0:
                    atom = k
                    break
                g = _pair_gain(gain_seed, uint64(k) * npix + pix, kind[k], sigma[k], scale[k])
                p = math.exp(log_p[k] + math.log(g) - half_a[k] * math.log(d2))
                power[k] = p
                total += p
            if atom >= 0:
                grid[i, j] = atom
                continue
            best = -np.inf
            bi = -1
            for k in range(n):
                denom = total - power[k]
                s = power[k] / denom if denom > 0.0 else np.inf
                if s > best:
                    best = s
                    bi = k
            grid[i, j] = bi
    return grid
