"""Brute-force reference implementations, used only by tests.

Everything here is deliberately naive pure Python: a double loop over
pixels and APs with no vectorization, no shared code with the kernels
except the gain hash in `rng` (shared on purpose, so oracle and main path
see the identical gain field and can be compared pixel-for-pixel).
"""

from __future__ import annotations

import math

import numpy as np

from . import rng as _rng
from .association import AssociationStrategy
from .fading import FadingModel, GainFieldMode, sample_gains
from .pointprocess import PointPattern, Window
from .tessellation import AssociationMap

MAX_ORACLE_APS = 200
MAX_ORACLE_RESOLUTION = 400


def _wrapped_d2(x, y, px, py, side):
    dx = abs(x - px)
    if dx > side - dx:
        dx = side - dx
    dy = abs(y - py)
    if dy > side - dy:
        dy = side - dy
    return dx * dx + dy * dy


def brute_force_map(
    pattern: PointPattern,
    tiers,
    strategy: AssociationStrategy,
    gain_mode: GainFieldMode,
    window: Window,
    seed=None,
) -> AssociationMap:
    """Naive O(pixels x APs) association map for small instances."""
    n = pattern.n_points
    res = window.resolution
    if n > MAX_ORACLE_APS or res > MAX_ORACLE_RESOLUTION:
        raise ValueError(
            f"oracle instance too large: {n} APs, {res}^2 pixels "
            f"(limits {MAX_ORACLE_APS}, {MAX_ORACLE_RESOLUTION}^2)"
        )
    if n == 0:
        raise ValueError("empty point pattern")

    side = window.side_length
    step = side / res
    xs = [float(v) for v in pattern.points[:, 0]]
    ys = [float(v) for v in pattern.points[:, 1]]
    log_p = [math.log(tiers[m - 1].power) for m in pattern.tier_marks]
    half_a = [0.5 * tiers[m - 1].path_loss_exponent for m in pattern.tier_marks]
    kind = [tiers[m - 1].fading.kind_code for m in pattern.tier_marks]
    sigma = [tiers[m - 1].fading.sigma for m in pattern.tier_marks]
    scale = [tiers[m - 1].fading.scale for m in pattern.tier_marks]
    per_ap_log_gain = [math.log(float(g)) for g in pattern.gain_marks]
    per_point = gain_mode is GainFieldMode.PER_POINT
    gain_seed = int(np.uint64(seed)) if per_point and seed is not None else 0
    if per_point and seed is None:
        raise ValueError("PER_POINT gain mode requires a gain seed")
    npix = res * res

    grid = np.empty((res, res), np.int32)
    for i in range(res):
        py = (i + 0.5) * step
        for j in range(res):
            px = (j + 0.5) * step
            pix = i * res + j

            if strategy is AssociationStrategy.NEAREST:
                best = math.inf
                bi = -1
                for k in range(n):
                    d2 = _wrapped_d2(xs[k], ys[k], px, py, side)
                    if d2 < best:
                        best = d2
                        bi = k
                grid[i, j] = bi
                continue

            # received log-powers (inf marks y at an atom)
            log_power = []
            atom = -1
            for k in range(n):
                d2 = _wrapped_d2(xs[k], ys[k], px, py, side)
                if d2 == 0.0:
                    atom = k
                    break
                if per_point:
                    g = _rng.pair_gain(gain_seed, k * npix + pix, kind[k], sigma[k], scale[k])
                    lg = math.log(g)
                else:
                    lg = per_ap_log_gain[k]
                log_power.append(log_p[k] + lg - half_a[k] * math.log(d2))
            if atom >= 0:
                grid[i, j] = atom
                continue

            if strategy is AssociationStrategy.MAX_POWER:
                best = -math.inf
                bi = -1
                for k in range(n):
                    if log_power[k] > best:
                        best = log_power[k]
                        bi = k
                grid[i, j] = bi
            else:  # MAX_SIR
                power = [math.exp(v) for v in log_power]
                total = 0.0
                for p in power:
                    total += p
                best = -math.inf
                bi = -1
                for k in range(n):
                    denom = total - power[k]
                    s = power[k] / denom if denom > 0.0 else math.inf
                    if s > best:
                        best = s
                        bi = k
                grid[i, j] = bi

    counts = np.bincount(grid.ravel(), minlength=n)
    return AssociationMap(
        grid=grid,
        cell_pixel_counts=counts,
        pixel_area=window.pixel_area,
        side_length=side,
    )


def mc_fractional_moment(model: FadingModel, delta: float, n_samples: int, seed):
    """Sample mean and standard error of H^delta."""
    if n_samples < 10**5:
        raise ValueError("n_samples must be at least 1e5")
    gains = sample_gains(model, n_samples, _rng.generator(seed))
    vals = gains**delta
    mean = float(vals.mean())
    se = float(vals.std(ddof=1) / math.sqrt(n_samples))
    return mean, se
