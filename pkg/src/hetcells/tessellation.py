"""Rasterized association maps and per-AP cell areas.

Cells are measured by pixel counting rather than exact geometry: with
unequal path-loss exponents the cell boundaries are curved, and with
per-point gains the cells are not even connected, so rasterization is the
one representation that covers every strategy/gain-mode combination.
Because the pattern is uniformly random relative to the pixel grid, pixel
counting is an unbiased area estimator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .association import AssociationStrategy
from .fading import GainFieldMode
from .pointprocess import PointPattern, Window


@dataclass(frozen=True)
class AssociationMap:
    """Rasterized assignment of every pixel center to its serving AP."""

    grid: np.ndarray  # (res, res) int32 AP indices
    cell_pixel_counts: np.ndarray  # (n_aps,) pixel count per AP
    pixel_area: float
    side_length: float

    @property
    def resolution(self) -> int:
        return self.grid.shape[0]

    def pixel_of(self, point) -> tuple[int, int]:
        """(row, col) of the pixel containing a point of the window."""
        res = self.resolution
        x, y = float(point[0]), float(point[1])
        col = min(int(x / self.side_length * res), res - 1)
        row = min(int(y / self.side_length * res), res - 1)
        return row, col


@dataclass(frozen=True)
class CellRecord:
    ap_index: int
    tier: int
    area: float
    contains_origin: bool


def _per_ap_arrays(pattern: PointPattern, tiers):
    idx = pattern.tier_marks - 1
    if np.any(idx < 0) or np.any(idx >= len(tiers)):
        raise ValueError("pattern has tier marks outside 1..K")
    # math.log (not np.log) keeps scores bit-identical to the pure-Python
    # oracle, which the exact map-equality tests rely on
    log_p = np.array([math.log(t.power) for t in tiers])[idx]
    exps = np.array([t.path_loss_exponent for t in tiers])[idx]
    kind = np.array([t.fading.kind_code for t in tiers], dtype=np.int64)[idx]
    sigma = np.array([t.fading.sigma for t in tiers])[idx]
    scale = np.array([t.fading.scale for t in tiers])[idx]
    return log_p, exps, kind, sigma, scale


def compute_association_map(
    pattern: PointPattern,
    tiers,
    strategy: AssociationStrategy,
    gain_mode: GainFieldMode,
    window: Window,
    seed=None,
) -> AssociationMap:
    """Assign every pixel center to its serving AP.

    seed feeds the per-(AP, pixel) gain hash and is only consulted in
    PER_POINT mode; PER_AP mode uses pattern.gain_marks.  The result is
    deterministic for fixed pattern, seed and gain mode.
    """
    if pattern.n_points == 0:
        raise ValueError("empty point pattern")
    xs = np.ascontiguousarray(pattern.points[:, 0])
    ys = np.ascontiguousarray(pattern.points[:, 1])
    side = window.side_length
    res = window.resolution
    log_p, exps, kind, sigma, scale = _per_ap_arrays(pattern, tiers)
    half_a = 0.5 * exps

    if strategy is AssociationStrategy.NEAREST:
        grid = _kernels.nearest_map(xs, ys, side, res)
    elif gain_mode is GainFieldMode.PER_AP:
        log_ph = log_p + np.array([math.log(float(g)) for g in pattern.gain_marks])
        if strategy is AssociationStrategy.MAX_SIR:
            grid = _kernels.max_sir_map(xs, ys, log_ph, half_a, side, res)
        elif np.all(exps == exps[0]):
            # common exponent: argmin d2 * (P H)^(-2/a), no per-pair log
            weights = np.exp(-(2.0 / exps[0]) * log_ph)
            grid = _kernels.weighted_distance_map(xs, ys, weights, side, res)
        else:
            grid = _kernels.max_power_map(xs, ys, log_ph, half_a, side, res)
    else:
        if seed is None:
            raise ValueError("PER_POINT gain mode requires a gain seed")
        gain_seed = np.uint64(seed)
        if strategy is AssociationStrategy.MAX_SIR:
            grid = _kernels.max_sir_map_per_point(
                xs, ys, log_p, half_a, kind, sigma, scale, gain_seed, side, res
            )
        else:
            grid = _kernels.max_power_map_per_point(
                xs, ys, log_p, half_a, kind, sigma, scale, gain_seed, side, res
            )

    counts = np.bincount(grid.ravel(), minlength=pattern.n_points)
    return AssociationMap(
        grid=grid,
        cell_pixel_counts=counts,
        pixel_area=window.pixel_area,
        side_length=side,
    )


def _origin_pixel_ap(amap: AssociationMap) -> int:
    row, col = amap.pixel_of((amap.side_length / 2.0, amap.side_length / 2.0))
    return int(amap.grid[row, col])


def cell_areas(amap: AssociationMap, pattern: PointPattern) -> list[CellRecord]:
    """One CellRecord per AP (zero area allowed); areas sum to side^2."""
    if len(amap.cell_pixel_counts) != pattern.n_points:
        raise ValueError("map and pattern disagree on the number of APs")
    origin_ap = _origin_pixel_ap(amap)
    return [
        CellRecord(
            ap_index=n,
            tier=int(pattern.tier_marks[n]),
            area=amap.pixel_area * int(amap.cell_pixel_counts[n]),
            contains_origin=(n == origin_ap),
        )
        for n in range(pattern.n_points)
    ]


def zero_cell(amap: AssociationMap, pattern: PointPattern, point=None) -> CellRecord:
    """Record of the cell containing the given point (default: center).

    The window center plays the role of the origin; by stationarity of the
    torus any fixed reference point is equivalent.
    """
    if point is None:
        point = (amap.side_length / 2.0, amap.side_length / 2.0)
    if not (0 <= point[0] < amap.side_length and 0 <= point[1] < amap.side_length):
        raise ValueError("point lies outside the window")
    row, col = amap.pixel_of(point)
    n = int(amap.grid[row, col])
    return CellRecord(
        ap_index=n,
        tier=int(pattern.tier_marks[n]),
        area=amap.pixel_area * int(amap.cell_pixel_counts[n]),
        contains_origin=(n == _origin_pixel_ap(amap)),
    )


def write_raster(amap: AssociationMap, path) -> None:
    """Greymap-style text dump: 'width height side_length', then row-major
    AP indices, one row per line."""
    res = amap.resolution
    with open(path, "w") as fh:
        fh.write(f"{res} {res} {amap.side_length}\n")
        for row in amap.grid:
            fh.write(" ".join(str(int(v)) for v in row))
            fh.write("\n")
