"""Marked Poisson point processes on a square torus.

The torus stands in for the plane: it keeps the finite simulation exactly
stationary (no edge effects), so every AP is statistically a "typical" AP
and per-AP averaging estimates Palm expectations directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import rng as _rng
from .fading import FadingModel

MAX_EMPTY_RESAMPLES = 16


class EmptyPatternError(RuntimeError):
    """All resampling attempts produced a realization with zero points."""


@dataclass(frozen=True)
class Window:
    """Square observation window [0, side_length)^2 with toroidal metric."""

    side_length: float
    resolution: int

    def __post_init__(self):
        if self.side_length <= 0:
            raise ValueError("side_length must be > 0")
        if self.resolution < 2:
            raise ValueError("resolution must be >= 2")

    @property
    def area(self) -> float:
        return self.side_length * self.side_length

    @property
    def pixel_size(self) -> float:
        return self.side_length / self.resolution

    @property
    def pixel_area(self) -> float:
        return self.pixel_size * self.pixel_size

    def pixel_centers(self) -> np.ndarray:
        """1-D coordinates of pixel centers along one axis."""
        return (np.arange(self.resolution) + 0.5) * self.pixel_size

    def wrap(self, coords: np.ndarray) -> np.ndarray:
        return np.mod(coords, self.side_length)

    def torus_delta(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Componentwise wrapped distance |a - b| on the torus."""
        d = np.abs(np.asarray(a) - np.asarray(b))
        return np.minimum(d, self.side_length - d)

    def torus_distance2(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        d = self.torus_delta(a, b)
        return np.sum(d * d, axis=-1)


@dataclass(frozen=True)
class TierConfig:
    """Physical parameters of one AP class.

    power is linear (watts); dBm conversion happens at the config layer.
    path_loss_exponent must exceed 2 for mean cell areas to be finite.
    """

    density: float
    power: float
    path_loss_exponent: float
    fading: FadingModel = field(default_factory=FadingModel.deterministic)

    def __post_init__(self):
        if self.density <= 0:
            raise ValueError("density must be > 0")
        if self.power <= 0:
            raise ValueError("power must be > 0")
        if self.path_loss_exponent <= 2:
            raise ValueError("path_loss_exponent must be > 2")


@dataclass(frozen=True)
class PointPattern:
    """One realization of AP locations with tier and gain marks.

    tier_marks are in {1..K}; gain_marks are the per-AP channel gains
    (all ones until drawn, and only used in PER_AP gain mode).
    """

    points: np.ndarray  # (n, 2)
    tier_marks: np.ndarray  # (n,) int
    gain_marks: np.ndarray  # (n,) float
    seed: object = None

    def __post_init__(self):
        if not (len(self.points) == len(self.tier_marks) == len(self.gain_marks)):
            raise ValueError("points, tier_marks and gain_marks must have equal length")

    @property
    def n_points(self) -> int:
        return len(self.points)

    def translated(self, shift, window: Window) -> "PointPattern":
        """Torus-translate every point by the same vector."""
        return replace(self, points=window.wrap(self.points + np.asarray(shift)))


def sample_ppp(total_density: float, window: Window, seed) -> PointPattern:
    """Sample a homogeneous PPP on the window.

    The count is Poisson(total_density * area), positions i.i.d. uniform.
    Empty realizations are resampled up to MAX_EMPTY_RESAMPLES times.
    """
    if total_density <= 0:
        raise ValueError("total_density must be > 0")
    gen = _rng.generator(seed)
    mean_count = total_density * window.area
    for _ in range(MAX_EMPTY_RESAMPLES):
        n = gen.poisson(mean_count)
        if n > 0:
            pts = gen.uniform(0.0, window.side_length, size=(n, 2))
            return PointPattern(
                points=pts,
                tier_marks=np.ones(n, dtype=np.int64),
                gain_marks=np.ones(n),
                seed=seed,
            )
    raise EmptyPatternError(
        f"no points after {MAX_EMPTY_RESAMPLES} attempts (mean count {mean_count:.3g})"
    )


def assign_tiers(pattern: PointPattern, tier_fractions, seed) -> PointPattern:
    """Independently mark each point with tier k (1-based) w.p. p_k.

    By the thinning theorem the per-tier sub-patterns are independent
    PPPs with densities p_k * total_density.
    """
    p = np.asarray(tier_fractions, dtype=float)
    if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
        raise ValueError("tier_fractions must be nonnegative and sum to 1")
    gen = _rng.generator(seed)
    marks = gen.choice(len(p), size=pattern.n_points, p=p) + 1
    return replace(pattern, tier_marks=marks.astype(np.int64))


def draw_gain_marks(pattern: PointPattern, tiers, seed) -> PointPattern:
    """Draw one gain per AP from its tier's fading law (PER_AP mode)."""
    gen = _rng.generator(seed)
    gains = np.ones(pattern.n_points)
    for k, tier in enumerate(tiers, start=1):
        mask = pattern.tier_marks == k
        if mask.any():
            from .fading import sample_gains

            gains[mask] = sample_gains(tier.fading, int(mask.sum()), gen)
    return replace(pattern, gain_marks=gains)
