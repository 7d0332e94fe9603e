"""Per-link channel gain models and their exact fractional moments."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import rng as _rng


class GainFieldMode(enum.Enum):
    """How gains vary over space.

    PER_AP: one gain per AP, reused at every evaluation point.
    PER_POINT: an independent gain per (AP, evaluation point) pair.
    Both have the same marginal law, so mean cell areas agree.
    """

    PER_AP = "per_ap"
    PER_POINT = "per_point"


@dataclass(frozen=True)
class FadingModel:
    """Channel gain law.

    kind: 'deterministic' (gain 1), 'lognormal' (log-gain ~ N(0, sigma^2),
    sigma in natural-log units), or 'exponential' (mean = scale).
    """

    kind: str
    sigma: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in ("deterministic", "lognormal", "exponential"):
            raise ValueError(f"unknown fading kind {self.kind!r}")
        if self.kind == "lognormal" and self.sigma < 0:
            raise ValueError("lognormal sigma must be >= 0")
        if self.kind == "exponential" and self.scale <= 0:
            raise ValueError("exponential scale must be > 0")

    @classmethod
    def deterministic(cls) -> "FadingModel":
        return cls("deterministic")

    @classmethod
    def lognormal(cls, sigma: float) -> "FadingModel":
        return cls("lognormal", sigma=sigma)

    @classmethod
    def exponential(cls, scale: float = 1.0) -> "FadingModel":
        return cls("exponential", scale=scale)

    @property
    def kind_code(self) -> int:
        """Integer code shared with the numba kernels and the oracle hash."""
        return {
            "deterministic": _rng.GAIN_DETERMINISTIC,
            "lognormal": _rng.GAIN_LOGNORMAL,
            "exponential": _rng.GAIN_EXPONENTIAL,
        }[self.kind]


def sample_gain(model: FadingModel, rng: np.random.Generator) -> float:
    """Draw one gain from the model's law."""
    return float(sample_gains(model, 1, rng)[0])


def sample_gains(model: FadingModel, n: int, rng: np.random.Generator) -> np.ndarray:
    if model.kind == "deterministic":
        return np.ones(n)
    if model.kind == "lognormal":
        if model.sigma == 0.0:
            return np.ones(n)
        return np.exp(rng.normal(0.0, model.sigma, size=n))
    return rng.exponential(model.scale, size=n)


def fractional_moment(model: FadingModel, delta: float) -> float:
    """Exact E[H^delta] for delta in (0, 1].

    deterministic -> 1, lognormal(sigma) -> exp(delta^2 sigma^2 / 2),
    exponential(scale) -> scale^delta * Gamma(1 + delta).
    """
    if not 0.0 < delta <= 1.0:
        raise ValueError(f"delta must be in (0, 1], got {delta}")
    if model.kind == "deterministic":
        return 1.0
    if model.kind == "lognormal":
        return math.exp(0.5 * delta * delta * model.sigma * model.sigma)
    return model.scale**delta * math.gamma(1.0 + delta)
