"""Stationary association strategies evaluated at arbitrary locations.

Scores are computed in the log domain (log power + log gain - a*log
distance) so path-loss exponents up to 6 and powers spanning tens of dB
never overflow.  A location coinciding with an AP scores +inf and is
served by that AP; ties are broken by smallest AP index so maps are
reproducible despite grid arithmetic.
"""

from __future__ import annotations

import enum

import numpy as np

from .pointprocess import PointPattern, Window


class AssociationStrategy(enum.Enum):
    NEAREST = "nearest"
    MAX_POWER = "max_power"
    MAX_SIR = "max_sir"


def _per_ap_params(pattern: PointPattern, tiers):
    """Per-AP (log power, exponent) arrays from the tier marks."""
    powers = np.array([t.power for t in tiers])
    exps = np.array([t.path_loss_exponent for t in tiers])
    idx = pattern.tier_marks - 1
    if np.any(idx < 0) or np.any(idx >= len(tiers)):
        raise ValueError("pattern has tier marks outside 1..K")
    return np.log(powers[idx]), exps[idx]


def scores(
    y,
    pattern: PointPattern,
    tiers,
    strategy: AssociationStrategy,
    window: Window,
    gains=None,
) -> np.ndarray:
    """Per-AP score vector of the strategy at location y.

    gains: channel gain of each AP at y; defaults to pattern.gain_marks.
    MAX_SIR scores are (power from n) / (sum of powers from all m != n);
    with a single AP the denominator is 0 and the score is +inf.
    """
    if pattern.n_points == 0:
        raise ValueError("empty point pattern")
    if gains is None:
        gains = pattern.gain_marks
    gains = np.asarray(gains, dtype=float)
    d2 = window.torus_distance2(pattern.points, np.asarray(y, dtype=float))
    at_atom = d2 == 0.0

    if strategy is AssociationStrategy.NEAREST:
        s = -d2.astype(float)
        s[at_atom] = np.inf
        return s

    log_power, exponent = _per_ap_params(pattern, tiers)
    with np.errstate(divide="ignore"):
        log_score = log_power + np.log(gains) - 0.5 * exponent * np.log(d2)
    log_score[at_atom] = np.inf

    if strategy is AssociationStrategy.MAX_POWER:
        return log_score

    # MAX_SIR: received powers, then the interference ratio.  An AP at the
    # query point delivers infinite power, so it wins and drives every
    # other AP's ratio to zero; handle that case without inf arithmetic.
    if np.any(at_atom):
        sir = np.zeros_like(d2, dtype=float)
        sir[at_atom] = np.inf
        return sir
    received = np.exp(log_score)
    total = received.sum()
    denom = total - received
    with np.errstate(divide="ignore", invalid="ignore"):
        sir = np.where(denom > 0.0, received / denom, np.inf)
    return sir


def serving_ap(
    y,
    pattern: PointPattern,
    tiers,
    strategy: AssociationStrategy,
    window: Window,
    gains=None,
) -> int:
    """Index of the AP serving location y (argmax score, ties -> smallest)."""
    s = scores(y, pattern, tiers, strategy, window, gains)
    return int(np.argmax(s))  # np.argmax returns the first maximum
