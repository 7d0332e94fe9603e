import numpy as np
import pytest

import hetcells as hc


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def small_window():
    return hc.Window(10.0, 100)


def make_tiers(*specs):
    """specs: (density, power, exponent, fading) tuples; fading optional."""
    tiers = []
    for s in specs:
        density, power, exponent = s[:3]
        fading = s[3] if len(s) > 3 else hc.FadingModel.deterministic()
        tiers.append(hc.TierConfig(density, power, exponent, fading))
    return tuple(tiers)
