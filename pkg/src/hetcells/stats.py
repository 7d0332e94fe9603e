"""Monte Carlo estimation of cell-area statistics and Palm identity tests.

Confidence intervals are always formed across independent replications
(cells within one realization are dependent, so per-cell CIs would be
wrong).  Every replication derives its streams from (master_seed, rep),
so the aggregate is deterministic and independent of execution order.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import stats as sps

from . import analytics, rng as _rng
from .fading import GainFieldMode
from .pointprocess import draw_gain_marks, sample_ppp, assign_tiers
from .tessellation import cell_areas, compute_association_map, zero_cell

LARGE_CELL_WINDOW_FRACTION = 0.01
CI_LEVEL = 0.95


@dataclass
class AreaStatistics:
    """Per-tier empirical summaries over independent replications."""

    replications: int
    typical_mean_area: np.ndarray
    typical_mean_ci: np.ndarray
    typical_second_moment: np.ndarray
    typical_second_moment_ci: np.ndarray
    zero_cell_mean_area: np.ndarray
    zero_cell_ci: np.ndarray
    empirical_assoc_prob: np.ndarray
    assoc_prob_ci: np.ndarray
    total_cells: np.ndarray
    large_cell_fraction: np.ndarray
    # replication-level samples, kept for the distributional tests
    per_rep_mean: np.ndarray = field(repr=False, default=None)  # (K, R)
    per_rep_second: np.ndarray = field(repr=False, default=None)  # (K, R)
    per_rep_assoc: np.ndarray = field(repr=False, default=None)  # (K, R)
    typical_areas: list = field(repr=False, default=None)  # per tier, concatenated
    zero_cell_areas: list = field(repr=False, default=None)  # per tier
    cell_rows: list = field(repr=False, default=None)  # (rep, ap, tier, area, origin)

    @property
    def n_tiers(self) -> int:
        return len(self.typical_mean_area)


def _t_half_width(samples: np.ndarray) -> float:
    """95% t-interval half width across replications (nan-tolerant)."""
    x = samples[~np.isnan(samples)]
    if len(x) < 2:
        return math.nan
    q = sps.t.ppf(0.5 + CI_LEVEL / 2.0, len(x) - 1)
    return float(q * x.std(ddof=1) / math.sqrt(len(x)))


def _warn_if_window_small(config) -> None:
    try:
        areas = analytics.predict(config.tiers).per_tier_mean_area
    except Exception:
        return
    needed = 100.0 * float(np.max(areas))
    if config.window.area < needed:
        warnings.warn(
            f"window area {config.window.area:.3g} is below 100x the largest "
            f"analytic mean cell area ({needed:.3g}); finite-size bias likely",
            RuntimeWarning,
            stacklevel=3,
        )


def run_replication(config, rep: int):
    """One independent realization: pattern, map, cell records, zero cell."""
    master = config.master_seed
    pattern = sample_ppp(
        config.total_density,
        config.window,
        _rng.replication_stream(master, rep, _rng.STREAM_POINTS),
    )
    pattern = assign_tiers(
        pattern,
        config.tier_fractions,
        _rng.replication_stream(master, rep, _rng.STREAM_TIERS),
    )
    pattern = draw_gain_marks(
        pattern,
        config.tiers,
        _rng.replication_stream(master, rep, _rng.STREAM_GAINS),
    )
    gain_seed = _rng.stream_seed64(master, rep, _rng.STREAM_PIXEL_GAINS)
    amap = compute_association_map(
        pattern, config.tiers, config.strategy, config.gain_mode, config.window, gain_seed
    )
    return pattern, amap, cell_areas(amap, pattern), zero_cell(amap, pattern)


def run_experiment(config, keep_cell_rows: bool = False) -> AreaStatistics:
    """Estimate per-tier typical/zero-cell area statistics.

    Typical-cell quantities are per-AP averages over all APs of the tier
    (valid on the torus: every AP is typical); the zero cell is the cell
    containing the window center of each replication.
    """
    if config.replications < 2:
        raise ValueError("need at least 2 replications for confidence intervals")
    _warn_if_window_small(config)

    K = len(config.tiers)
    R = config.replications
    per_rep_mean = np.full((K, R), np.nan)
    per_rep_second = np.full((K, R), np.nan)
    per_rep_assoc = np.zeros((K, R))
    typical_areas = [[] for _ in range(K)]
    zero_areas = [[] for _ in range(K)]
    total_cells = np.zeros(K, dtype=np.int64)
    large_cells = np.zeros(K, dtype=np.int64)
    cell_rows = [] if keep_cell_rows else None
    window_area = config.window.area

    for rep in range(R):
        pattern, amap, records, zc = run_replication(config, rep)
        areas = np.array([c.area for c in records])
        marks = pattern.tier_marks
        for k in range(K):
            sel = areas[marks == k + 1]
            if len(sel) > 0:
                per_rep_mean[k, rep] = sel.mean()
                per_rep_second[k, rep] = np.mean(sel**2)
                typical_areas[k].append(sel)
                total_cells[k] += len(sel)
                large_cells[k] += int(np.sum(sel > LARGE_CELL_WINDOW_FRACTION * window_area))
            per_rep_assoc[k, rep] = areas[marks == k + 1].sum() / window_area
        zero_areas[zc.tier - 1].append(zc.area)
        if keep_cell_rows:
            cell_rows.extend(
                (rep, c.ap_index, c.tier, c.area, c.contains_origin) for c in records
            )

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)  # all-nan tiers
        mean = np.nanmean(per_rep_mean, axis=1)
        second = np.nanmean(per_rep_second, axis=1)
    zero_mean = np.array([np.mean(z) if z else np.nan for z in zero_areas])
    return AreaStatistics(
        replications=R,
        typical_mean_area=mean,
        typical_mean_ci=np.array([_t_half_width(per_rep_mean[k]) for k in range(K)]),
        typical_second_moment=second,
        typical_second_moment_ci=np.array([_t_half_width(per_rep_second[k]) for k in range(K)]),
        zero_cell_mean_area=zero_mean,
        zero_cell_ci=np.array([_t_half_width(np.array(z)) if len(z) >= 2 else math.nan for z in zero_areas]),
        empirical_assoc_prob=per_rep_assoc.mean(axis=1),
        assoc_prob_ci=np.array([_t_half_width(per_rep_assoc[k]) for k in range(K)]),
        total_cells=total_cells,
        large_cell_fraction=np.where(total_cells > 0, large_cells / np.maximum(total_cells, 1), np.nan),
        per_rep_mean=per_rep_mean,
        per_rep_second=per_rep_second,
        per_rep_assoc=per_rep_assoc,
        typical_areas=[np.concatenate(a) if a else np.array([]) for a in typical_areas],
        zero_cell_areas=[np.array(z) for z in zero_areas],
        cell_rows=cell_rows,
    )


@dataclass(frozen=True)
class BiasCheckReport:
    """Zero-cell mean vs area-biased typical mean (second moment / mean)."""

    tier: int
    zero_cell_mean: float
    zero_cell_se: float
    biased_typical_mean: float
    biased_typical_se: float
    difference: float
    z_statistic: float
    p_value: float
    significance_level: float
    passed: bool


def area_bias_check(stats: AreaStatistics, tier: int, alpha: float = 0.01) -> BiasCheckReport:
    """Test zero_mean == E[A^2]/E[A] for one tier (0-based index).

    Both sides and their standard errors come from replication-level
    batches; the ratio uses the delta method on the joint (mean, second
    moment) replication samples.
    """
    if stats.replications < 100:
        raise ValueError("area_bias_check needs at least 100 replications")
    m1 = stats.per_rep_mean[tier]
    m2 = stats.per_rep_second[tier]
    ok = ~(np.isnan(m1) | np.isnan(m2))
    m1, m2 = m1[ok], m2[ok]
    R = len(m1)
    mu1, mu2 = float(m1.mean()), float(m2.mean())
    ratio = mu2 / mu1
    cov = np.cov(np.vstack([m1, m2]), ddof=1) / R
    grad = np.array([-mu2 / (mu1 * mu1), 1.0 / mu1])
    ratio_var = float(grad @ cov @ grad)
    ratio_se = math.sqrt(max(ratio_var, 0.0))

    zs = stats.zero_cell_areas[tier]
    if len(zs) < 2:
        raise ValueError(f"tier {tier}: too few zero-cell observations ({len(zs)})")
    zero_mean = float(zs.mean())
    zero_se = float(zs.std(ddof=1) / math.sqrt(len(zs)))

    diff = zero_mean - ratio
    se = math.sqrt(zero_se**2 + ratio_se**2)
    if se == 0.0:
        z = 0.0 if diff == 0.0 else math.inf
    else:
        z = diff / se
    p = 2.0 * (1.0 - sps.norm.cdf(abs(z)))
    return BiasCheckReport(
        tier=tier,
        zero_cell_mean=zero_mean,
        zero_cell_se=zero_se,
        biased_typical_mean=ratio,
        biased_typical_se=ratio_se,
        difference=diff,
        z_statistic=z,
        p_value=float(p),
        significance_level=alpha,
        passed=bool(p >= alpha),
    )


@dataclass(frozen=True)
class DistributionCheckReport:
    statistic: float
    p_value: float
    significance_level: float
    passed: bool
    n_zero: int
    n_typical: int


def distribution_bias_check(
    zero_cell_samples,
    typical_cell_samples,
    alpha: float = 0.01,
    seed=0,
    weighted: bool = True,
) -> DistributionCheckReport:
    """KS test of zero-cell areas against the area-weighted typical law.

    Typical cells are resampled with probability proportional to area and
    compared to the zero-cell sample by a two-sample KS test.  weighted can
    be switched off to run the deliberately wrong (unweighted) comparison
    as a negative control.
    """
    zero = np.asarray(zero_cell_samples, dtype=float)
    typ = np.asarray(typical_cell_samples, dtype=float)
    if len(zero) < 500:
        raise ValueError(f"need at least 500 zero-cell samples, got {len(zero)}")
    if len(typ) < 5000:
        raise ValueError(f"need at least 5000 typical-cell samples, got {len(typ)}")
    gen = _rng.generator(seed)
    n = max(5000, 10 * len(zero))
    if weighted:
        w = typ / typ.sum()
        resampled = gen.choice(typ, size=n, replace=True, p=w)
    else:
        resampled = gen.choice(typ, size=n, replace=True)
    res = sps.ks_2samp(zero, resampled)
    return DistributionCheckReport(
        statistic=float(res.statistic),
        p_value=float(res.pvalue),
        significance_level=alpha,
        passed=bool(res.pvalue >= alpha),
        n_zero=len(zero),
        n_typical=len(typ),
    )
