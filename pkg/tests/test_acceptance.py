"""End-to-end acceptance battery.

Each test prints one PASS/FAIL line (run with ``pytest -s`` to see them
even when everything passes).  The Monte Carlo scales are chosen so the
whole module runs on a single laptop core; seeds are pinned.
"""

import csv
import dataclasses
import functools
import json
import math

import numpy as np
import pytest

import hetcells as hc
from hetcells import analytics, cli
from hetcells import rng as hrng
from hetcells.association import AssociationStrategy
from hetcells.config import SimulationConfig, dbm_to_watt
from hetcells.fading import GainFieldMode
from hetcells.oracles import brute_force_map
from hetcells.stats import distribution_bias_check


def report(num: int, ok: bool, detail: str) -> bool:
    print(f"ACCEPTANCE {num:02d} {'PASS' if ok else 'FAIL'}: {detail}")
    return ok


def two_tier_config(sigma2: float, lam2: float, **overrides) -> SimulationConfig:
    """The reference two-tier macro/pico setup used throughout."""
    tiers = (
        hc.TierConfig(1.0, dbm_to_watt(53.0), 3.5, hc.FadingModel.lognormal(2.0)),
        hc.TierConfig(lam2, dbm_to_watt(33.0), 3.5, hc.FadingModel.lognormal(sigma2)),
    )
    defaults = dict(
        window=hc.Window(12.0, 300),
        tiers=tiers,
        tier_power_dbm=(53.0, 33.0),
        strategy=AssociationStrategy.MAX_POWER,
        gain_mode=GainFieldMode.PER_POINT,
        replications=16,
        master_seed=20_240,
    )
    defaults.update(overrides)
    return SimulationConfig(**defaults)


# (sigma2, lam2) -> experiment scale; gain mode is chosen per config so the
# per-replication variance stays small enough for the 3% target
CRITERION2_SETTINGS = {
    (1.0, 1.0): dict(window=hc.Window(15.0, 600), gain_mode=GainFieldMode.PER_POINT),
    # heavy shadowing spreads tier-2 mass to very large radii, so this
    # config needs a much larger torus to keep truncation bias below 1%
    (4.0, 1.0): dict(
        window=hc.Window(48.0, 360), gain_mode=GainFieldMode.PER_POINT, replications=10
    ),
    (1.0, 5.0): dict(
        window=hc.Window(30.0, 1000), gain_mode=GainFieldMode.PER_AP, replications=20
    ),
    (4.0, 5.0): dict(
        window=hc.Window(30.0, 240), gain_mode=GainFieldMode.PER_POINT, replications=8
    ),
}


@functools.lru_cache(maxsize=None)
def criterion2_experiment(sigma2: float, lam2: float):
    cfg = two_tier_config(sigma2, lam2, **CRITERION2_SETTINGS[(sigma2, lam2)])
    return cfg, hc.run_experiment(cfg)


def single_tier_config(**overrides) -> SimulationConfig:
    defaults = dict(
        window=hc.Window(30.0, 1500),
        tiers=(hc.TierConfig(1.0, 1.0, 4.0, hc.FadingModel.deterministic()),),
        tier_power_dbm=(30.0,),
        strategy=AssociationStrategy.NEAREST,
        gain_mode=GainFieldMode.PER_AP,
        replications=20,
        master_seed=31_337,
    )
    defaults.update(overrides)
    return SimulationConfig(**defaults)


def test_01_voronoi_baseline():
    res = hc.run_experiment(single_tier_config())
    mean = float(res.typical_mean_area[0])
    ok = abs(mean - 1.0) < 0.01
    assert report(1, ok, f"Voronoi mean area {mean:.5f} vs 1.0 (tolerance 1%)")


@pytest.mark.parametrize("sigma2,lam2", sorted(CRITERION2_SETTINGS))
def test_02_closed_form_validation(sigma2, lam2):
    cfg, res = criterion2_experiment(sigma2, lam2)
    closed = analytics.mean_area_closed_form(cfg.tiers)
    ok = True
    parts = []
    for k in range(2):
        mc = float(res.typical_mean_area[k])
        hw = float(res.typical_mean_ci[k])
        rel = abs(mc - closed[k]) / closed[k]
        ok &= rel < 0.03 and abs(mc - closed[k]) <= hw
        parts.append(f"tier{k + 1} {rel * 100:.2f}% (CI +-{hw / closed[k] * 100:.2f}%)")
    assert report(
        2, ok, f"sigma2={sigma2:g} lam2={lam2:g}: MC vs closed form " + ", ".join(parts)
    )


@pytest.mark.parametrize("sigma2,lam2", sorted(CRITERION2_SETTINGS))
def test_03_association_probability_identity(sigma2, lam2):
    cfg, res = criterion2_experiment(sigma2, lam2)
    closed = analytics.mean_area_closed_form(cfg.tiers)
    densities = np.array([t.density for t in cfg.tiers])
    ok = True
    parts = []
    for k in range(2):
        want = densities[k] * closed[k]
        got = float(res.empirical_assoc_prob[k])
        hw = float(res.assoc_prob_ci[k])
        ok &= abs(got - want) <= hw
        parts.append(f"A{k + 1} {got:.4f} vs {want:.4f} (+-{hw:.4f})")
    total = float(res.empirical_assoc_prob.sum())
    ok &= abs(total - 1.0) < 1e-4
    assert report(
        3, ok, f"sigma2={sigma2:g} lam2={lam2:g}: " + ", ".join(parts) + f", sum {total:.2e}"
    )


def test_04_zero_cell_area_biasing():
    cfg = single_tier_config(
        window=hc.Window(15.0, 300), replications=500, master_seed=808
    )
    res = hc.run_experiment(cfg)
    typical = res.typical_areas[0]
    zero = res.zero_cell_areas[0]
    ratio = float(np.mean(typical**2) / np.mean(typical))
    zero_mean = float(np.mean(zero))
    rel = abs(zero_mean - ratio) / ratio
    dist = distribution_bias_check(zero, typical, alpha=0.01, seed=4)
    control = distribution_bias_check(zero, typical, alpha=0.01, seed=4, weighted=False)
    ok = rel < 0.05 and dist.passed and not control.passed
    assert report(
        4,
        ok,
        f"zero-cell mean {zero_mean:.4f} vs E[A^2]/E[A] {ratio:.4f} "
        f"({rel * 100:.2f}%), KS p={dist.p_value:.3f}, control p={control.p_value:.2e}",
    )


def test_05_strategy_equivalence():
    w = hc.Window(8.0, 160)
    matched = 0
    trials = 0
    for (sigma2, lam2), base_seed in zip(sorted(CRITERION2_SETTINGS), (100, 200, 300, 400)):
        cfg = two_tier_config(sigma2, lam2, window=w)
        for rep in range(25):
            p = hc.sample_ppp(
                cfg.total_density, w, hrng.replication_stream(base_seed, rep, hrng.STREAM_POINTS)
            )
            p = hc.assign_tiers(
                p, cfg.tier_fractions, hrng.replication_stream(base_seed, rep, hrng.STREAM_TIERS)
            )
            p = hc.draw_gain_marks(
                p, cfg.tiers, hrng.replication_stream(base_seed, rep, hrng.STREAM_GAINS)
            )
            mode = GainFieldMode.PER_AP if rep % 2 == 0 else GainFieldMode.PER_POINT
            seed = hrng.stream_seed64(base_seed, rep, hrng.STREAM_PIXEL_GAINS)
            mp = hc.compute_association_map(
                p, cfg.tiers, AssociationStrategy.MAX_POWER, mode, w, seed
            )
            ms = hc.compute_association_map(
                p, cfg.tiers, AssociationStrategy.MAX_SIR, mode, w, seed
            )
            matched += bool(np.array_equal(mp.grid, ms.grid))
            trials += 1
    ok = matched == trials == 100
    assert report(5, ok, f"MaxSIR map == MaxPower map on {matched}/{trials} realizations")


def test_06_quadrature_matches_closed_form():
    gen = np.random.default_rng(606)
    worst = 0.0
    for _ in range(20):
        k_tiers = int(gen.integers(1, 4))
        a = float(gen.uniform(2.5, 6.0))
        tiers = []
        for j in range(k_tiers):
            sigma = float(gen.uniform(0.0, 3.0))
            fading = (
                hc.FadingModel.lognormal(sigma) if sigma > 0.05 else hc.FadingModel.deterministic()
            )
            tiers.append(
                hc.TierConfig(
                    density=float(gen.uniform(0.2, 5.0)),
                    power=10.0 ** float(gen.uniform(0.0, 3.0)),  # spans 30 dB
                    path_loss_exponent=a,
                    fading=fading,
                )
            )
        tiers = tuple(tiers)
        closed = analytics.mean_area_closed_form(tiers)
        for i in range(k_tiers):
            q = analytics.mean_area_integral(tiers, i)
            worst = max(worst, abs(q.value - closed[i]) / closed[i])
    ok = worst < 1e-6
    assert report(6, ok, f"20 random equal-exponent configs, worst rel err {worst:.2e}")


def _sweep_rows(cfg: SimulationConfig, out_dir, values=(1.0, 3.0, 5.0)):
    """Run the density sweep through the CLI and return tier-2 rows."""
    cfg_path = out_dir / f"{cfg.experiment_id}.json"
    cfg_path.write_text(json.dumps(cfg.to_dict()))
    rc = cli.main(
        [
            "sweep",
            "--config",
            str(cfg_path),
            "--out",
            str(out_dir),
            "--param",
            "density",
            "--tier",
            "2",
            "--values",
            ",".join(str(v) for v in values),
        ]
    )
    assert rc == 0
    with open(out_dir / f"{cfg.experiment_id}_sweep_density_tier2.csv") as fh:
        fh.readline()
        rows = [r for r in csv.DictReader(fh) if r["tier"] == "2"]
    table = {}
    for r in rows:
        table[(float(r["sweep_value"]), r["method"])] = (
            float(r["mean_area"]),
            float(r["ci_half_width"]),
        )
    return table


def _trend_holds(lo_table, hi_table, values=(1.0, 3.0, 5.0)):
    """hi > lo at every density, analytic and MC, with non-overlapping CIs."""
    strict = all(
        hi_table[(v, m)][0] > lo_table[(v, m)][0] for v in values for m in ("analytic", "montecarlo")
    )
    separated = sum(
        hi_table[(v, "montecarlo")][0] - hi_table[(v, "montecarlo")][1]
        > lo_table[(v, "montecarlo")][0] + lo_table[(v, "montecarlo")][1]
        for v in values
    )
    return strict, separated


def test_07a_shadowing_trend(tmp_path):
    scale = dict(window=hc.Window(12.0, 200), replications=6, master_seed=7_701)
    t_lo = _sweep_rows(two_tier_config(1.0, 1.0, experiment_id="sig1", **scale), tmp_path)
    t_hi = _sweep_rows(two_tier_config(4.0, 1.0, experiment_id="sig4", **scale), tmp_path)
    strict, separated = _trend_holds(t_lo, t_hi)
    ok = strict and separated >= 3
    assert report(
        7,
        ok,
        f"tier-2 area larger at sigma2=4 than sigma2=1 at all densities: {strict}, "
        f"non-overlapping CIs at {separated}/3 points",
    )


def _fig3_config(a2: float, **overrides) -> SimulationConfig:
    tiers = (
        hc.TierConfig(1.0, dbm_to_watt(53.0), 3.0, hc.FadingModel.lognormal(2.0)),
        hc.TierConfig(1.0, dbm_to_watt(33.0), a2, hc.FadingModel.lognormal(4.0)),
    )
    defaults = dict(
        window=hc.Window(15.0, 250),
        tiers=tiers,
        tier_power_dbm=(53.0, 33.0),
        strategy=AssociationStrategy.MAX_POWER,
        gain_mode=GainFieldMode.PER_POINT,
        replications=12,
        master_seed=7_702,
    )
    defaults.update(overrides)
    return SimulationConfig(**defaults)


def test_07b_path_loss_trend(tmp_path):
    # the a2 effect on tier-2 areas fades as tier 2 densifies, so sweep
    # the sparse regime where the analytic gap is 14-25%
    values = (0.25, 0.5, 1.0)
    t_steep = _sweep_rows(_fig3_config(3.5, experiment_id="a35"), tmp_path, values)
    t_flat = _sweep_rows(_fig3_config(3.0, experiment_id="a30"), tmp_path, values)
    strict, separated = _trend_holds(t_steep, t_flat, values)
    ok = strict and separated >= 3
    assert report(
        7,
        ok,
        f"tier-2 area larger at a2=3.0 than a2=3.5 at all densities: {strict}, "
        f"non-overlapping CIs at {separated}/3 points",
    )


def test_08_gain_mode_invariance():
    base = two_tier_config(
        1.0, 1.0, window=hc.Window(10.0, 250), replications=50, master_seed=888
    )
    per_ap = hc.run_experiment(dataclasses.replace(base, gain_mode=GainFieldMode.PER_AP))
    per_pt = hc.run_experiment(dataclasses.replace(base, gain_mode=GainFieldMode.PER_POINT))
    ok = True
    parts = []
    for k in range(2):
        lo = max(
            per_ap.typical_mean_area[k] - per_ap.typical_mean_ci[k],
            per_pt.typical_mean_area[k] - per_pt.typical_mean_ci[k],
        )
        hi = min(
            per_ap.typical_mean_area[k] + per_ap.typical_mean_ci[k],
            per_pt.typical_mean_area[k] + per_pt.typical_mean_ci[k],
        )
        ok &= lo <= hi
        parts.append(
            f"tier{k + 1} {per_ap.typical_mean_area[k]:.4f}+-{per_ap.typical_mean_ci[k]:.4f}"
            f" vs {per_pt.typical_mean_area[k]:.4f}+-{per_pt.typical_mean_ci[k]:.4f}"
        )
    assert report(8, ok, "PerAP vs PerPoint 95% CIs overlap: " + ", ".join(parts))


def test_09_campbell_sanity():
    tiers = (
        hc.TierConfig(1.0, dbm_to_watt(53.0), 3.5, hc.FadingModel.lognormal(2.0)),
        hc.TierConfig(2.0, dbm_to_watt(33.0), 3.5, hc.FadingModel.lognormal(1.0)),
    )
    lam_u = 5.0
    rel0 = 0.0
    for i in range(2):
        want = lam_u * analytics.mean_area_integral(tiers, i).value
        got = analytics.campbell_functional(tiers, i, 0.0, lam_u).value
        rel0 = max(rel0, abs(got - want) / want)

    # single tier, no fading, kernel r^-1; the radial integral evaluates
    # to pi * lam_u / sqrt(lam) (the area element contributes the pi)
    lam = 2.0
    single = (hc.TierConfig(lam, 1.0, 4.0, hc.FadingModel.deterministic()),)
    got1 = analytics.campbell_functional(single, 0, 1.0, lam_u).value
    want1 = math.pi * lam_u / math.sqrt(lam)
    rel1 = abs(got1 - want1) / want1

    diverged = False
    try:
        analytics.campbell_functional(single, 0, 4.0, lam_u)
    except analytics.DivergenceError:
        diverged = True

    ok = rel0 < 1e-8 and rel1 < 1e-6 and diverged
    assert report(
        9,
        ok,
        f"kernel 1: rel {rel0:.2e}; kernel r^-1: rel {rel1:.2e}; "
        f"kernel r^-4 divergence raised: {diverged}",
    )


def test_10_oracle_equivalence():
    gen = np.random.default_rng(1010)
    combos = [(s, m) for s in AssociationStrategy for m in GainFieldMode]
    matched = 0
    for trial in range(50):
        strategy, mode = combos[trial % len(combos)]
        res = int(gen.integers(32, 80))
        w = hc.Window(float(gen.uniform(4.0, 8.0)), res)
        sigma2 = float(gen.uniform(0.5, 3.0))
        tiers = (
            hc.TierConfig(1.0, dbm_to_watt(53.0), float(gen.uniform(3.0, 4.5)),
                          hc.FadingModel.lognormal(2.0)),
            hc.TierConfig(
                float(gen.uniform(0.5, 2.0)),
                dbm_to_watt(33.0),
                float(gen.uniform(3.0, 4.5)),
                hc.FadingModel.lognormal(sigma2),
            ),
        )
        master = 5000 + trial
        total = sum(t.density for t in tiers)
        fr = tuple(t.density / total for t in tiers)
        p = hc.sample_ppp(total, w, hrng.replication_stream(master, 0, hrng.STREAM_POINTS))
        p = hc.assign_tiers(p, fr, hrng.replication_stream(master, 0, hrng.STREAM_TIERS))
        p = hc.draw_gain_marks(p, tiers, hrng.replication_stream(master, 0, hrng.STREAM_GAINS))
        seed = hrng.stream_seed64(master, 0, hrng.STREAM_PIXEL_GAINS)
        fast = hc.compute_association_map(p, tiers, strategy, mode, w, seed)
        slow = brute_force_map(p, tiers, strategy, mode, w, seed)
        matched += bool(np.array_equal(fast.grid, slow.grid))
    ok = matched == 50
    assert report(10, ok, f"kernel map == brute-force oracle on {matched}/50 instances")
