"""Command-line interface: simulate, analyze, sweep, validate.

All outputs are CSV (long format for sweeps) intended for external
plotting tools; the first line of every file is a provenance comment
carrying the master seed and a hash of the configuration.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import os
import sys

import numpy as np

from . import analytics, stats as _stats
from .association import AssociationStrategy
from .config import ConfigError, SimulationConfig, load_config
from .fading import GainFieldMode
from .oracles import brute_force_map
from .pointprocess import TierConfig
from .tessellation import compute_association_map, write_raster


def _provenance(config: SimulationConfig) -> str:
    return f"# master_seed={config.master_seed} config_hash={config.config_hash()}"


def _open_out(config: SimulationConfig, name: str):
    os.makedirs(config.output_dir, exist_ok=True)
    return open(os.path.join(config.output_dir, name), "w", newline="")


def write_summary_csv(config: SimulationConfig, result: _stats.AreaStatistics, fh) -> None:
    fh.write(_provenance(config) + "\n")
    writer = csv.writer(fh)
    writer.writerow(
        [
            "experiment_id",
            "tier",
            "method",
            "mean_area",
            "ci_half_width",
            "assoc_prob",
            "zero_cell_mean",
            "reps",
            "seed",
        ]
    )
    for k in range(result.n_tiers):
        writer.writerow(
            [
                config.experiment_id,
                k + 1,
                "montecarlo",
                repr(float(result.typical_mean_area[k])),
                repr(float(result.typical_mean_ci[k])),
                repr(float(result.empirical_assoc_prob[k])),
                repr(float(result.zero_cell_mean_area[k])),
                result.replications,
                config.master_seed,
            ]
        )


def write_cells_csv(config: SimulationConfig, result: _stats.AreaStatistics, fh) -> None:
    fh.write(_provenance(config) + "\n")
    writer = csv.writer(fh)
    writer.writerow(["replication", "ap_index", "tier", "area", "contains_origin"])
    for rep, ap, tier, area, origin in result.cell_rows:
        writer.writerow([rep, ap, tier, repr(float(area)), int(origin)])


def cmd_simulate(config: SimulationConfig) -> int:
    result = _stats.run_experiment(config, keep_cell_rows=True)
    with _open_out(config, f"{config.experiment_id}_summary.csv") as fh:
        write_summary_csv(config, result, fh)
    with _open_out(config, f"{config.experiment_id}_cells.csv") as fh:
        write_cells_csv(config, result, fh)
    if config.dump_rasters:
        _, amap, _, _ = _stats.run_replication(config, 0)
        write_raster(amap, os.path.join(config.output_dir, f"{config.experiment_id}_rep0.pgm.txt"))
    print(f"wrote {config.experiment_id}_summary.csv ({config.replications} replications)")
    return 0


def cmd_analyze(config: SimulationConfig) -> int:
    tiers = config.tiers
    equal_exponents = len({t.path_loss_exponent for t in tiers}) == 1
    closed = analytics.mean_area_closed_form(tiers) if equal_exponents else None
    quad = [analytics.mean_area_integral(tiers, i) for i in range(len(tiers))]
    lt = analytics.transformed_densities(tiers)
    probs = analytics.association_probability(tiers)
    with _open_out(config, f"{config.experiment_id}_analytic.csv") as fh:
        fh.write(_provenance(config) + "\n")
        writer = csv.writer(fh)
        writer.writerow(
            [
                "experiment_id",
                "tier",
                "mean_area_closed_form",
                "mean_area_quadrature",
                "quadrature_error",
                "assoc_prob",
                "transformed_density",
            ]
        )
        for k in range(len(tiers)):
            writer.writerow(
                [
                    config.experiment_id,
                    k + 1,
                    repr(float(closed[k])) if closed is not None else "",
                    repr(quad[k].value),
                    repr(quad[k].error),
                    repr(float(probs[k])),
                    repr(float(lt[k])),
                ]
            )
    print(f"wrote {config.experiment_id}_analytic.csv (assoc probs sum {probs.sum():.9f})")
    return 0


_SWEEPABLE = ("density", "sigma", "path_loss_exponent")


def _config_with_tier_param(config: SimulationConfig, tier: int, param: str, value: float):
    t = config.tiers[tier]
    if param == "density":
        new_t = dataclasses.replace(t, density=value)
    elif param == "path_loss_exponent":
        new_t = dataclasses.replace(t, path_loss_exponent=value)
    elif param == "sigma":
        if t.fading.kind != "lognormal":
            raise ConfigError(f"tier {tier + 1} fading is {t.fading.kind}, cannot sweep sigma")
        new_t = dataclasses.replace(t, fading=dataclasses.replace(t.fading, sigma=value))
    else:
        raise ConfigError(f"unknown sweep parameter {param!r}; choose from {_SWEEPABLE}")
    tiers = list(config.tiers)
    tiers[tier] = new_t
    return dataclasses.replace(config, tiers=tuple(tiers))


def cmd_sweep(config: SimulationConfig, param: str, tier: int, values) -> int:
    if param not in _SWEEPABLE:
        raise ConfigError(f"unknown sweep parameter {param!r}; choose from {_SWEEPABLE}")
    if not 1 <= tier <= len(config.tiers):
        raise ConfigError(f"sweep tier {tier} out of range 1..{len(config.tiers)}")
    rows = []
    for v in values:
        cfg = _config_with_tier_param(config, tier - 1, param, v)
        pred = analytics.predict(cfg.tiers)
        result = _stats.run_experiment(cfg)
        for k in range(len(cfg.tiers)):
            rows.append((v, k + 1, "analytic", pred.per_tier_mean_area[k], 0.0))
            rows.append(
                (v, k + 1, "montecarlo", result.typical_mean_area[k], result.typical_mean_ci[k])
            )
    name = f"{config.experiment_id}_sweep_{param}_tier{tier}.csv"
    with _open_out(config, name) as fh:
        fh.write(_provenance(config) + "\n")
        writer = csv.writer(fh)
        writer.writerow(["sweep_param", "sweep_tier", "sweep_value", "tier", "method", "mean_area", "ci_half_width"])
        for v, k, method, area, ci in rows:
            writer.writerow([param, tier, v, k, method, repr(float(area)), repr(float(ci))])
    print(f"wrote {name} ({len(values)} sweep points)")
    return 0


def _validation_checks(config: SimulationConfig, negative_control: bool):
    """Yield (name, passed, detail) for the desk-scale validation battery."""
    tiers = config.tiers

    probs = analytics.association_probability(tiers)
    yield (
        "prop2_identity",
        abs(probs.sum() - 1.0) < 1e-6,
        f"sum A_i = {probs.sum():.12f}",
    )

    equal = len({t.path_loss_exponent for t in tiers}) == 1
    if equal:
        closed = analytics.mean_area_closed_form(tiers)
        worst = 0.0
        for i in range(len(tiers)):
            q = analytics.mean_area_integral(tiers, i).value
            worst = max(worst, abs(q - closed[i]) / closed[i])
        yield ("quadrature_vs_closed_form", worst < 1e-6, f"max rel diff {worst:.3g}")

    # strategy equivalence on one realization of this config
    small = dataclasses.replace(
        config,
        window=dataclasses.replace(config.window, resolution=min(config.window.resolution, 200)),
    )
    pattern, _, _, _ = _stats.run_replication(small, 0)
    import hetcells.rng as _r

    gain_seed = _r.stream_seed64(small.master_seed, 0, _r.STREAM_PIXEL_GAINS)
    mp = compute_association_map(
        pattern, tiers, AssociationStrategy.MAX_POWER, small.gain_mode, small.window, gain_seed
    )
    ms = compute_association_map(
        pattern, tiers, AssociationStrategy.MAX_SIR, small.gain_mode, small.window, gain_seed
    )
    same = bool(np.array_equal(mp.grid, ms.grid))
    if negative_control:
        same = not same  # deliberately corrupted check
    yield ("max_sir_equals_max_power", same, f"{mp.resolution}x{mp.resolution} pixels compared")

    # zero-cell area biasing (Voronoi, reduced scale)
    voronoi = dataclasses.replace(
        config,
        tiers=(TierConfig(density=1.0, power=1.0, path_loss_exponent=4.0),),
        tier_power_dbm=(30.0,),
        strategy=AssociationStrategy.NEAREST,
        window=dataclasses.replace(config.window, side_length=15.0, resolution=300),
        replications=120,
    )
    result = _stats.run_experiment(voronoi)
    report = _stats.area_bias_check(result, 0, alpha=config.significance_level)
    ratio = result.zero_cell_mean_area[0] / result.typical_mean_area[0]
    yield (
        "zero_cell_area_biased",
        report.passed and ratio > 1.05,
        f"zero/typical = {ratio:.3f}, bias-identity p = {report.p_value:.3f}",
    )


def cmd_validate(config: SimulationConfig, negative_control: bool = False) -> int:
    failures = 0
    rows = []
    for name, passed, detail in _validation_checks(config, negative_control):
        status = "PASS" if passed else "FAIL"
        print(f"[{status}] {name}: {detail}")
        rows.append((name, status, detail))
        failures += 0 if passed else 1
    with _open_out(config, f"{config.experiment_id}_validate.csv") as fh:
        fh.write(_provenance(config) + "\n")
        writer = csv.writer(fh)
        writer.writerow(["check", "status", "detail"])
        writer.writerows(rows)
    return 1 if failures else 0


def cmd_oracle(config: SimulationConfig) -> int:
    """Hidden debugging path: compare the kernel map with the brute-force oracle."""
    small = dataclasses.replace(
        config,
        window=dataclasses.replace(config.window, resolution=min(config.window.resolution, 128)),
    )
    pattern, _, _, _ = _stats.run_replication(small, 0)
    import hetcells.rng as _r

    gain_seed = _r.stream_seed64(small.master_seed, 0, _r.STREAM_PIXEL_GAINS)
    fast = compute_association_map(
        pattern, small.tiers, small.strategy, small.gain_mode, small.window, gain_seed
    )
    slow = brute_force_map(
        pattern, small.tiers, small.strategy, small.gain_mode, small.window, gain_seed
    )
    same = bool(np.array_equal(fast.grid, slow.grid))
    print(f"oracle match: {same} ({pattern.n_points} APs, {small.window.resolution}^2 pixels)")
    return 0 if same else 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hetcells",
        description="Association-cell simulator and analytics for multi-tier random networks",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, about in [
        ("simulate", "run the Monte Carlo experiment and write CSV summaries"),
        ("analyze", "evaluate the analytic formulas and write a per-tier CSV"),
        ("sweep", "sweep one tier parameter; long-format CSV with analytic and MC columns"),
        ("validate", "run the built-in identity/equivalence checks; nonzero exit on failure"),
    ]:
        p = sub.add_parser(name, help=about)
        p.add_argument("--config", required=True, help="path to JSON config")
        p.add_argument("--seed", type=int, default=None, help="override master seed")
        p.add_argument("--out", default=None, help="override output directory")
        p.add_argument("--reps", type=int, default=None, help="override replication count")
        p.add_argument("--oracle", action="store_true", help=argparse.SUPPRESS)
        if name == "sweep":
            p.add_argument("--param", required=True, choices=_SWEEPABLE)
            p.add_argument("--tier", type=int, required=True, help="1-based tier to sweep")
            p.add_argument("--values", required=True, help="comma-separated sweep values")
        if name == "validate":
            p.add_argument(
                "--negative-control",
                action="store_true",
                help="deliberately corrupt one check; the command must then fail",
            )
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = load_config(args.config).with_overrides(
            seed=args.seed, reps=args.reps, out=args.out
        )
        if args.oracle:
            return cmd_oracle(config)
        if args.command == "simulate":
            return cmd_simulate(config)
        if args.command == "analyze":
            return cmd_analyze(config)
        if args.command == "sweep":
            values = [float(v) for v in args.values.split(",") if v.strip()]
            if not values:
                raise ConfigError("--values is empty")
            return cmd_sweep(config, args.param, args.tier, values)
        return cmd_validate(config, negative_control=args.negative_control)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
