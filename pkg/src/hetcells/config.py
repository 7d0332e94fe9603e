"""JSON experiment configuration.

Powers are given in dBm in config files and converted to linear watts
here, once, at the boundary; all internal math is linear-unit.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace

from .association import AssociationStrategy
from .fading import FadingModel, GainFieldMode
from .pointprocess import TierConfig, Window


class ConfigError(ValueError):
    """Invalid configuration, with the offending JSON path in the message."""


def dbm_to_watt(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watt_to_dbm(watt: float) -> float:
    import math

    return 10.0 * math.log10(watt) + 30.0


@dataclass(frozen=True)
class SimulationConfig:
    window: Window
    tiers: tuple  # of TierConfig, powers already in watts
    tier_power_dbm: tuple  # original dBm values, kept for round-tripping
    strategy: AssociationStrategy = AssociationStrategy.MAX_POWER
    gain_mode: GainFieldMode = GainFieldMode.PER_AP
    replications: int = 20
    master_seed: int = 0
    significance_level: float = 0.01
    output_dir: str = "."
    experiment_id: str = "experiment"
    dump_rasters: bool = False

    @property
    def total_density(self) -> float:
        return sum(t.density for t in self.tiers)

    @property
    def tier_fractions(self) -> tuple:
        total = self.total_density
        return tuple(t.density / total for t in self.tiers)

    def with_overrides(self, seed=None, reps=None, out=None) -> "SimulationConfig":
        cfg = self
        if seed is not None:
            cfg = replace(cfg, master_seed=int(seed))
        if reps is not None:
            cfg = replace(cfg, replications=int(reps))
        if out is not None:
            cfg = replace(cfg, output_dir=str(out))
        return cfg

    def to_dict(self) -> dict:
        return {
            "experiment_id": self.experiment_id,
            "window": {
                "side_length": self.window.side_length,
                "resolution": self.window.resolution,
            },
            "tiers": [
                {
                    "power_dbm": dbm,
                    "density": t.density,
                    "path_loss_exponent": t.path_loss_exponent,
                    "fading": _fading_to_dict(t.fading),
                }
                for t, dbm in zip(self.tiers, self.tier_power_dbm)
            ],
            "strategy": self.strategy.value,
            "gain_mode": self.gain_mode.value,
            "replications": self.replications,
            "master_seed": self.master_seed,
            "significance_level": self.significance_level,
            "output_dir": self.output_dir,
            "dump_rasters": self.dump_rasters,
        }

    def config_hash(self) -> str:
        doc = self.to_dict()
        doc.pop("output_dir")  # where results land does not change them
        canonical = json.dumps(doc, sort_keys=True)
        return hashlib.sha256(canonical.encode()).hexdigest()[:16]


def _fading_to_dict(model: FadingModel) -> dict:
    d = {"kind": model.kind}
    if model.kind == "lognormal":
        d["sigma"] = model.sigma
    if model.kind == "exponential":
        d["scale"] = model.scale
    return d


def _require(cond: bool, path: str, msg: str) -> None:
    if not cond:
        raise ConfigError(f"{path}: {msg}")


def _parse_fading(raw, path: str) -> FadingModel:
    if raw is None:
        return FadingModel.deterministic()
    _require(isinstance(raw, dict), path, "fading must be an object")
    kind = raw.get("kind", "deterministic")
    try:
        if kind == "lognormal":
            return FadingModel.lognormal(float(raw.get("sigma", 0.0)))
        if kind == "exponential":
            return FadingModel.exponential(float(raw.get("scale", 1.0)))
        if kind == "deterministic":
            return FadingModel.deterministic()
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    raise ConfigError(f"{path}.kind: unknown fading kind {kind!r}")


def parse_config(doc: dict) -> SimulationConfig:
    _require(isinstance(doc, dict), "$", "config must be a JSON object")
    raw_window = doc.get("window")
    _require(isinstance(raw_window, dict), "window", "missing or not an object")
    try:
        window = Window(
            side_length=float(raw_window.get("side_length", 0)),
            resolution=int(raw_window.get("resolution", 0)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"window: {exc}") from exc

    raw_tiers = doc.get("tiers")
    _require(isinstance(raw_tiers, list) and len(raw_tiers) > 0, "tiers", "need at least one tier")
    tiers = []
    dbms = []
    for i, raw in enumerate(raw_tiers):
        path = f"tiers[{i}]"
        _require(isinstance(raw, dict), path, "must be an object")
        _require("power_dbm" in raw, path, "missing power_dbm")
        _require("density" in raw, path, "missing density")
        dbm = float(raw["power_dbm"])
        try:
            tiers.append(
                TierConfig(
                    density=float(raw["density"]),
                    power=dbm_to_watt(dbm),
                    path_loss_exponent=float(raw.get("path_loss_exponent", 4.0)),
                    fading=_parse_fading(raw.get("fading"), f"{path}.fading"),
                )
            )
        except ValueError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
        dbms.append(dbm)

    try:
        strategy = AssociationStrategy(doc.get("strategy", "max_power"))
    except ValueError as exc:
        raise ConfigError(f"strategy: {exc}") from exc
    try:
        gain_mode = GainFieldMode(doc.get("gain_mode", "per_ap"))
    except ValueError as exc:
        raise ConfigError(f"gain_mode: {exc}") from exc

    reps = int(doc.get("replications", 20))
    _require(reps >= 1, "replications", "must be >= 1")
    alpha = float(doc.get("significance_level", 0.01))
    _require(0 < alpha < 1, "significance_level", "must be in (0, 1)")

    return SimulationConfig(
        window=window,
        tiers=tuple(tiers),
        tier_power_dbm=tuple(dbms),
        strategy=strategy,
        gain_mode=gain_mode,
        replications=reps,
        master_seed=int(doc.get("master_seed", 0)),
        significance_level=alpha,
        output_dir=str(doc.get("output_dir", ".")),
        experiment_id=str(doc.get("experiment_id", "experiment")),
        dump_rasters=bool(doc.get("dump_rasters", False)),
    )


def load_config(path) -> SimulationConfig:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
    return parse_config(doc)
